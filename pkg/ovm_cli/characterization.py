"""Two-moment spectrality certifiers and the randomized falsification harness.

A measure ``F`` is *the spectral measure of* ``T`` when it is spectral and
all its moments agree with the powers of ``T``.  For ``p`` odd, ``q`` even,
``p < q`` (the set Omega) agreement of the ``p``-th and ``q``-th moments
alone already forces this; for positive support any two distinct positive
exponents suffice.  ``Verdict.theorem_consistent`` is false exactly when
the numbers contradict that implication.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable

import numpy as np

from .config import CERTIFY_TOL, DEFAULT_DIM_MAX
from .errors import DimensionError, DomainError
from .hermitian import (
    HermitianMatrix,
    apply_function,
    approx_eq,
    fractional_power,
    is_psd,
    real_root,
)
from .inequalities import CompressionMap
from .povm import (
    FiniteOVM,
    is_injective_on_support,
    is_spectral,
    moment,
    moment_real,
    pushforward,
    random_nonspectral_ovm,
    rescale,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Verdict:
    """Outcome of one certification.

    ``residuals`` are Frobenius distances measured after both operands are
    divided by their common scale (see ``unit_scale``), so they are
    dimensionless and comparable across measures of any size.
    """

    exponents: tuple[float, ...]
    moments_match: tuple[bool, ...]
    pair_in_omega: bool
    direct_spectral: bool
    residuals: tuple[float, ...]
    criterion: str = "two-moment"

    @property
    def all_match(self) -> bool:
        return all(self.moments_match)

    @property
    def theorem_consistent(self) -> bool:
        return not (self.pair_in_omega and self.all_match and not self.direct_spectral)

    def to_dict(self) -> dict[str, Any]:
        return {
            "criterion": self.criterion,
            "exponents": list(self.exponents),
            "moments_match": list(self.moments_match),
            "pair_in_omega": self.pair_in_omega,
            "direct_spectral": self.direct_spectral,
            "theorem_consistent": self.theorem_consistent,
            "residuals": list(self.residuals),
        }


def in_omega(p: int, q: int) -> bool:
    """``p < q`` with ``p`` odd and ``q`` even."""
    return p < q and p % 2 == 1 and q % 2 == 0


def _check_dims(t: HermitianMatrix, f: FiniteOVM) -> None:
    if t.dim != f.dim:
        raise DimensionError(f.dim, t.dim, what="operator T")


def unit_scale(t: HermitianMatrix, f: FiniteOVM | None = None) -> float:
    """``max(||T||_2, max|lambda_i|)``, or 1 when everything vanishes.

    Moments scale as ``s^k`` under ``x -> x / s``, so certifying the pair
    ``(T / s, F(s .))`` gives the same verdict at every scale.
    """
    scale = t.norm_2()
    if f is not None:
        scale = max(scale, max(abs(lam) for lam in f.support))
    return scale if scale > 0 else 1.0


def _to_unit(
    t: HermitianMatrix, f: FiniteOVM, scale: float
) -> tuple[HermitianMatrix, FiniteOVM]:
    return HermitianMatrix(t.data / scale), rescale(f, 1.0 / scale)


def _is_spectral_measure_of(t: HermitianMatrix, f: FiniteOVM, top: int, tol: float) -> bool:
    """``F`` spectral and ``T^k = moment_k`` for ``k = 0..top``."""
    if not is_spectral(f, tol):
        return False
    power = HermitianMatrix.identity(t.dim)
    for k in range(top + 1):
        if k:
            power = HermitianMatrix(power.data @ t.data)
        if not approx_eq(power, moment(f, k), tol):
            return False
    return True


def _moment_horizon(q: int, f: FiniteOVM) -> int:
    # m atoms are pinned down by the first 2m moments
    return max(2 * q, 2 * len(f))


def certify_two_moment(
    t: HermitianMatrix, f: FiniteOVM, p: int, q: int, tol: float = CERTIFY_TOL
) -> Verdict:
    """Compare ``T^p, T^q`` with the ``p``-th and ``q``-th moments of ``F``.

    ``direct_spectral`` is decided independently of ``(p, q)``: ``F`` must be
    spectral and reproduce every power of ``T`` up to
    ``max(2q, 2 * len(F))``.

    Both operands are first divided by ``unit_scale(T, F)``, so the relative
    tolerance means the same thing for support near 0 and for large support.
    """
    _check_dims(t, f)
    if p < 1 or p > q:
        raise DomainError(f"expected 1 <= p <= q, got ({p}, {q})")
    f.require_normalized()
    t, f = _to_unit(t, f, unit_scale(t, f))

    matches: list[bool] = []
    residuals: list[float] = []
    for k in (p, q):
        tk, mk = t.power(k), moment(f, k)
        residuals.append((tk - mk).norm_fro())
        matches.append(approx_eq(tk, mk, tol))

    direct = _is_spectral_measure_of(t, f, _moment_horizon(q, f), tol)
    verdict = Verdict(
        exponents=(float(p), float(q)),
        moments_match=tuple(matches),
        pair_in_omega=in_omega(p, q),
        direct_spectral=direct,
        residuals=tuple(residuals),
    )
    if not verdict.theorem_consistent:
        logger.warning("Two-moment implication contradicted at (p, q)=(%d, %d)", p, q)
    return verdict


def recover_t_odd(f: FiniteOVM, p: int) -> HermitianMatrix:
    """The unique Hermitian ``T`` with ``T^p = moment_p(F)`` for odd ``p``."""
    if p < 1 or p % 2 == 0:
        raise DomainError(
            f"p={p} is not a positive odd integer; an even power has no unique Hermitian root",
            value=float(p),
        )
    root, domain = real_root(p)
    return apply_function(moment(f, p), root, domain)


def certify_positive(
    t: HermitianMatrix,
    f: FiniteOVM,
    alpha: float,
    beta: float,
    tol: float = CERTIFY_TOL,
) -> Verdict:
    """Real-exponent version for PSD ``T`` and support in ``[0, inf)``."""
    _check_dims(t, f)
    if alpha <= 0 or beta <= 0:
        raise DomainError(f"exponents must be positive, got ({alpha}, {beta})")
    if alpha == beta:
        raise DomainError("the two exponents must differ", value=alpha)
    if not is_psd(t, tol):
        raise DomainError("T must be positive semidefinite", value=t.min_eigenvalue())
    bad = [lam for lam in f.support if lam < 0]
    if bad:
        raise DomainError(f"support point {bad[0]:.6g} is negative", value=bad[0])
    f.require_normalized()
    t, f = _to_unit(t, f, unit_scale(t, f))

    matches: list[bool] = []
    residuals: list[float] = []
    for r in (alpha, beta):
        tr, mr = fractional_power(t, r), moment_real(f, r)
        residuals.append((tr - mr).norm_fro())
        matches.append(approx_eq(tr, mr, tol))

    top = _moment_horizon(int(np.ceil(max(alpha, beta))), f)
    return Verdict(
        exponents=(float(alpha), float(beta)),
        moments_match=tuple(matches),
        pair_in_omega=True,
        direct_spectral=_is_spectral_measure_of(t, f, top, tol),
        residuals=tuple(residuals),
        criterion="positive",
    )


def certify_transported(
    f: FiniteOVM,
    omega: Callable[[float], float],
    t: HermitianMatrix,
    p: int,
    q: int,
    tol: float = CERTIFY_TOL,
) -> Verdict:
    """Certify through the image measure ``F o omega^{-1}``.

    ``T^k`` is compared with ``int omega^k dF``.  The implication applies when
    ``omega`` separates the support and either ``(p, q)`` lies in Omega or
    ``omega`` takes only nonnegative values (then any ``p < q`` works).
    ``direct_spectral`` refers to ``F`` itself.
    """
    _check_dims(t, f)
    if p < 1 or p > q:
        raise DomainError(f"expected 1 <= p <= q, got ({p}, {q})")
    image = pushforward(f, omega)
    injective = is_injective_on_support(f, omega)
    nonnegative = all(lam >= 0 for lam in image.support)
    t, image = _to_unit(t, image, unit_scale(t, image))

    matches: list[bool] = []
    residuals: list[float] = []
    for k in (p, q):
        tk, mk = t.power(k), moment(image, k)
        residuals.append((tk - mk).norm_fro())
        matches.append(approx_eq(tk, mk, tol))

    applies = injective and (in_omega(p, q) or (nonnegative and p < q))
    direct = is_spectral(f, tol) and _is_spectral_measure_of(
        t, image, _moment_horizon(q, image), tol
    )
    logger.debug("transported certification: injective=%s nonnegative=%s", injective, nonnegative)
    return Verdict(
        exponents=(float(p), float(q)),
        moments_match=tuple(matches),
        pair_in_omega=applies,
        direct_spectral=direct,
        residuals=tuple(residuals),
        criterion="transported",
    )


def certify_compression(
    c: CompressionMap, a: HermitianMatrix, p: int, q: int, tol: float = CERTIFY_TOL
) -> Verdict:
    """Two-moment test for the compression map ``Phi`` on the algebra generated by ``A``.

    ``b`` is the real ``p``-th root of ``Phi(A^p)``; the moments match when
    ``b^q = Phi(A^q)``.  ``direct_spectral`` here means ``Phi`` is
    multiplicative on polynomials in ``A`` (``Phi(A^k) = Phi(A)^k`` up to
    ``k = 2 * dim``) and ``b = Phi(A)``.
    """
    if p < 1 or p > q:
        raise DomainError(f"expected 1 <= p <= q, got ({p}, {q})")
    if p % 2 == 0:
        raise DomainError("the compression test needs an odd p", value=float(p))
    root, domain = real_root(p)
    a = HermitianMatrix(a.data / unit_scale(a))
    phi_p = c(a.power(p))
    b = apply_function(phi_p, root, domain)
    phi_q = c(a.power(q))
    matches = (approx_eq(b.power(p), phi_p, tol), approx_eq(b.power(q), phi_q, tol))
    residuals = ((b.power(p) - phi_p).norm_fro(), (b.power(q) - phi_q).norm_fro())

    phi_a = c(a)
    multiplicative = all(
        approx_eq(c(a.power(k)), phi_a.power(k), tol) for k in range(2, 2 * c.big_dim + 1)
    )
    return Verdict(
        exponents=(float(p), float(q)),
        moments_match=matches,
        pair_in_omega=in_omega(p, q),
        direct_spectral=multiplicative and approx_eq(b, phi_a, tol),
        residuals=residuals,
        criterion="compression",
    )


def holder_check(alpha: float, l1: float, l2: float, p: int, q: int) -> tuple[float, float]:
    """``(|a l1^p + b l2^p|, (a l1^q + b l2^q)^(p/q))`` with ``b = 1 - a``.

    lhs <= rhs whenever q is even.
    """
    beta = 1.0 - alpha
    lhs = abs(alpha * l1**p + beta * l2**p)
    rhs = (alpha * l1**q + beta * l2**q) ** (p / q)
    return lhs, rhs


# ---------------------------------------------------------------------------
# Falsification search
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Witness:
    trial: int
    t: HermitianMatrix
    f: FiniteOVM
    verdict: Verdict


@dataclass
class SearchOutcome:
    """Summary of a seeded search.

    ``witness`` is the first verdict contradicting the implication (always
    ``None`` inside Omega); ``matched`` is the first non-spectral instance
    whose two moments agree, which is legitimate outside Omega.
    """

    p: float
    q: float
    trials: int
    evaluated: int = 0
    witness: Witness | None = None
    matched: Witness | None = None
    min_residual: float = float("inf")
    residuals: list[float] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "p": self.p,
            "q": self.q,
            "trials": self.trials,
            "evaluated": self.evaluated,
            "min_residual": self.min_residual if self.evaluated else None,
            "witness": None if self.witness is None else self.witness.verdict.to_dict(),
            "matched": None if self.matched is None else self.matched.verdict.to_dict(),
        }


TrialFn = Callable[[int], "Witness | None"]


def _run(outcome: SearchOutcome, trial_fn: TrialFn, trials: int, workers: int) -> SearchOutcome:
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(trial_fn, range(trials)))
    else:
        results = [trial_fn(i) for i in range(trials)]
    for item in results:
        _absorb(outcome, item)
    return outcome


def _absorb(outcome: SearchOutcome, item: Witness | None) -> None:
    if item is None:
        return
    v = item.verdict
    outcome.evaluated += 1
    outcome.residuals.append(v.residuals[1])
    outcome.min_residual = min(outcome.min_residual, v.residuals[1])
    if outcome.witness is None and not v.theorem_consistent:
        outcome.witness = item
    if outcome.matched is None and v.all_match and not v.direct_spectral:
        outcome.matched = item


def search_violation(
    p: int,
    q: int,
    trials: int,
    seed: int,
    dim_max: int = DEFAULT_DIM_MAX,
    *,
    workers: int = 1,
    inject: Iterable[tuple[HermitianMatrix, FiniteOVM]] = (),
    tol: float = CERTIFY_TOL,
) -> SearchOutcome:
    """Seeded random stress of the two-moment implication.

    Trial ``i`` draws a non-spectral measure from
    ``default_rng([seed, i])``, sets ``T`` to the real ``p``-th root of its
    ``p``-th moment and certifies.  Even ``p`` skips the random trials;
    ``inject`` adds caller-supplied ``(T, F)`` pairs after them.
    """
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}", value=float(trials))

    def trial(i: int) -> Witness | None:
        if p % 2 == 0:
            return None
        rng = np.random.default_rng([seed, i])
        f = random_nonspectral_ovm(rng, dim_max)
        t = recover_t_odd(f, p)
        return Witness(trial=i, t=t, f=f, verdict=certify_two_moment(t, f, p, q, tol))

    outcome = _run(SearchOutcome(p=p, q=q, trials=trials), trial, trials, workers)
    for offset, (t, f) in enumerate(inject):
        verdict = certify_two_moment(t, f, p, q, tol)
        _absorb(outcome, Witness(trial=trials + offset, t=t, f=f, verdict=verdict))
    logger.info(
        "search (%d, %d): %d evaluated, witness=%s, min q-residual %.3g",
        p,
        q,
        outcome.evaluated,
        outcome.witness is not None,
        outcome.min_residual,
    )
    return outcome


def search_positive_violation(
    alpha: float,
    beta: float,
    trials: int,
    seed: int,
    dim_max: int = DEFAULT_DIM_MAX,
    *,
    workers: int = 1,
    tol: float = CERTIFY_TOL,
) -> SearchOutcome:
    """Positive-support analogue: ``T := moment_alpha^(1/alpha)``, then compare at ``beta``."""
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}", value=float(trials))

    def trial(i: int) -> Witness:
        rng = np.random.default_rng([seed, i])
        f = random_nonspectral_ovm(rng, dim_max, nonnegative=True)
        t = fractional_power(moment_real(f, alpha), 1.0 / alpha)
        return Witness(trial=i, t=t, f=f, verdict=certify_positive(t, f, alpha, beta, tol))

    return _run(SearchOutcome(p=alpha, q=beta, trials=trials), trial, trials, workers)
