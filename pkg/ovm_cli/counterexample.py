"""Explicit non-spectral measures whose ``p``-th and ``q``-th moments match a scalar.

For every exponent pair outside Omega the two-point scalar measure
``alpha delta_{lambda1} + beta delta_{lambda2}`` (times the identity) has
``p``-th and ``q``-th moments equal to ``tau^p`` and ``tau^q`` while not being
spectral.  ``solve_params`` finds the weights and support points at
``tau = 1`` and rescales afterwards.

Also here: the golden-ratio example on ``S = [[0, 1], [1, 1]]`` and its
operator-valued tensor version ``S = [[0, T], [T, T]]``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Callable, Sequence

import numpy as np
import scipy.optimize

from .characterization import in_omega
from .config import BISECTION_MAXITER, BISECTION_XTOL, EQUALITY_TOL
from .dilation import NaimarkDilation, compress, dilation_from_operator
from .errors import ConvergenceError, DocumentError, DomainError, RefusalError
from .hermitian import HermitianMatrix, block_matrix
from .povm import FiniteOVM

logger = logging.getLogger(__name__)

GOLDEN_RATIO = (1.0 + math.sqrt(5.0)) / 2.0
SYSTEM_TOL = 1e-10
_MAX_BRACKET_DOUBLINGS = 200


@dataclass(frozen=True)
class CounterexampleParams:
    """Solution of ``a l1^k + b l2^k = tau^k`` (``k = p, q``) with ``a + b = 1``."""

    p: int
    q: int
    tau: float
    alpha: float
    beta: float
    lambda1: float
    lambda2: float

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, payload: Any) -> "CounterexampleParams":
        if not isinstance(payload, dict):
            raise DocumentError(["params: expected an object"])
        errors: list[str] = []
        values: dict[str, Any] = {}
        for name in ("p", "q"):
            raw = payload.get(name)
            if isinstance(raw, bool) or not isinstance(raw, int) or raw < 1:
                errors.append(f"params.{name}: expected a positive integer, got {raw!r}")
            values[name] = raw
        for name in ("tau", "alpha", "beta", "lambda1", "lambda2"):
            raw = payload.get(name)
            if isinstance(raw, bool) or not isinstance(raw, (int, float)):
                errors.append(f"params.{name}: expected a number, got {raw!r}")
            else:
                values[name] = float(raw)
        if errors:
            raise DocumentError(errors)
        return cls(**values)

    def moment(self, k: int) -> float:
        """``alpha lambda1^k + beta lambda2^k``."""
        return self.alpha * self.lambda1**k + self.beta * self.lambda2**k

    def residuals(self) -> tuple[float, float]:
        """Relative defects of the ``p`` and ``q`` equations."""
        out = []
        for k in (self.p, self.q):
            target = self.tau**k
            out.append(abs(self.moment(k) - target) / max(1.0, abs(target)))
        return out[0], out[1]


# ---------------------------------------------------------------------------
# Solver
# ---------------------------------------------------------------------------


def _bisect(g: Callable[[float], float], lo: float, hi: float) -> float:
    root, info = scipy.optimize.bisect(
        g, lo, hi, xtol=BISECTION_XTOL, maxiter=BISECTION_MAXITER, full_output=True, disp=False
    )
    if not info.converged:
        raise ConvergenceError(
            f"bisection on [{lo:.6g}, {hi:.6g}] did not converge after {info.iterations} steps"
        )
    logger.debug("bisection on [%g, %g]: root %.17g in %d steps", lo, hi, root, info.iterations)
    return float(root)


def _weights(l1: float, l2: float, p: int) -> tuple[float, float]:
    # a = 1, b = (l1^p - 1) / (1 - l2^p), alpha = a / (a + b)
    b = (l1**p - 1.0) / (1.0 - l2**p)
    alpha = 1.0 / (1.0 + b)
    return alpha, 1.0 - alpha


def _solve_unit(p: int, q: int, lambda1: float) -> tuple[float, float, float, float]:
    """``(alpha, beta, l1, l2)`` at ``tau = 1``."""
    if p == q:
        return 0.5, 0.5, 0.0, 2.0 ** (1.0 / p)
    if p % 2 == 0 and q % 2 == 0:
        return 0.5, 0.5, -1.0, 1.0

    l1 = lambda1
    c = (1.0 - l1**p) / (1.0 - l1**q)
    if p % 2 == 0:
        # p even, q odd: (1 - x^p) / (1 + x^q) falls from 1 to 0 on (0, 1)
        x = _bisect(lambda x: (1.0 - x**p) / (1.0 + x**q) - c, 0.0, 1.0)
    else:
        # both odd: (1 + x^p) / (1 + x^q) falls from 1 towards 0 on (1, inf)
        def psi(x: float) -> float:
            return (1.0 + x**p) / (1.0 + x**q) - c

        hi = 2.0
        for _ in range(_MAX_BRACKET_DOUBLINGS):
            if psi(hi) < 0:
                break
            hi *= 2.0
        else:
            raise ConvergenceError(
                f"no sign change for ({p}, {q}) with lambda1={l1:g} up to x={hi:.3g}"
            )
        logger.debug("bracket for (%d, %d) expanded to (1, %g)", p, q, hi)
        x = _bisect(psi, 1.0, hi)
    l2 = -x
    alpha, beta = _weights(l1, l2, p)
    return alpha, beta, l1, l2


def solve_params(p: int, q: int, tau: float = 1.0, lambda1: float = 2.0) -> CounterexampleParams:
    """Weights and support points of a scalar counterexample for ``(p, q)``.

    ``lambda1`` is the free support point of the odd cases and must exceed 1;
    it is ignored when ``p == q`` or both exponents are even.
    """
    if p < 1 or q < 1:
        raise DomainError(f"exponents must be positive integers, got ({p}, {q})")
    if p > q:
        raise DomainError(f"expected p <= q, got ({p}, {q})")
    if tau == 0 or not math.isfinite(tau):
        raise DomainError("tau must be a finite nonzero real", value=float(tau))
    if not lambda1 > 1.0:
        raise DomainError(f"lambda1 must be > 1, got {lambda1}", value=lambda1)
    if in_omega(p, q):
        raise RefusalError(
            f"(p, q) = ({p}, {q}) lies in Omega (p odd < q even). By the two-moment "
            "characterization theorem, F with T^p and T^q as its p-th and q-th moments "
            "is the spectral measure of T, so no counterexample exists"
        )

    alpha, beta, l1, l2 = _solve_unit(p, q, lambda1)
    params = CounterexampleParams(
        p=p, q=q, tau=float(tau), alpha=alpha, beta=beta, lambda1=tau * l1, lambda2=tau * l2
    )
    worst = max(params.residuals())
    if worst > SYSTEM_TOL or not (0.0 < alpha < 1.0) or l1 == l2:
        raise ConvergenceError(
            f"solution for ({p}, {q}, tau={tau:g}) fails verification "
            f"(residual {worst:.3g}, alpha={alpha:.6g})"
        )
    return params


# ---------------------------------------------------------------------------
# Materialization
# ---------------------------------------------------------------------------


def build_povm(params: CounterexampleParams, dim: int = 1) -> tuple[HermitianMatrix, FiniteOVM]:
    """``T = tau I`` and ``F = alpha delta_{l1} I + beta delta_{l2} I`` on ``C^dim``."""
    if dim < 1:
        raise DomainError(f"dimension must be positive, got {dim}", value=float(dim))
    eye = HermitianMatrix.identity(dim)
    t = eye * params.tau
    f = FiniteOVM.from_atoms(
        [(params.lambda1, eye * params.alpha), (params.lambda2, eye * params.beta)], dim=dim
    )
    return t, f


def build_dilation_matrix(params: CounterexampleParams) -> HermitianMatrix:
    """The 2x2 dilated operator whose top-left corner reproduces the moments."""
    a, b = params.alpha, params.beta
    l1, l2 = params.lambda1, params.lambda2
    off = math.sqrt(a * b) * (l1 - l2)
    return HermitianMatrix(np.array([[a * l1 + b * l2, off], [off, b * l1 + a * l2]]))


def dilation_power(params: CounterexampleParams, n: int) -> np.ndarray:
    """Closed form of ``S^n`` for the matrix of ``build_dilation_matrix``."""
    a, b = params.alpha, params.beta
    l1n, l2n = params.lambda1**n, params.lambda2**n
    off = math.sqrt(a * b) * (l1n - l2n)
    return np.array([[a * l1n + b * l2n, off], [off, b * l1n + a * l2n]])


def determinant(l1: float, l2: float, p: int, q: int) -> float:
    """``(l1^p - 1)(l2^q - 1) - (l2^p - 1)(l1^q - 1)``; zero for every solution at tau = 1."""
    return (l1**p - 1.0) * (l2**q - 1.0) - (l2**p - 1.0) * (l1**q - 1.0)


def multiplicativity_defect(params: CounterexampleParams) -> float:
    """``Phi(uv) - Phi(u) Phi(v)`` for ``u = x - l1``, ``v = x - l2``.

    ``Phi(g) = alpha g(l1) + beta g(l2)``; ``uv`` vanishes on the support so
    the defect equals ``alpha beta (l1 - l2)^2 > 0``.
    """
    a, b = params.alpha, params.beta
    l1, l2 = params.lambda1, params.lambda2

    def phi(g: Callable[[float], float]) -> float:
        return a * g(l1) + b * g(l2)

    return phi(lambda x: (x - l1) * (x - l2)) - phi(lambda x: x - l1) * phi(lambda x: x - l2)


def transcript(params: CounterexampleParams) -> dict[str, Any]:
    """Verification record emitted next to the params document."""
    res_p, res_q = params.residuals()
    s = build_dilation_matrix(params)
    unit = params.tau
    return {
        "system_residuals": {"p": res_p, "q": res_q},
        "weight_defect": abs(params.alpha + params.beta - 1.0),
        "determinant": determinant(
            params.lambda1 / unit, params.lambda2 / unit, params.p, params.q
        ),
        "s_matrix_corner": {
            "p": float(np.real(s.power(params.p).entry(0, 0))),
            "q": float(np.real(s.power(params.q).entry(0, 0))),
        },
        "multiplicativity_defect": multiplicativity_defect(params),
    }


# ---------------------------------------------------------------------------
# Golden-ratio and tensor examples
# ---------------------------------------------------------------------------


def fibonacci_numbers(count: int) -> list[int]:
    """``[f_0, f_1, ..., f_{count-1}]`` with ``f_0 = 0``, ``f_1 = 1``."""
    out = [0, 1]
    while len(out) < count:
        out.append(out[-1] + out[-2])
    return out[:count]


@dataclass(frozen=True, eq=False)
class FibonacciExample:
    T: HermitianMatrix
    S: HermitianMatrix
    F: FiniteOVM
    dilation: NaimarkDilation


def fibonacci_example() -> FibonacciExample:
    """``T = 1``, ``S = [[0, 1], [1, 1]]`` and ``F = P E(.)|_H`` with ``P = diag(1, 0)``.

    ``(S^k)_11 = f_{k-1}``, so the moments of ``F`` equal ``T^k`` only for
    ``k = 2, 3``.
    """
    s = HermitianMatrix(np.array([[0.0, 1.0], [1.0, 1.0]]))
    e1 = np.array([[1.0], [0.0]])
    d = dilation_from_operator(s, e1)
    return FibonacciExample(T=HermitianMatrix.scalar(1.0), S=s, F=compress(d), dilation=d)


def fibonacci_weights() -> dict[float, float]:
    """Closed-form atoms of the golden-ratio measure."""
    phi2 = GOLDEN_RATIO**2
    return {1.0 - GOLDEN_RATIO: phi2 / (1.0 + phi2), GOLDEN_RATIO: 1.0 / (1.0 + phi2)}


def _tensor_operator(t: HermitianMatrix) -> HermitianMatrix:
    if t.norm_fro() <= EQUALITY_TOL:
        raise DomainError("T must be nonzero; for T = 0 the projection commutes with S")
    zero = np.zeros((t.dim, t.dim))
    return block_matrix([[zero, t], [t, t]])


def tensor_example(t: HermitianMatrix, n: int) -> HermitianMatrix:
    """``S^n`` for ``S = [[0, T], [T, T]]``.

    Equals ``[[f_{n-1} T^n, f_n T^n], [f_n T^n, f_{n+1} T^n]]``.
    """
    if n < 1:
        raise DomainError(f"power must be a positive integer, got {n}", value=float(n))
    return _tensor_operator(t).power(n)


def tensor_example_povm(t: HermitianMatrix) -> tuple[HermitianMatrix, FiniteOVM]:
    """``S = [[0, T], [T, T]]`` and ``F``, its spectral measure compressed to the first block."""
    s = _tensor_operator(t)
    v = np.vstack([np.eye(t.dim), np.zeros((t.dim, t.dim))])
    return s, compress(dilation_from_operator(s, v))


# ---------------------------------------------------------------------------
# Hoelder obstruction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridSearchResult:
    p: int
    q: int
    candidates: int
    min_residual: float
    argmin: tuple[float, float, float] | None


def hoelder_grid_search(
    p: int, q: int, grid: Sequence[float] | None = None, min_gap: float = 1e-3
) -> GridSearchResult:
    """Scan scalar two-point measures for solutions of the unit system.

    For each grid pair ``l1 < l2`` the weight is fixed by the ``p`` equation
    (``alpha = (1 - l2^p) / (l1^p - l2^p)``); pairs with ``alpha`` outside
    ``(0, 1)`` are skipped and the ``q`` equation's relative defect is
    minimized over the rest.  The default grid avoids ``+-1`` and ``0``,
    where a vanishing weight would fake a solution.  For ``p`` odd and ``q``
    even the minimum stays bounded away from zero.
    """
    points = np.linspace(-3.0, 3.0, 240) if grid is None else np.asarray(grid, dtype=np.float64)
    best = math.inf
    best_at: tuple[float, float, float] | None = None
    count = 0
    for i, l1 in enumerate(points):
        for l2 in points[i + 1 :]:
            if l2 - l1 < min_gap:
                continue
            denom = l1**p - l2**p
            if denom == 0:
                continue
            alpha = (1.0 - l2**p) / denom
            if not 0.0 < alpha < 1.0:
                continue
            count += 1
            residual = abs(alpha * l1**q + (1.0 - alpha) * l2**q - 1.0)
            if residual < best:
                best, best_at = residual, (float(alpha), float(l1), float(l2))
    logger.debug("grid search (%d, %d): %d candidates, min residual %.3g", p, q, count, best)
    return GridSearchResult(p=p, q=q, candidates=count, min_residual=best, argmin=best_at)
