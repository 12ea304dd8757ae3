"""Finitely-supported operator-valued measures on the real line.

A ``FiniteOVM`` is a list of atoms ``(lambda_i, F_i)`` with distinct real
support points and positive semidefinite effects.  When the effects sum to
the identity the measure is *semispectral* and the ``normalized`` flag is
set; moment-type operations refuse measures without it.

The Borel-set evaluation of the measure is exposed only through
``FiniteOVM.evaluate``, which sums the effects sitting in a finite union of
closed intervals.

Random corpora follow one documented recipe: draw ``m`` PSD matrices
``G_i``, put ``Sum = sum(G_i)`` and use the effects
``Sum^{-1/2} G_i Sum^{-1/2}``.  Everything is driven by a
``numpy.random.Generator`` so corpora are reproducible from a seed.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from .config import EFFECT_DROP, EQUALITY_TOL, MAX_REAL_EXPONENT, MERGE_RADIUS
from .errors import DimensionError, DocumentError, DomainError, NormalizationError
from .hermitian import (
    NONNEGATIVE,
    HermitianMatrix,
    apply_function,
    block_matrix,
    eig,
    fractional_power,
    is_projection,
    random_isometry,
    random_psd,
)
from .io_utils import digest as _digest

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Atom:
    """One support point with its effect."""

    lam: float
    effect: HermitianMatrix


@dataclass(frozen=True, eq=False)
class FiniteOVM:
    """A finitely-supported POV measure on the real line."""

    dim: int
    atoms: tuple[Atom, ...]
    normalized: bool
    normalization_defect: float

    # -- construction ----------------------------------------------------------

    @classmethod
    def from_atoms(
        cls,
        atoms: Iterable[tuple[float, HermitianMatrix | np.ndarray | float]],
        dim: int | None = None,
        *,
        psd_tol: float = EQUALITY_TOL,
    ) -> "FiniteOVM":
        """Build a measure from ``(lambda, effect)`` pairs.

        Scalar effects are read as multiples of the identity (``dim``
        defaults to 1 in that case).  Support points within the merge radius
        are combined by summing their effects, effects with negligible
        Frobenius norm are dropped and atoms are sorted by ``lambda``.
        """
        raw: list[tuple[float, HermitianMatrix]] = []
        for lam, effect in atoms:
            lam_f = float(lam)
            if not math.isfinite(lam_f):
                raise DomainError(f"support point {lam!r} is not finite", value=lam_f)
            if isinstance(effect, HermitianMatrix):
                matrix = effect
            elif np.ndim(effect) == 0:
                matrix = HermitianMatrix.identity(dim or 1) * float(np.real(effect))
            else:
                matrix = HermitianMatrix(np.asarray(effect))
            raw.append((lam_f, matrix))

        if not raw:
            raise DomainError("a measure needs at least one atom")
        resolved_dim = dim if dim is not None else raw[0][1].dim
        for _, matrix in raw:
            if matrix.dim != resolved_dim:
                raise DimensionError(resolved_dim, matrix.dim, what="effect")

        raw.sort(key=lambda pair: pair[0])
        radius = MERGE_RADIUS * (1.0 + max(abs(lam) for lam, _ in raw))
        merged: list[tuple[float, HermitianMatrix]] = []
        for lam, matrix in raw:
            if merged and abs(lam - merged[-1][0]) <= radius:
                logger.debug("Merging support point %r into %r", lam, merged[-1][0])
                merged[-1] = (merged[-1][0], merged[-1][1] + matrix)
            else:
                merged.append((lam, matrix))

        kept: list[Atom] = []
        for lam, matrix in merged:
            if matrix.norm_fro() < EFFECT_DROP:
                logger.debug("Dropping zero-mass atom at %r", lam)
                continue
            min_eig = matrix.min_eigenvalue()
            if min_eig < -psd_tol * (1.0 + matrix.norm_2()):
                raise DomainError(
                    f"effect at lambda={lam:.6g} is not positive semidefinite "
                    f"(min eigenvalue {min_eig:.3g})",
                    value=min_eig,
                )
            kept.append(Atom(lam=lam, effect=matrix))
        if not kept:
            raise DomainError("every atom has zero mass")

        total = kept[0].effect
        for atom in kept[1:]:
            total = total + atom.effect
        identity = HermitianMatrix.identity(resolved_dim)
        diff = total - identity
        defect = diff.norm_2()
        scale = 1.0 + max(total.norm_fro(), identity.norm_fro())
        normalized = diff.norm_fro() <= EQUALITY_TOL * scale
        return cls(
            dim=resolved_dim,
            atoms=tuple(kept),
            normalized=bool(normalized),
            normalization_defect=defect,
        )

    @classmethod
    def from_dict(cls, payload: Any) -> "FiniteOVM":
        """Parse the POVM JSON document, collecting every field error."""
        errors: list[str] = []
        if not isinstance(payload, dict):
            raise DocumentError(["root: expected an object with 'dim' and 'atoms'"])

        dim = payload.get("dim")
        if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
            errors.append(f"dim: expected a positive integer, got {dim!r}")
            dim = None
        raw_atoms = payload.get("atoms")
        if not isinstance(raw_atoms, list) or not raw_atoms:
            errors.append("atoms: expected a non-empty list")
            raw_atoms = []

        parsed: list[tuple[float, HermitianMatrix]] = []
        for i, entry in enumerate(raw_atoms):
            path = f"atoms[{i}]"
            if not isinstance(entry, dict):
                errors.append(f"{path}: expected an object with 'lambda' and 'effect'")
                continue
            lam = entry.get("lambda")
            if isinstance(lam, bool) or not isinstance(lam, (int, float)) or not math.isfinite(lam):
                errors.append(f"{path}.lambda: expected a finite number, got {lam!r}")
                continue
            try:
                effect = HermitianMatrix.from_dict(entry.get("effect"), f"{path}.effect")
            except DocumentError as exc:
                errors.extend(exc.errors)
                continue
            if dim is not None and effect.dim != dim:
                errors.append(f"{path}.effect: dimension {effect.dim} does not match dim={dim}")
                continue
            min_eig = effect.min_eigenvalue()
            if min_eig < -EQUALITY_TOL * (1.0 + effect.norm_2()):
                errors.append(
                    f"{path}.effect: not positive semidefinite (min eigenvalue {min_eig:.6g})"
                )
                continue
            parsed.append((float(lam), effect))

        if errors:
            raise DocumentError(errors)
        return cls.from_atoms(parsed, dim=dim)

    def to_dict(self) -> dict[str, Any]:
        return {
            "dim": self.dim,
            "atoms": [
                {"lambda": atom.lam, "effect": atom.effect.to_dict()} for atom in self.atoms
            ],
        }

    def digest(self) -> str:
        return _digest(self.to_dict())

    # -- views -----------------------------------------------------------------

    @property
    def support(self) -> tuple[float, ...]:
        return tuple(atom.lam for atom in self.atoms)

    @property
    def effects(self) -> tuple[HermitianMatrix, ...]:
        return tuple(atom.effect for atom in self.atoms)

    def __len__(self) -> int:
        return len(self.atoms)

    def require_normalized(self) -> None:
        if not self.normalized:
            raise NormalizationError(self.normalization_defect)

    def evaluate(self, intervals: Sequence[tuple[float, float]]) -> HermitianMatrix:
        """``F(Delta)`` for ``Delta`` a finite union of closed intervals."""
        total = HermitianMatrix.zeros(self.dim)
        for atom in self.atoms:
            if any(lo <= atom.lam <= hi for lo, hi in intervals):
                total = total + atom.effect
        return total

    def __repr__(self) -> str:
        return f"FiniteOVM(dim={self.dim}, atoms={len(self.atoms)}, normalized={self.normalized})"


# ---------------------------------------------------------------------------
# Moments
# ---------------------------------------------------------------------------


def moment(f: FiniteOVM, k: int) -> HermitianMatrix:
    """The ``k``-th operator moment ``sum_i lambda_i^k F_i``."""
    f.require_normalized()
    if k < 0:
        raise DomainError(f"moment order must be nonnegative, got {k}", value=float(k))
    if k == 0:
        return HermitianMatrix.identity(f.dim)
    acc = np.zeros((f.dim, f.dim), dtype=np.complex128)
    for atom in f.atoms:
        acc += (atom.lam**k) * atom.effect.data
    return HermitianMatrix(acc)


def moment_real(f: FiniteOVM, r: float) -> HermitianMatrix:
    """Real-exponent moment ``sum_i lambda_i^r F_i`` for support in ``[0, inf)``.

    Uses the convention ``0**0 = 1``.  Exponents above ``MAX_REAL_EXPONENT``
    are rejected because ``lambda**r`` under/overflows in double precision.
    """
    f.require_normalized()
    if r < 0 or not math.isfinite(r):
        raise DomainError(f"exponent must be a finite nonnegative real, got {r}", value=r)
    if r > MAX_REAL_EXPONENT:
        raise DomainError(
            f"exponent {r} exceeds the supported range r <= {MAX_REAL_EXPONENT:g}", value=r
        )
    for atom in f.atoms:
        if atom.lam < 0:
            raise DomainError(
                f"support point {atom.lam:.6g} is negative; real moments need support in [0, inf)",
                value=atom.lam,
            )
    acc = np.zeros((f.dim, f.dim), dtype=np.complex128)
    for atom in f.atoms:
        acc += (atom.lam**r) * atom.effect.data
    return HermitianMatrix(acc)


def variance(f: FiniteOVM) -> HermitianMatrix:
    """Intrinsic noise operator ``moment_2 - moment_1^2``; always PSD."""
    m1 = moment(f, 1)
    return moment(f, 2) - m1.power(2)


def is_spectral(f: FiniteOVM, tol: float = EQUALITY_TOL) -> bool:
    """True iff every effect is an orthogonal projection and distinct effects are orthogonal."""
    f.require_normalized()
    effects = f.effects
    if not all(is_projection(e, tol) for e in effects):
        return False
    for i, ei in enumerate(effects):
        for ej in effects[i + 1 :]:
            cross = float(np.linalg.norm(ei.data @ ej.data))
            if cross > tol * (1.0 + max(ei.norm_fro(), ej.norm_fro())):
                return False
    return True


def hankel(f: FiniteOVM, n: int) -> HermitianMatrix:
    """Block Hankel matrix of moments ``[m_{j+k}]_{j,k=0..n}``."""
    if n < 0:
        raise DomainError(f"Hankel order must be nonnegative, got {n}", value=float(n))
    moments = [moment(f, k) for k in range(2 * n + 1)]
    return block_matrix([[moments[j + k] for k in range(n + 1)] for j in range(n + 1)])


def power_mean_gap(f: FiniteOVM, s: float) -> HermitianMatrix:
    """``(moment_1)^s - moment_s`` for support in ``[0, inf)``.

    Vanishes exactly when ``f`` is spectral (``s > 0``, ``s != 1``); PSD for
    ``s`` in ``(0, 1)`` by operator concavity of ``t^s``.
    """
    if s <= 0 or s == 1:
        raise DomainError(f"exponent must be positive and different from 1, got {s}", value=s)
    m_s = moment_real(f, s)
    m_1 = moment_real(f, 1.0)
    return fractional_power(m_1, s) - m_s


# ---------------------------------------------------------------------------
# Transport
# ---------------------------------------------------------------------------


def pushforward(f: FiniteOVM, omega: Callable[[float], float]) -> FiniteOVM:
    """Image measure ``F o omega^{-1}``; colliding atoms are merged."""
    f.require_normalized()
    images = [(float(omega(atom.lam)), atom.effect) for atom in f.atoms]
    result = FiniteOVM.from_atoms(images, dim=f.dim)
    if len(result) < len(f):
        logger.debug("Pushforward merged %d atom(s) into %d", len(f), len(result))
    return result


def is_injective_on_support(f: FiniteOVM, omega: Callable[[float], float]) -> bool:
    """Finite stand-in for sigma-surjectivity: ``omega`` separates the support points."""
    images = sorted(float(omega(lam)) for lam in f.support)
    if not images:
        return True
    radius = MERGE_RADIUS * (1.0 + max(abs(x) for x in images))
    return all(b - a > radius for a, b in zip(images, images[1:]))


def rescale(f: FiniteOVM, tau: float) -> FiniteOVM:
    """``F_tau(Delta) = F(Delta / tau)``, i.e. the pushforward by ``x -> tau x``."""
    if tau == 0:
        raise DomainError("rescaling factor must be nonzero", value=0.0)
    return pushforward(f, lambda x: tau * x)


def standardize(f: FiniteOVM) -> FiniteOVM:
    """Affine image of ``f`` with its support spread over ``[-1, 1]``.

    ``Var`` is translation invariant and scales quadratically, so
    ``Var(standardize(F)) = Var(F) / h^2`` with ``h`` the half-width of the
    support.  A one-point measure maps to ``0``.
    """
    lo, hi = min(f.support), max(f.support)
    if hi == lo:
        return pushforward(f, lambda x: 0.0)
    mid, half = (hi + lo) / 2.0, (hi - lo) / 2.0
    return pushforward(f, lambda x: (x - mid) / half)


# ---------------------------------------------------------------------------
# Spectral measures and corpora
# ---------------------------------------------------------------------------


def spectral_measure_of(t: HermitianMatrix, tol: float = EQUALITY_TOL) -> FiniteOVM:
    """The spectral measure of ``T``: eigenspace projections at the eigenvalues."""
    dec = eig(t)
    mu = dec.eigenvalues
    u = dec.eigenvectors
    radius = tol * (1.0 + float(np.max(np.abs(mu))))

    groups: list[list[int]] = []
    for i, value in enumerate(mu):
        if groups and abs(value - mu[groups[-1][-1]]) <= radius:
            groups[-1].append(i)
        else:
            groups.append([i])

    atoms: list[tuple[float, HermitianMatrix]] = []
    for idx in groups:
        cols = u[:, idx]
        atoms.append((float(np.mean(mu[idx])), HermitianMatrix(cols @ cols.conj().T)))
    return FiniteOVM.from_atoms(atoms, dim=t.dim)


def _distinct_support(rng: np.random.Generator, count: int, nonnegative: bool) -> list[float]:
    lo, hi = (0.0, 3.0) if nonnegative else (-2.0, 2.0)
    while True:
        points = sorted(float(x) for x in rng.uniform(lo, hi, count))
        if all(b - a > 1e-3 for a, b in zip(points, points[1:])):
            return points


def random_ovm(
    rng: np.random.Generator,
    dim: int,
    n_atoms: int,
    *,
    nonnegative: bool = False,
    low_rank: bool = True,
) -> FiniteOVM:
    """Random semispectral measure via the ``Sum^{-1/2} G_i Sum^{-1/2}`` recipe.

    With ``low_rank`` the ``G_i`` get random ranks in ``1..dim`` so minimal
    dilations of varying size show up in the corpus.
    """
    points = _distinct_support(rng, n_atoms, nonnegative)
    while True:
        grams: list[HermitianMatrix] = []
        for _ in range(n_atoms):
            rank = int(rng.integers(1, dim + 1)) if low_rank else dim
            grams.append(random_psd(rng, dim, rank))
        total = grams[0]
        for g in grams[1:]:
            total = total + g
        if total.min_eigenvalue() > 1e-6:
            break
        logger.debug("Redrawing singular Gram sum (dim=%d, atoms=%d)", dim, n_atoms)

    inv_sqrt = apply_function(total, lambda t: 1.0 / np.sqrt(t), NONNEGATIVE)
    effects = [g.congruence(inv_sqrt.data) for g in grams]
    return FiniteOVM.from_atoms(list(zip(points, effects)), dim=dim)


def random_nonspectral_ovm(
    rng: np.random.Generator,
    dim_max: int,
    max_atoms: int = 5,
    *,
    nonnegative: bool = False,
) -> FiniteOVM:
    """Random measure that fails ``is_spectral`` (redraws until it does)."""
    while True:
        dim = int(rng.integers(1, dim_max + 1))
        n_atoms = int(rng.integers(2, max_atoms + 1))
        f = random_ovm(rng, dim, n_atoms, nonnegative=nonnegative)
        if not is_spectral(f, 1e-8):
            return f


def random_spectral_ovm(rng: np.random.Generator, dim: int, max_atoms: int = 5) -> FiniteOVM:
    """Random spectral measure: a random orthonormal basis split into blocks."""
    n_atoms = int(rng.integers(1, min(dim, max_atoms) + 1))
    basis = random_isometry(rng, dim, dim)
    cuts: list[int] = []
    if n_atoms > 1:
        cuts = sorted(rng.choice(np.arange(1, dim), size=n_atoms - 1, replace=False).tolist())
    bounds = [0, *cuts, dim]
    points = _distinct_support(rng, n_atoms, nonnegative=False)
    atoms = []
    for lam, lo, hi in zip(points, bounds, bounds[1:]):
        cols = basis[:, lo:hi]
        atoms.append((lam, HermitianMatrix(cols @ cols.conj().T)))
    return FiniteOVM.from_atoms(atoms, dim=dim)


def scalar_ovm(
    weights: dict[float, float] | Sequence[tuple[float, float]], dim: int = 1
) -> FiniteOVM:
    """Measure whose effects are scalar multiples of the identity."""
    pairs = list(weights.items()) if isinstance(weights, dict) else list(weights)
    return FiniteOVM.from_atoms(
        [(lam, HermitianMatrix.identity(dim) * w) for lam, w in pairs], dim=dim
    )
