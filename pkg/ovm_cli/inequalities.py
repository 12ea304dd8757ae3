"""Operator inequalities as PSD-gap computations.

Each ``*_gap`` function returns the operator whose positivity is the
inequality, so callers decide what slack counts as "PSD" and whether a gap
is "zero".  The maps are compressions ``Phi(X) = R* X R`` with ``R`` an
isometry onto ``ran(P)``; they are unital on ``ran(P)``.

Only ``f(t) = t**s`` with ``s`` in ``(0, 1)`` is used as the operator
monotone function.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import CONTRACTION_SLACK, EPS_GRID, EQUALITY_TOL, RANK_TOL
from .errors import DimensionError, DomainError
from .hermitian import (
    HermitianMatrix,
    apply_function,
    approx_eq,
    commutator_norm,
    eig,
    fractional_power,
    is_projection,
    is_psd,
    operator_norm,
    pinv_hermitian,
    real_root,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CompressionMap:
    """``X -> P X P`` restricted to ``ran(P)``, written as ``R* X R``."""

    P: HermitianMatrix
    R: np.ndarray

    @classmethod
    def from_projection(cls, p: HermitianMatrix, tol: float = EQUALITY_TOL) -> "CompressionMap":
        if not is_projection(p, tol):
            raise DomainError("compression needs an orthogonal projection (P^2 = P = P*)")
        dec = eig(p)
        keep = dec.eigenvalues > 0.5
        r = np.array(dec.eigenvectors[:, keep])
        if r.shape[1] == 0:
            raise DomainError("compression onto the zero subspace is not unital")
        return cls(P=p, R=r)

    @classmethod
    def from_isometry(cls, v: np.ndarray) -> "CompressionMap":
        r = np.asarray(v, dtype=np.complex128)
        return cls(P=HermitianMatrix(r @ r.conj().T), R=r)

    @property
    def big_dim(self) -> int:
        return int(self.R.shape[0])

    @property
    def rank(self) -> int:
        return int(self.R.shape[1])

    def __call__(self, x: HermitianMatrix) -> HermitianMatrix:
        if x.dim != self.big_dim:
            raise DimensionError(self.big_dim, x.dim)
        return x.congruence(self.R)

    def apply_general(self, x: np.ndarray) -> np.ndarray:
        """Compression of a not necessarily Hermitian operator."""
        return self.R.conj().T @ np.asarray(x) @ self.R


def kadison_gap(c: CompressionMap, a: HermitianMatrix) -> HermitianMatrix:
    """``Phi(A^2) - Phi(A)^2`` (PSD; zero iff ``PA = AP``)."""
    phi_a = c(a)
    return c(a.power(2)) - phi_a.power(2)


def kadison_gap_algebraic(c: CompressionMap, a: HermitianMatrix) -> HermitianMatrix:
    """The same gap written as ``R* (AP)* (I - P) (AP) R``."""
    p = c.P.data
    ap = a.data @ p
    inner = ap.conj().T @ (np.eye(c.big_dim) - p) @ ap
    return HermitianMatrix(inner).congruence(c.R)


def _check_exponent(s: float) -> None:
    if not 0 < s < 1:
        raise DomainError(f"exponent s must lie in (0, 1), got {s}", value=s)


def hansen_gap(a: HermitianMatrix, c: np.ndarray | HermitianMatrix, s: float) -> HermitianMatrix:
    """``f(C* A C) - C* f(A) C`` with ``f(t) = t**s``."""
    _check_exponent(s)
    if not is_psd(a):
        raise DomainError("Hansen's inequality needs a positive semidefinite A")
    cm = c.data if isinstance(c, HermitianMatrix) else np.asarray(c, dtype=np.complex128)
    if cm.shape != (a.dim, a.dim):
        raise DimensionError(a.dim, cm.shape[0], what="contraction")
    norm = operator_norm(cm)
    if norm > 1.0 + CONTRACTION_SLACK:
        raise DomainError(f"C is not a contraction (||C||_2 = {norm:.6g})", value=norm)
    return fractional_power(a.congruence(cm), s) - fractional_power(a, s).congruence(cm)


def hansen_equality_case(
    a: HermitianMatrix, p: HermitianMatrix, s: float, tol: float = 1e-8
) -> tuple[bool, bool]:
    """``(gap_zero, commutes)`` for a nontrivial projection ``P``; the two must agree."""
    _check_exponent(s)
    if not is_projection(p, EQUALITY_TOL):
        raise DomainError("the equality case is stated for orthogonal projections")
    if approx_eq(p, HermitianMatrix.identity(p.dim), EQUALITY_TOL):
        raise DomainError("the equality case requires P != I")
    gap = hansen_gap(a, p, s)
    scale = 1.0 + a.norm_fro()
    gap_zero = gap.norm_fro() <= tol * scale
    commutes = commutator_norm(p, a) <= tol * scale
    return gap_zero, commutes


def lieb_ruskai_series(
    c: CompressionMap,
    a: np.ndarray | HermitianMatrix,
    b: np.ndarray | HermitianMatrix,
    eps_list: Sequence[float] = EPS_GRID,
) -> list[HermitianMatrix]:
    """``G(eps) = Phi(A*A) - Phi(A*B) (Phi(B*B) + eps I)^{-1} Phi(B*A)`` along ``eps_list``."""
    am = a.data if isinstance(a, HermitianMatrix) else np.asarray(a, dtype=np.complex128)
    bm = b.data if isinstance(b, HermitianMatrix) else np.asarray(b, dtype=np.complex128)
    if list(eps_list) != sorted(eps_list, reverse=True) or min(eps_list) <= 0:
        raise DomainError("eps_list must be positive and decreasing")

    phi_aa = HermitianMatrix(c.apply_general(am.conj().T @ am))
    phi_ab = c.apply_general(am.conj().T @ bm)
    phi_bb = HermitianMatrix(c.apply_general(bm.conj().T @ bm))
    eye = np.eye(c.rank)

    series: list[HermitianMatrix] = []
    for eps in eps_list:
        inv = np.linalg.solve(phi_bb.data + eps * eye, phi_ab.conj().T)
        series.append(phi_aa - HermitianMatrix(phi_ab @ inv))
    return series


def lieb_ruskai_gap(
    c: CompressionMap,
    a: np.ndarray | HermitianMatrix,
    b: np.ndarray | HermitianMatrix,
    eps_list: Sequence[float] = EPS_GRID,
) -> HermitianMatrix:
    """The Lieb-Ruskai gap at the smallest ``eps`` of the net."""
    return lieb_ruskai_series(c, a, b, eps_list)[-1]


def lieb_ruskai_pinv(
    c: CompressionMap,
    a: np.ndarray | HermitianMatrix,
    b: np.ndarray | HermitianMatrix,
    threshold: float = RANK_TOL,
) -> HermitianMatrix:
    """Limit of the net computed with a pseudoinverse (oracle for the eps evaluation)."""
    am = a.data if isinstance(a, HermitianMatrix) else np.asarray(a, dtype=np.complex128)
    bm = b.data if isinstance(b, HermitianMatrix) else np.asarray(b, dtype=np.complex128)
    phi_aa = HermitianMatrix(c.apply_general(am.conj().T @ am))
    phi_ab = c.apply_general(am.conj().T @ bm)
    phi_bb = HermitianMatrix(c.apply_general(bm.conj().T @ bm))
    pinv = pinv_hermitian(phi_bb, threshold)
    return phi_aa - HermitianMatrix(phi_ab @ pinv.data @ phi_ab.conj().T)


def lieb_ruskai_monotone(
    series: Sequence[HermitianMatrix], vectors: np.ndarray, slack: float = 1e-9
) -> bool:
    """``<G(eps) h, h>`` is non-increasing as ``eps`` decreases, for each column ``h``."""
    values = np.array(
        [[float(np.real(np.vdot(h, g.data @ h))) for h in vectors.T] for g in series]
    )
    steps = np.diff(values, axis=0)
    return bool(np.all(steps <= slack * (1.0 + np.abs(values[:-1]))))


@dataclass(frozen=True, eq=False)
class ProofChain:
    """Operators of the Hansen sandwich ``(P S^{2q'} P)^{r/q'} >= P S^{2r} P >= T^{2r}``."""

    case: int
    upper: HermitianMatrix
    middle: HermitianMatrix
    lower: HermitianMatrix
    hansen_equality: bool
    collapsed: bool

    @property
    def upper_gap(self) -> HermitianMatrix:
        return self.upper - self.middle

    @property
    def lower_gap(self) -> HermitianMatrix:
        return self.middle - self.lower


def proof_chain(
    s: HermitianMatrix, v: np.ndarray, p: int, q: int, tol: float = 1e-8
) -> ProofChain:
    """Replay the operator chain of the two-moment argument on matrices.

    ``v`` embeds ``H`` into ``K``; ``T`` is recovered from ``P S^p|_H`` with
    the real ``p``-th root (principal root for even ``p``).  With
    ``q' = q/2``: for ``p > q'`` (``r = p - q'``) the chain is
    ``(P S^q|_H)^{r/q'} >= P S^{2r}|_H >= T^{2r}``, the outer equality
    holding when ``T^q = P S^q|_H``; for ``p <= q'`` it is
    ``(P S^q|_H)^{p/q'} >= P S^{2p}|_H >= (P S^p|_H)^2``.
    """
    if not (1 <= p < q and q % 2 == 0):
        raise DomainError(f"the chain is defined for p < q with q even; got ({p}, {q})")
    c = CompressionMap.from_isometry(v)
    q_half = q // 2
    compressed_q = c(s.power(q))
    root, domain = real_root(p)
    t = apply_function(c(s.power(p)), root, domain)

    if 2 * p > q:
        case, r = 2, p - q_half
        upper = fractional_power(compressed_q, r / q_half)
        middle = c(s.power(2 * r))
        lower = t.power(2 * r)
        hansen_exponent = r / q_half
    else:
        case = 1
        upper = fractional_power(compressed_q, p / q_half)
        middle = c(s.power(2 * p))
        lower = c(s.power(p)).power(2)
        hansen_exponent = p / q_half

    scale = 1.0 + upper.norm_fro()
    # Hansen for f(t) = t^e and C = P on A = S^q: f(P A P) >= P f(A) P
    hansen_residual = upper - c(fractional_power(s.power(q), hansen_exponent))
    hansen_equality = hansen_residual.norm_fro() <= tol * scale
    collapsed = (
        (upper - middle).norm_fro() <= tol * scale
        and (middle - lower).norm_fro() <= tol * scale
    )
    logger.debug("proof chain case %d for (p, q)=(%d, %d): collapsed=%s", case, p, q, collapsed)
    return ProofChain(
        case=case,
        upper=upper,
        middle=middle,
        lower=lower,
        hansen_equality=bool(hansen_equality),
        collapsed=bool(collapsed),
    )
