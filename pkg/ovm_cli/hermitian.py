"""Dense complex Hermitian matrices: arithmetic, spectra and functional calculus.

``HermitianMatrix`` is the value type for effects, moments and dilated
operators throughout the package.  Instances are immutable: the backing
array is symmetrized at construction as ``(A + A*) / 2`` and then frozen.

All tolerance-based predicates (``is_psd``, ``is_projection``,
``approx_eq``) use *relative* thresholds so they behave the same for
matrices of very different scale.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np
import scipy.linalg

from .config import DOMAIN_SLACK, EQUALITY_TOL, SPECTRUM_FLOOR
from .errors import ConvergenceError, DimensionError, DocumentError, DomainError

logger = logging.getLogger(__name__)

ScalarFunction = Callable[[np.ndarray], np.ndarray]
Interval = tuple[float, float]

REALS: Interval = (-math.inf, math.inf)
NONNEGATIVE: Interval = (0.0, math.inf)


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    """A complex square matrix with Hermitian symmetry."""

    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.data, dtype=np.complex128, copy=True)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise DimensionError(
                expected=arr.shape[0] if arr.ndim >= 1 else 1,
                got=arr.shape[1] if arr.ndim == 2 else -1,
                what="square matrix",
            )
        arr = (arr + arr.conj().T) / 2
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    # -- constructors --------------------------------------------------------

    @classmethod
    def identity(cls, dim: int) -> "HermitianMatrix":
        return cls(np.eye(dim))

    @classmethod
    def zeros(cls, dim: int) -> "HermitianMatrix":
        return cls(np.zeros((dim, dim)))

    @classmethod
    def diag(cls, values: Sequence[float]) -> "HermitianMatrix":
        return cls(np.diag(np.asarray(values, dtype=np.float64)))

    @classmethod
    def scalar(cls, value: float) -> "HermitianMatrix":
        return cls(np.array([[value]]))

    @classmethod
    def from_dict(cls, payload: Any, path: str = "matrix") -> "HermitianMatrix":
        """Parse the ``{"re": [[..]], "im": [[..]]}`` matrix fragment.

        All structural problems are collected and raised together as one
        ``DocumentError``.  ``im`` may be omitted for real matrices.
        """
        errors: list[str] = []
        if not isinstance(payload, dict):
            raise DocumentError([f"{path}: expected an object with 're' and 'im' keys"])

        re_part = _parse_grid(payload.get("re"), f"{path}.re", errors, required=True)
        im_part = _parse_grid(payload.get("im"), f"{path}.im", errors, required=False)

        if re_part is not None and re_part.shape[0] != re_part.shape[1]:
            errors.append(f"{path}.re: matrix must be square, got {re_part.shape}")
        if re_part is not None and im_part is not None and re_part.shape != im_part.shape:
            errors.append(
                f"{path}.im: shape {im_part.shape} does not match {path}.re shape {re_part.shape}"
            )
        if errors:
            raise DocumentError(errors)

        assert re_part is not None
        arr = re_part + 1j * (im_part if im_part is not None else 0.0)
        asym = float(np.linalg.norm(arr - arr.conj().T))
        if asym > 1e-8 * (1.0 + float(np.linalg.norm(arr))):
            logger.warning("%s is not Hermitian (defect %.3g); symmetrizing", path, asym)
        return cls(arr)

    def to_dict(self) -> dict[str, list[list[float]]]:
        return {
            "re": self.data.real.tolist(),
            "im": self.data.imag.tolist(),
        }

    # -- basic properties ----------------------------------------------------

    @property
    def dim(self) -> int:
        return int(self.data.shape[0])

    def norm_fro(self) -> float:
        return float(np.linalg.norm(self.data))

    def norm_2(self) -> float:
        return float(np.max(np.abs(self.eigenvalues()))) if self.dim else 0.0

    def eigenvalues(self) -> np.ndarray:
        return eig(self).eigenvalues

    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues()[0])

    def trace(self) -> float:
        return float(np.trace(self.data).real)

    def entry(self, row: int, col: int) -> complex:
        return complex(self.data[row, col])

    # -- arithmetic ------------------------------------------------------------

    def _check_dim(self, other: "HermitianMatrix") -> None:
        if other.dim != self.dim:
            raise DimensionError(self.dim, other.dim)

    def __add__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        self._check_dim(other)
        return HermitianMatrix(self.data + other.data)

    def __sub__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        self._check_dim(other)
        return HermitianMatrix(self.data - other.data)

    def __neg__(self) -> "HermitianMatrix":
        return HermitianMatrix(-self.data)

    def __mul__(self, factor: float) -> "HermitianMatrix":
        if isinstance(factor, complex) and factor.imag != 0:
            raise DomainError("Hermitian matrices only scale by real factors", value=None)
        return HermitianMatrix(self.data * float(np.real(factor)))

    __rmul__ = __mul__

    def __matmul__(self, other: "HermitianMatrix | np.ndarray") -> np.ndarray:
        """Plain matrix product; the result is generally not Hermitian."""
        rhs = other.data if isinstance(other, HermitianMatrix) else np.asarray(other)
        return self.data @ rhs

    def power(self, k: int) -> "HermitianMatrix":
        """Integer power ``A**k`` with ``A**0 = I``."""
        if k < 0:
            raise DomainError(f"negative integer power {k} is not supported", value=float(k))
        return HermitianMatrix(np.linalg.matrix_power(self.data, k))

    def congruence(self, r: np.ndarray) -> "HermitianMatrix":
        """Return ``R* A R`` for a (possibly rectangular) matrix ``R``."""
        r = np.asarray(r, dtype=np.complex128)
        if r.shape[0] != self.dim:
            raise DimensionError(self.dim, r.shape[0], what="congruence factor")
        return HermitianMatrix(r.conj().T @ self.data @ r)

    def __repr__(self) -> str:
        return f"HermitianMatrix(dim={self.dim})"


def _parse_grid(
    raw: Any, path: str, errors: list[str], *, required: bool
) -> np.ndarray | None:
    if raw is None:
        if required:
            errors.append(f"{path}: missing")
        return None
    if not isinstance(raw, list) or not raw or not all(isinstance(row, list) for row in raw):
        errors.append(f"{path}: expected a non-empty list of rows")
        return None
    width = len(raw[0])
    for i, row in enumerate(raw):
        if len(row) != width:
            errors.append(f"{path}[{i}]: row has {len(row)} entries, expected {width}")
            return None
        for j, value in enumerate(row):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                errors.append(f"{path}[{i}][{j}]: expected a number, got {value!r}")
                return None
            if not math.isfinite(value):
                errors.append(f"{path}[{i}][{j}]: value must be finite")
                return None
    return np.asarray(raw, dtype=np.float64)


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Ascending eigenvalues with the matching unitary of column eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> HermitianMatrix:
        u = self.eigenvectors
        return HermitianMatrix(u @ np.diag(self.eigenvalues) @ u.conj().T)


def eig(a: HermitianMatrix) -> SpectralDecomposition:
    """Eigendecomposition with ascending eigenvalues and phase-fixed eigenvectors.

    Each eigenvector column is rotated so its largest-modulus component is
    real and positive, which makes the output deterministic.
    """
    try:
        values, vectors = scipy.linalg.eigh(a.data, check_finite=True)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError, ValueError) as exc:
        raise ConvergenceError(
            f"Hermitian eigensolver failed for dim={a.dim}, "
            f"||A||_F={float(np.linalg.norm(a.data)):.6g}: {exc}"
        ) from exc

    vectors = np.array(vectors, dtype=np.complex128)
    for col in range(vectors.shape[1]):
        pivot = int(np.argmax(np.abs(vectors[:, col])))
        component = vectors[pivot, col]
        if abs(component) > 0:
            vectors[:, col] *= np.conj(component) / abs(component)

    values = np.asarray(values, dtype=np.float64)
    values.setflags(write=False)
    vectors.setflags(write=False)
    return SpectralDecomposition(eigenvalues=values, eigenvectors=vectors)


def apply_function(
    a: HermitianMatrix,
    f: ScalarFunction,
    domain: Interval = REALS,
    *,
    slack: float = DOMAIN_SLACK,
) -> HermitianMatrix:
    """Functional calculus ``f(A) = U diag(f(mu_i)) U*``.

    ``f`` receives the (clamped) eigenvalues as a 1-D float array.
    Eigenvalues within ``slack * (1 + max|mu|)`` outside ``domain`` are
    clamped onto the boundary; anything further out raises ``DomainError``.
    """
    lo, hi = domain
    dec = eig(a)
    mu = np.array(dec.eigenvalues, dtype=np.float64)
    radius = slack * (1.0 + float(np.max(np.abs(mu)))) if mu.size else slack

    below = mu < lo - radius
    above = mu > hi + radius
    if np.any(below) or np.any(above):
        bad = float(mu[below][0] if np.any(below) else mu[above][0])
        raise DomainError(
            f"eigenvalue {bad:.6g} lies outside the function domain [{lo}, {hi}]",
            value=bad,
        )
    clamped = np.clip(mu, lo, hi)
    if np.any(clamped != mu):
        count = int(np.sum(clamped != mu))
        logger.warning("Clamped %d eigenvalue(s) onto [%s, %s]", count, lo, hi)

    fvals = np.asarray(f(clamped), dtype=np.float64)
    u = dec.eigenvectors
    return HermitianMatrix(u @ np.diag(fvals) @ u.conj().T)


def real_root(p: int) -> tuple[ScalarFunction, Interval]:
    """Pointwise real ``p``-th root and its domain.

    For odd ``p`` this is ``sign(t) |t|^(1/p)`` on the whole line; for even
    ``p`` it is the principal root on ``[0, inf)``.
    """
    if p < 1:
        raise DomainError(f"root order must be a positive integer, got {p}", value=float(p))
    if p % 2 == 1:
        return (lambda t: np.sign(t) * np.abs(t) ** (1.0 / p)), REALS
    return (lambda t: np.abs(t) ** (1.0 / p)), NONNEGATIVE


def fractional_power(a: HermitianMatrix, s: float) -> HermitianMatrix:
    """``A**s`` for PSD ``A`` and real ``s >= 0`` (``0**0 = 1``).

    Eigenvalues at rounding level count as zero.
    """
    if s < 0:
        raise DomainError(f"negative exponent {s} needs an invertible A", value=s)
    if s == 0:
        return HermitianMatrix.identity(a.dim)

    def power(t: np.ndarray) -> np.ndarray:
        cut = SPECTRUM_FLOOR * (1.0 + float(np.max(np.abs(t))))
        return np.where(t > cut, t, 0.0) ** s

    return apply_function(a, power, NONNEGATIVE)


def is_psd(a: HermitianMatrix, tol: float = EQUALITY_TOL) -> bool:
    if tol < 0:
        raise DomainError("tolerance must be nonnegative", value=tol)
    values = a.eigenvalues()
    scale = 1.0 + float(np.max(np.abs(values)))
    return bool(values[0] >= -tol * scale)


def is_projection(a: HermitianMatrix, tol: float = EQUALITY_TOL) -> bool:
    if tol < 0:
        raise DomainError("tolerance must be nonnegative", value=tol)
    defect = float(np.linalg.norm(a.data @ a.data - a.data))
    return defect <= tol * (1.0 + a.norm_fro())


def approx_eq(a: HermitianMatrix, b: HermitianMatrix, tol: float = EQUALITY_TOL) -> bool:
    if a.dim != b.dim:
        raise DimensionError(a.dim, b.dim)
    diff = float(np.linalg.norm(a.data - b.data))
    return diff <= tol * (1.0 + max(a.norm_fro(), b.norm_fro()))


def relative_residual(a: HermitianMatrix, b: HermitianMatrix) -> float:
    """``||A - B||_F / (1 + max(||A||_F, ||B||_F))``."""
    if a.dim != b.dim:
        raise DimensionError(a.dim, b.dim)
    diff = float(np.linalg.norm(a.data - b.data))
    return diff / (1.0 + max(a.norm_fro(), b.norm_fro()))


def commutator_norm(a: HermitianMatrix | np.ndarray, b: HermitianMatrix | np.ndarray) -> float:
    """Frobenius norm of ``AB - BA``."""
    x = a.data if isinstance(a, HermitianMatrix) else np.asarray(a)
    y = b.data if isinstance(b, HermitianMatrix) else np.asarray(b)
    return float(np.linalg.norm(x @ y - y @ x))


def pinv_hermitian(a: HermitianMatrix, threshold: float = 1e-10) -> HermitianMatrix:
    """Moore-Penrose inverse with eigenvalues below ``threshold * (1 + ||A||_2)`` zeroed."""
    dec = eig(a)
    mu = dec.eigenvalues
    cut = threshold * (1.0 + float(np.max(np.abs(mu))))
    inv = np.where(np.abs(mu) > cut, 1.0 / np.where(mu == 0, 1.0, mu), 0.0)
    u = dec.eigenvectors
    return HermitianMatrix(u @ np.diag(inv) @ u.conj().T)


def block_matrix(blocks: Sequence[Sequence[HermitianMatrix | np.ndarray]]) -> HermitianMatrix:
    """Assemble a Hermitian block matrix from a square grid of blocks."""
    grid = [
        [b.data if isinstance(b, HermitianMatrix) else np.asarray(b) for b in row]
        for row in blocks
    ]
    return HermitianMatrix(np.block(grid))


# ---------------------------------------------------------------------------
# Seeded corpus generators
# ---------------------------------------------------------------------------


def random_hermitian(rng: np.random.Generator, dim: int) -> HermitianMatrix:
    """Hermitian matrix with real and imaginary entries uniform in [-1, 1]."""
    x = rng.uniform(-1.0, 1.0, (dim, dim)) + 1j * rng.uniform(-1.0, 1.0, (dim, dim))
    return HermitianMatrix(x)


def random_psd(rng: np.random.Generator, dim: int, rank: int | None = None) -> HermitianMatrix:
    """PSD matrix ``X X*`` with ``X`` a complex Gaussian ``dim x rank`` block."""
    r = dim if rank is None else rank
    x = rng.standard_normal((dim, r)) + 1j * rng.standard_normal((dim, r))
    return HermitianMatrix(x @ x.conj().T / max(r, 1))


def random_isometry(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    """``rows x cols`` matrix with orthonormal columns (QR of a Gaussian block)."""
    x = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    q, r = np.linalg.qr(x)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases.conj()


def random_projection(rng: np.random.Generator, dim: int, rank: int) -> HermitianMatrix:
    """Orthogonal projection of the given rank onto a random subspace."""
    if not 0 <= rank <= dim:
        raise DomainError(f"projection rank {rank} outside [0, {dim}]", value=float(rank))
    if rank == 0:
        return HermitianMatrix.zeros(dim)
    v = random_isometry(rng, dim, rank)
    return HermitianMatrix(v @ v.conj().T)


def random_contraction(rng: np.random.Generator, dim: int) -> np.ndarray:
    """General complex matrix with operator norm in (0, 1]."""
    x = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    norm = float(np.linalg.norm(x, 2))
    return x / norm * rng.uniform(0.2, 1.0)


def operator_norm(x: HermitianMatrix | np.ndarray) -> float:
    arr = x.data if isinstance(x, HermitianMatrix) else np.asarray(x)
    return float(np.linalg.norm(arr, 2))
