"""Minimal Naimark dilations of finite semispectral measures.

The enlarged space ``K`` is the ordered direct sum of the ranges of the
effects: for each atom the effect is eigendecomposed, eigenpairs above the
rank threshold are kept and ``h -> sqrt(F_i) h`` (written in that eigenbasis)
becomes one block row of the isometry ``V``.  ``H`` is identified with
``ran(V)`` and ``P = V V*`` is materialized so every compression identity
is plain matrix algebra.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any

import numpy as np

from .config import EQUALITY_TOL, RANK_TOL
from .errors import DimensionError, DocumentError
from .hermitian import HermitianMatrix, eig
from .povm import FiniteOVM, spectral_measure_of

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DilationBlock:
    lam: float
    projection: HermitianMatrix


@dataclass(frozen=True, eq=False)
class NaimarkDilation:
    """Isometry ``V: H -> K`` and a spectral measure on ``K`` compressing to ``F``."""

    small_dim: int
    big_dim: int
    embedding: np.ndarray
    blocks: tuple[DilationBlock, ...]

    @property
    def S(self) -> HermitianMatrix:  # noqa: N802
        acc = np.zeros((self.big_dim, self.big_dim), dtype=np.complex128)
        for block in self.blocks:
            acc += block.lam * block.projection.data
        return HermitianMatrix(acc)

    @property
    def P(self) -> HermitianMatrix:  # noqa: N802
        v = self.embedding
        return HermitianMatrix(v @ v.conj().T)

    def to_dict(self) -> dict[str, Any]:
        v = self.embedding
        return {
            "small_dim": self.small_dim,
            "big_dim": self.big_dim,
            "embedding": {"re": v.real.tolist(), "im": v.imag.tolist()},
            "blocks": [
                {"lambda": b.lam, "projection": b.projection.to_dict()} for b in self.blocks
            ],
        }

    @classmethod
    def from_dict(cls, payload: Any) -> "NaimarkDilation":
        errors: list[str] = []
        if not isinstance(payload, dict):
            raise DocumentError(["root: expected a dilation object"])
        small = payload.get("small_dim")
        big = payload.get("big_dim")
        for name, value in (("small_dim", small), ("big_dim", big)):
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                errors.append(f"{name}: expected a positive integer, got {value!r}")

        emb = payload.get("embedding")
        embedding: np.ndarray | None = None
        try:
            re_part = np.asarray(emb["re"], dtype=np.float64)
            im_part = np.asarray(emb.get("im", np.zeros_like(re_part)), dtype=np.float64)
            embedding = re_part + 1j * im_part
            if isinstance(small, int) and isinstance(big, int) and embedding.shape != (big, small):
                errors.append(
                    f"embedding: expected shape ({big}, {small}), got {embedding.shape}"
                )
        except (TypeError, KeyError, ValueError, AttributeError):
            errors.append("embedding: expected {'re': [[..]], 'im': [[..]]}")

        blocks: list[DilationBlock] = []
        raw_blocks = payload.get("blocks")
        if not isinstance(raw_blocks, list) or not raw_blocks:
            errors.append("blocks: expected a non-empty list")
            raw_blocks = []
        for i, entry in enumerate(raw_blocks):
            try:
                lam = float(entry["lambda"])
                proj = HermitianMatrix.from_dict(entry.get("projection"), f"blocks[{i}].projection")
            except DocumentError as exc:
                errors.extend(exc.errors)
                continue
            except (TypeError, KeyError, ValueError):
                errors.append(f"blocks[{i}]: expected {{'lambda': x, 'projection': {{..}}}}")
                continue
            blocks.append(DilationBlock(lam=lam, projection=proj))

        if errors:
            raise DocumentError(errors)
        assert embedding is not None
        return cls(small_dim=small, big_dim=big, embedding=embedding, blocks=tuple(blocks))

    def __repr__(self) -> str:
        return (
            f"NaimarkDilation(small_dim={self.small_dim}, big_dim={self.big_dim}, "
            f"blocks={len(self.blocks)})"
        )


def effect_rank(effect: HermitianMatrix) -> int:
    values = eig(effect).eigenvalues
    cut = RANK_TOL * (1.0 + float(np.max(np.abs(values))))
    return int(np.sum(values > cut))


def dilate_minimal(f: FiniteOVM) -> NaimarkDilation:
    """Minimal Naimark dilation with ``big_dim = sum_i rank(F_i)``."""
    f.require_normalized()
    rows: list[np.ndarray] = []
    ranks: list[int] = []
    for atom in f.atoms:
        dec = eig(atom.effect)
        values = dec.eigenvalues
        cut = RANK_TOL * (1.0 + float(np.max(np.abs(values))))
        keep = values > cut
        vecs = dec.eigenvectors[:, keep]
        # rows of sqrt(F_i) expressed in the eigenbasis of ran(F_i)
        rows.append(np.sqrt(values[keep])[:, None] * vecs.conj().T)
        ranks.append(int(np.sum(keep)))

    big_dim = sum(ranks)
    embedding = np.vstack(rows)
    embedding.setflags(write=False)

    blocks: list[DilationBlock] = []
    offset = 0
    for atom, rank in zip(f.atoms, ranks):
        diag = np.zeros(big_dim)
        diag[offset : offset + rank] = 1.0
        blocks.append(DilationBlock(lam=atom.lam, projection=HermitianMatrix(np.diag(diag))))
        offset += rank

    logger.debug("Dilated dim=%d measure into K of dim %d (ranks %s)", f.dim, big_dim, ranks)
    return NaimarkDilation(
        small_dim=f.dim, big_dim=big_dim, embedding=embedding, blocks=tuple(blocks)
    )


def dilation_from_operator(s: HermitianMatrix, embedding: np.ndarray) -> NaimarkDilation:
    """Dilation data for a given selfadjoint ``S`` on ``K`` and isometry ``V: H -> K``.

    The spectral measure of ``S`` supplies the blocks.  The result need not
    be minimal.
    """
    v = np.asarray(embedding, dtype=np.complex128)
    if v.shape[0] != s.dim:
        raise DimensionError(s.dim, v.shape[0], what="embedding rows")
    spectral = spectral_measure_of(s)
    blocks = tuple(DilationBlock(lam=a.lam, projection=a.effect) for a in spectral.atoms)
    return NaimarkDilation(small_dim=v.shape[1], big_dim=s.dim, embedding=v, blocks=blocks)


def compress(d: NaimarkDilation) -> FiniteOVM:
    """The semispectral measure ``V* E(.) V``."""
    return FiniteOVM.from_atoms(
        [(b.lam, b.projection.congruence(d.embedding)) for b in d.blocks],
        dim=d.small_dim,
    )


def moment_via_dilation(d: NaimarkDilation, k: int) -> HermitianMatrix:
    """``V* S^k V``, the compression of the ``k``-th power of the dilated operator."""
    return d.S.power(k).congruence(d.embedding)


def commutator_defects(d: NaimarkDilation) -> list[float]:
    """``||P E_i - E_i P||_F`` for every block."""
    p = d.P.data
    return [
        float(np.linalg.norm(p @ b.projection.data - b.projection.data @ p)) for b in d.blocks
    ]


def p_commutes(d: NaimarkDilation, tol: float = EQUALITY_TOL) -> bool:
    return max(commutator_defects(d), default=0.0) <= tol * (1.0 + d.big_dim)


def kadison_identity_defect(d: NaimarkDilation, x: HermitianMatrix) -> float:
    """Residual of ``P X^2 P - (P X P)^2 = (X P)* (I - P) (X P)``."""
    if x.dim != d.big_dim:
        raise DimensionError(d.big_dim, x.dim)
    p = d.P.data
    xd = x.data
    lhs = p @ xd @ xd @ p - (p @ xd @ p) @ (p @ xd @ p)
    xp = xd @ p
    rhs = xp.conj().T @ (np.eye(d.big_dim) - p) @ xp
    return float(np.linalg.norm(lhs - rhs))


def invariant_defects(d: NaimarkDilation) -> dict[str, float]:
    """Frobenius defects of the structural invariants of a dilation.

    Keys: ``isometry`` (``V*V - I``), ``idempotent`` and ``orthogonal``
    (worst block), ``resolution`` (``sum E_i - I``).
    """
    v = d.embedding
    isometry = float(np.linalg.norm(v.conj().T @ v - np.eye(d.small_dim)))
    idempotent = max(
        float(np.linalg.norm(b.projection.data @ b.projection.data - b.projection.data))
        for b in d.blocks
    )
    orthogonal = 0.0
    total = np.zeros((d.big_dim, d.big_dim), dtype=np.complex128)
    for i, bi in enumerate(d.blocks):
        total += bi.projection.data
        for bj in d.blocks[i + 1 :]:
            orthogonal = max(
                orthogonal, float(np.linalg.norm(bi.projection.data @ bj.projection.data))
            )
    resolution = float(np.linalg.norm(total - np.eye(d.big_dim)))
    return {
        "isometry": isometry,
        "idempotent": idempotent,
        "orthogonal": orthogonal,
        "resolution": resolution,
    }
