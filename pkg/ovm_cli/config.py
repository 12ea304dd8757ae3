"""Configuration and tolerance defaults for the ovm toolkit."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass

logger = logging.getLogger(__name__)

# Default relative Frobenius tolerance for "equality" of matrices.
EQUALITY_TOL = 1e-10
# Moment-match tolerance used by the certifiers.
CERTIFY_TOL = 1e-9
# Eigenvalues below ``RANK_TOL * (1 + ||effect||_2)`` do not count towards rank.
RANK_TOL = 1e-10
# Support points closer than ``MERGE_RADIUS * (1 + max|lambda|)`` are one atom.
MERGE_RADIUS = 1e-12
# Effects with Frobenius norm below this are dropped.
EFFECT_DROP = 1e-14
# Eigenvalues may sit this far outside a function domain before being clamped.
DOMAIN_SLACK = 1e-10
# ``||C||_2 <= 1 + CONTRACTION_SLACK`` counts as a contraction.
CONTRACTION_SLACK = 1e-12
# Non-integer powers treat eigenvalues below ``SPECTRUM_FLOOR * (1 + ||A||_2)`` as zero.
SPECTRUM_FLOOR = 1e-13
# ``||Var||_F`` of the standardized measure (support on [-1, 1]) below this is zero noise.
ZERO_VARIANCE = 1e-8

BISECTION_XTOL = 1e-14
BISECTION_MAXITER = 200

# Largest exponent accepted by the real-exponent moment.
MAX_REAL_EXPONENT = 64.0

# epsilon grid for the Lieb-Ruskai net, 1e-2 .. 1e-12.
EPS_GRID: tuple[float, ...] = tuple(10.0 ** (-k) for k in range(2, 13))

DEFAULT_TRIALS = 500
DEFAULT_SEED = 42
DEFAULT_DIM_MAX = 4


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        return float(raw)
    except ValueError:
        logger.warning("Ignoring %s=%r: not a number", name, raw)
        return default


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning("Ignoring %s=%r: not an integer", name, raw)
        return default


@dataclass(frozen=True)
class Settings:
    """Per-invocation settings resolved from CLI flags and the environment."""

    tol: float = CERTIFY_TOL
    json_output: bool = False
    log_level: str = "WARNING"
    workers: int = 1


def resolve_settings(
    tol: float | None = None,
    json_output: bool = False,
    verbosity: int = 0,
) -> Settings:
    """Resolve settings for one CLI invocation.

    Priority for each field:
      1. explicit CLI flag
      2. ``OVM_TOL`` / ``OVM_LOG_LEVEL`` / ``OVM_WORKERS`` environment variables
      3. module defaults
    """
    resolved_tol = tol if tol is not None else _env_float("OVM_TOL", CERTIFY_TOL)

    if verbosity >= 2:
        level = "DEBUG"
    elif verbosity == 1:
        level = "INFO"
    else:
        level = os.getenv("OVM_LOG_LEVEL", "WARNING").strip().upper() or "WARNING"

    workers = max(1, _env_int("OVM_WORKERS", 1))
    return Settings(tol=resolved_tol, json_output=json_output, log_level=level, workers=workers)
