"""CLI commands for ovm."""

from __future__ import annotations

from .check import check
from .counterexample import counterexample
from .dilate import dilate
from .fibonacci import fibonacci
from .verify import verify

__all__ = [
    "check",
    "counterexample",
    "dilate",
    "fibonacci",
    "verify",
]
