"""ovm - numerics for finitely-supported operator-valued measures on the real line."""

from __future__ import annotations

from ._version import get_version

__version__ = get_version()
