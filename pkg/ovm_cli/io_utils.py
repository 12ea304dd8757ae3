"""Low-level I/O helpers shared across the ovm package."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path
from typing import Any

from .errors import DocumentError


def canonical_json(data: Any) -> str:
    """Serialize *data* deterministically (sorted keys, fixed separators)."""
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def digest(data: Any) -> str:
    """SHA-256 hex digest of the canonical JSON form of *data*."""
    return hashlib.sha256(canonical_json(data).encode("utf-8")).hexdigest()


def atomic_write_json(path: Path, data: Any, *, mode: int = 0o644) -> None:
    """Atomically write *data* as JSON to *path*.

    Uses a sibling temp file + ``os.replace`` so readers never see a
    half-written file.  On POSIX the file is ``chmod``-ed to *mode* before
    the rename.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(
        dir=str(path.parent), prefix=f".{path.name}.", suffix=".tmp"
    )
    try:
        with os.fdopen(fd, "w") as f:
            json.dump(data, f, indent=2)
            f.write("\n")
            f.flush()
            os.fsync(f.fileno())
        if os.name != "nt":
            os.chmod(tmp, mode)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def read_json(path: Path) -> Any:
    """Load a JSON document, turning syntax errors into a ``DocumentError``."""
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DocumentError([f"{path}: cannot read file ({exc.strerror or exc})"]) from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(
            [f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"]
        ) from exc
