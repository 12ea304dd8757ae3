"""
Exception hierarchy for the ovm toolkit.

Every failure a library operation can report derives from ``OVMError`` so the
CLI can map the whole family onto its ``input_error`` exit status with a
single ``except`` clause.
"""

from __future__ import annotations


class OVMError(Exception):
    """Base class for all ovm failures."""


class DimensionError(OVMError, ValueError):
    """Raised when two operands do not live on the same space."""

    def __init__(self, expected: int, got: int, what: str = "matrix"):
        self.expected = expected
        self.got = got
        super().__init__(f"{what} dimension mismatch: expected {expected}, got {got}")


class DomainError(OVMError, ValueError):
    """Raised when a value falls outside the domain of a function or operation."""

    def __init__(self, message: str, value: float | None = None):
        self.value = value
        super().__init__(message)


class NormalizationError(OVMError, ValueError):
    """Raised when effects do not sum to the identity."""

    def __init__(self, defect: float):
        self.defect = defect
        super().__init__(
            f"effects do not sum to the identity: normalization defect {defect:.6g}"
        )


class ConvergenceError(OVMError, RuntimeError):
    """Raised when an iterative numerical routine fails to converge."""


class RefusalError(OVMError, ValueError):
    """Raised when a request contradicts a proven theorem and is refused."""


class DocumentError(OVMError, ValueError):
    """Raised when a JSON document fails validation."""

    def __init__(self, errors: list[str], suggestions: list[str] | None = None):
        self.errors = errors
        self.suggestions = suggestions or []
        super().__init__(self._format_message())

    def _format_message(self) -> str:
        msg = "Document validation failed:\n"
        for error in self.errors:
            msg += f"  • {error}\n"
        if self.suggestions:
            msg += "\nSuggested fixes:\n"
            for suggestion in self.suggestions:
                msg += f"  • {suggestion}\n"
        return msg
