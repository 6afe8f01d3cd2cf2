"""Base exception for the pt_double_well package.

Every error carries a machine-readable code and a free-form ``details``
mapping that ends up in the CLI diagnostics file.
"""

from __future__ import annotations

from enum import Enum
from typing import Any


class ErrorCode(Enum):
    """Error codes shared by all numerical failures."""

    INVALID_PARAMETER = "INVALID_PARAMETER"
    DEGENERATE_TURNING_POINTS = "DEGENERATE_TURNING_POINTS"
    WKB_TOO_CLOSE = "WKB_TOO_CLOSE"
    WKB_NOT_DECAYING = "WKB_NOT_DECAYING"
    PROPAGATION_FAILED = "PROPAGATION_FAILED"
    NOT_CONVERGED = "NOT_CONVERGED"
    BASIN_ESCAPE = "BASIN_ESCAPE"
    NON_SIMPLE_LEVEL = "NON_SIMPLE_LEVEL"
    NON_INTEGER_WINDING = "NON_INTEGER_WINDING"
    ZERO_COUNT = "ZERO_COUNT"
    SYMMETRY_VIOLATION = "SYMMETRY_VIOLATION"
    TRACE_TRUNCATED = "TRACE_TRUNCATED"
    BRACKET_FAILED = "BRACKET_FAILED"
    CONFIG = "CONFIG"
    OUTPUT = "OUTPUT"


class PtdwError(Exception):
    """Base exception for numerical and configuration failures."""

    code: ErrorCode = ErrorCode.NOT_CONVERGED

    def __init__(
        self,
        message: str,
        error_code: ErrorCode | None = None,
        details: dict[str, Any] | None = None,
    ) -> None:
        """Initialize the error.

        Args:
            message: Error description
            error_code: Specific error code, defaults to the class code
            details: Extra diagnostic values (JSON-serializable)
        """
        self.message = message
        self.error_code = error_code or self.code
        self.details = details or {}
        super().__init__(self.format_message())

    def format_message(self) -> str:
        """Format error message with code."""
        return f"[{self.error_code.value}] {self.message}"
