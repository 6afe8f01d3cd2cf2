"""Errors raised by the zero census."""

from __future__ import annotations

from .base import ErrorCode, PtdwError


class ZeroCountError(PtdwError):
    """Located zeros do not match the winding count of their region."""

    code = ErrorCode.ZERO_COUNT


class SymmetryViolationError(PtdwError):
    """A structural statement about the zero set failed."""

    code = ErrorCode.SYMMETRY_VIOLATION
