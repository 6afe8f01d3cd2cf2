"""Output persistence errors."""

from __future__ import annotations

from .base import ErrorCode, PtdwError


class OutputError(PtdwError):
    """An output file could not be written or digested."""

    code = ErrorCode.OUTPUT
