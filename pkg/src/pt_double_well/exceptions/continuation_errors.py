"""Errors raised while continuing levels in a parameter."""

from __future__ import annotations

from .base import ErrorCode, PtdwError


class TraceTruncatedError(PtdwError):
    """The corrector kept failing; the trace stopped early."""

    code = ErrorCode.TRACE_TRUNCATED


class BracketError(PtdwError):
    """A bisection bracket has no sign change or brackets disagree."""

    code = ErrorCode.BRACKET_FAILED
