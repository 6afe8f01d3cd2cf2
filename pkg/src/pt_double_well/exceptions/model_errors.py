"""Errors raised while building problems and evaluating the potential."""

from __future__ import annotations

from .base import ErrorCode, PtdwError


class InvalidParameterError(PtdwError):
    """A Hamiltonian parameter lies outside the admissible sector."""

    code = ErrorCode.INVALID_PARAMETER


class DegenerateTurningPointError(PtdwError):
    """Two turning points coincide within the caustic threshold."""

    code = ErrorCode.DEGENERATE_TURNING_POINTS
