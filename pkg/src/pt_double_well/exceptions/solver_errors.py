"""Errors raised by the propagator and the eigensolver."""

from __future__ import annotations

from .base import ErrorCode, PtdwError


class WkbSeedError(PtdwError):
    """WKB initial data cannot be trusted at the requested anchor.

    The error code distinguishes an anchor too close to the turning
    points (``WKB_TOO_CLOSE``) from a growing direction
    (``WKB_NOT_DECAYING``).
    """

    code = ErrorCode.WKB_TOO_CLOSE


class PropagationError(PtdwError):
    """The ODE integrator failed along a path."""

    code = ErrorCode.PROPAGATION_FAILED


class ConvergenceError(PtdwError):
    code = ErrorCode.NOT_CONVERGED


class BasinEscapeError(ConvergenceError):
    """Root polish converged, but too far from the initial guess."""

    code = ErrorCode.BASIN_ESCAPE


class NonSimpleLevelError(ConvergenceError):
    """|dW/dE| vanishes at the candidate, i.e. a crossing neighbourhood."""

    code = ErrorCode.NON_SIMPLE_LEVEL


class WindingError(PtdwError):
    """Argument-principle sum is not close to an integer."""

    code = ErrorCode.NON_INTEGER_WINDING
