"""Exception hierarchy for pt_double_well."""

from .base import ErrorCode, PtdwError
from .config_errors import ConfigError, ConfigNotFoundError, ConfigValidationError
from .continuation_errors import BracketError, TraceTruncatedError
from .model_errors import DegenerateTurningPointError, InvalidParameterError
from .output_errors import OutputError
from .solver_errors import (
    BasinEscapeError,
    ConvergenceError,
    NonSimpleLevelError,
    PropagationError,
    WindingError,
    WkbSeedError,
)
from .zero_errors import SymmetryViolationError, ZeroCountError

__all__ = [
    "ErrorCode",
    "PtdwError",
    # Configuration
    "ConfigError",
    "ConfigNotFoundError",
    "ConfigValidationError",
    # Model
    "DegenerateTurningPointError",
    "InvalidParameterError",
    # Solver
    "BasinEscapeError",
    "ConvergenceError",
    "NonSimpleLevelError",
    "PropagationError",
    "WindingError",
    "WkbSeedError",
    # Zeros
    "SymmetryViolationError",
    "ZeroCountError",
    # Continuation
    "BracketError",
    "TraceTruncatedError",
    # Output
    "OutputError",
]
