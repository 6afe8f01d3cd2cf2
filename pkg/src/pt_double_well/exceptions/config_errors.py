"""Run-configuration errors."""

from __future__ import annotations

from .base import ErrorCode, PtdwError


class ConfigError(PtdwError):
    """Base configuration error."""

    code = ErrorCode.CONFIG


class ConfigValidationError(ConfigError):
    """Configuration values failed validation."""
    pass


class ConfigNotFoundError(ConfigError):
    """Configuration file not found."""
    pass
