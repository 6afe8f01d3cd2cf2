"""Run-configuration files.

A run configuration is one flat YAML mapping whose keys mirror the long
command-line flags (``--ode-rtol`` becomes ``ode_rtol``). Flags override the
file, the file overrides ``PTDW_*`` environment variables, and those override
the defaults in ``Settings``.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Mapping
from pathlib import Path
from typing import Any

import yaml
from pydantic import ValidationError

from pt_double_well.core.settings import Settings
from pt_double_well.exceptions.config_errors import (
    ConfigError,
    ConfigNotFoundError,
    ConfigValidationError,
)

logger = logging.getLogger(__name__)


class ConfigManager:
    """Loads and validates a flat run-configuration document."""

    def __init__(self, config_file: Path | None = None, allowed_keys: Iterable[str] = ()) -> None:
        """Initialize the manager.

        Args:
            config_file: YAML file to read, or None for an empty configuration
            allowed_keys: Command keys accepted besides the ``Settings`` fields
        """
        self.config_file = Path(config_file) if config_file is not None else None
        self.allowed_keys = set(allowed_keys) | set(Settings.model_fields)
        self._values: dict[str, Any] | None = None

    def load(self) -> dict[str, Any]:
        """Read the configuration file.

        Returns:
            Mapping of flag names (underscored) to values

        Raises:
            ConfigNotFoundError: the file does not exist
            ConfigValidationError: the document is not a flat mapping or has unknown keys
            ConfigError: the file cannot be read or parsed
        """
        if self._values is not None:
            return self._values
        if self.config_file is None:
            self._values = {}
            return self._values
        if not self.config_file.exists():
            raise ConfigNotFoundError(f"Config file not found: {self.config_file}")

        try:
            with open(self.config_file, encoding="utf-8") as f:
                document = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigError(f"Failed to parse config file: {e}") from e
        except OSError as e:
            raise ConfigError(f"Failed to read config file: {e}") from e

        if document is None:
            document = {}
        if not isinstance(document, dict):
            raise ConfigValidationError("Config file must contain a single key-value mapping")

        values: dict[str, Any] = {}
        for raw_key, value in document.items():
            key = str(raw_key).replace("-", "_")
            if key not in self.allowed_keys:
                raise ConfigValidationError(
                    f"Unknown config key '{raw_key}'",
                    details={"key": str(raw_key), "file": str(self.config_file)},
                )
            if isinstance(value, (dict, list)) and key not in ("n", "hbars", "region"):
                raise ConfigValidationError(f"Config key '{raw_key}' must have a scalar value")
            values[key] = value

        logger.info("Loaded %d config values from %s", len(values), self.config_file)
        self._values = values
        return values

    def settings(self, overrides: Mapping[str, Any] | None = None) -> Settings:
        """Settings with file values applied over the environment, then ``overrides`` on top.

        Raises:
            ConfigValidationError: a value fails validation
        """
        fields = set(Settings.model_fields)
        merged = {k: v for k, v in self.load().items() if k in fields}
        merged.update({k: v for k, v in (overrides or {}).items() if k in fields and v is not None})
        try:
            return Settings(**merged)
        except ValidationError as e:
            raise ConfigValidationError(f"Invalid settings: {e}") from e

    def resolve(self, key: str, cli_value: Any, default: Any = None) -> Any:
        """Flag value if given, else the file value, else ``default``."""
        if cli_value is not None:
            return cli_value
        return self.load().get(key, default)
