"""Configuration management for the PT double-well solver.

This module provides environment-based configuration using Pydantic for type
safety and validation. Numerical budgets live here so that every run manifest
can snapshot them.
"""

from __future__ import annotations

import os
from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Solver settings with environment variable support.

    All settings can be overridden via environment variables with PTDW_ prefix.
    For example: PTDW_WORKERS, PTDW_ODE_RTOL, etc.
    """

    model_config = SettingsConfigDict(
        env_prefix="PTDW_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Integrator
    ode_rtol: float = Field(
        default=1e-11,
        gt=0.0,
        lt=1e-3,
        description="Relative tolerance of the adaptive integrator",
    )

    ode_atol: float = Field(
        default=1e-14,
        gt=0.0,
        description="Absolute tolerance of the adaptive integrator",
    )

    decay_budget: float = Field(
        default=30.0,
        ge=10.0,
        description="Required WKB decay exponent between the wells and the truncation radius",
    )

    truncation_margin: float = Field(
        default=4.0,
        ge=0.0,
        description="Extra decay exponent added on top of decay_budget",
    )

    # Eigensolver
    zero_tolerance: float = Field(
        default=1e-10,
        gt=0.0,
        description="Relative mismatch accepted at a converged level",
    )

    muller_tolerance: float = Field(
        default=1e-11,
        gt=0.0,
        description="Relative step size at which Muller iteration stops",
    )

    muller_max_iterations: int = Field(
        default=50,
        ge=5,
        description="Maximum Muller iterations per level",
    )

    basin_radius: float = Field(
        default=0.5,
        gt=0.0,
        description="Maximum distance between guess and converged level",
    )

    simplicity_floor: float = Field(
        default=1e-10,
        gt=0.0,
        description="Relative |dW/dE| below which a level is treated as non-simple",
    )

    # Oracle
    oracle_basis_size: int = Field(
        default=400,
        ge=50,
        description="Harmonic-oscillator basis size of the dense oracle",
    )

    oracle_scale_ratio: float = Field(
        default=1.3,
        gt=1.0,
        description="Ratio between the two basis scales used for certification",
    )

    oracle_stability: float = Field(
        default=1e-8,
        gt=0.0,
        description="Maximum drift of a certified oracle eigenvalue",
    )

    oracle_match_radius: float = Field(
        default=0.1,
        gt=0.0,
        description="Nearest-distance matching radius between methods",
    )

    # Zeros
    winding_tolerance: float = Field(
        default=0.05,
        gt=0.0,
        lt=0.5,
        description="Maximum distance of a winding sum from an integer",
    )

    classification_tolerance: float = Field(
        default=1e-6,
        gt=0.0,
        description="|Re z| below which a zero lies on the imaginary axis",
    )

    # Continuation
    arc_step_degrees: float = Field(
        default=2.0,
        gt=0.0,
        le=30.0,
        description="Initial step along alpha arcs, in degrees of arg(alpha)",
    )

    trust_fraction: float = Field(
        default=0.1,
        gt=0.0,
        le=1.0,
        description="Trust radius of the corrector as a fraction of |E|",
    )

    node_summary_every: int = Field(
        default=5,
        ge=1,
        description="Recompute node summaries every k-th trace step",
    )

    # Application
    workers: int = Field(
        default_factory=lambda: os.cpu_count() or 1,
        ge=1,
        description="Worker pool size for parallel maps",
    )

    output_dir: Path = Field(
        default=Path("ptdw-out"),
        description="Directory for all run outputs",
    )

    log_level: str = Field(
        default="INFO",
        description="Logging level (DEBUG, INFO, WARNING, ERROR)",
    )

    def tolerance_snapshot(self) -> dict[str, float | int]:
        """Get the numerical budgets recorded in run manifests."""
        return self.model_dump(exclude={"workers", "output_dir", "log_level"})


# Global settings instance
settings = Settings()


def get_settings() -> Settings:
    """Get the global settings instance."""
    return settings
