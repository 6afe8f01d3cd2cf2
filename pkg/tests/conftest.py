"""Shared fixtures: problems, converged low levels of K(0), isolated settings."""

from __future__ import annotations

from pathlib import Path

import pytest

from pt_double_well.core.eigensolver import Eigenpair, find_level
from pt_double_well.core.settings import Settings
from pt_double_well.models.problem import ProblemSpec

# Lowest levels of p^2 + i x^3.
K0_LEVELS = (
    1.1562670719881128,
    4.1092287528096515,
    7.5622738549788280,
    11.314421820195505,
    15.291553750392832,
)


@pytest.fixture
def settings(tmp_path: Path) -> Settings:
    return Settings(workers=1, output_dir=tmp_path / "out")


@pytest.fixture(scope="session")
def k0() -> ProblemSpec:
    return ProblemSpec.k_form(0.0)


@pytest.fixture(scope="session")
def ground_state(k0: ProblemSpec) -> Eigenpair:
    return find_level(K0_LEVELS[0], k0)


@pytest.fixture(scope="session")
def first_excited(k0: ProblemSpec) -> Eigenpair:
    return find_level(K0_LEVELS[1], k0)


@pytest.fixture
def clean_env(monkeypatch: pytest.MonkeyPatch) -> None:
    for key in ("PTDW_WORKERS", "PTDW_ODE_RTOL", "PTDW_OUTPUT_DIR", "PTDW_LOG_LEVEL"):
        monkeypatch.delenv(key, raising=False)
