"""Shooting eigensolver on the pure cubic K(0) and on small-hbar H-form levels."""

from __future__ import annotations

import cmath
import math

import numpy as np
import pytest

from pt_double_well.core.eigensolver import (
    MismatchFunction,
    MismatchValue,
    _muller_step,
    find_level,
    polish_level,
    scan_spectrum,
)
from pt_double_well.core.semiclassics import wkb_level
from pt_double_well.exceptions import ConvergenceError, InvalidParameterError
from pt_double_well.models.problem import BranchLabel, ProblemSpec
from pt_double_well.utils.complex_utils import Rectangle

from .conftest import K0_LEVELS


def test_ground_state_value(ground_state):
    assert ground_state.value == pytest.approx(K0_LEVELS[0], abs=1e-8)


def test_first_excited_value(first_excited):
    assert first_excited.value == pytest.approx(K0_LEVELS[1], abs=1e-8)


def test_state_is_one_at_anchor(ground_state):
    psi, _ = ground_state.evaluate_one(ground_state.anchor)
    assert psi == pytest.approx(1.0, abs=1e-9)


def test_left_and_right_halves_agree_at_matching_point(ground_state):
    assert ground_state.residual < 1e-6
    left, _ = ground_state.evaluate_one(-1e-9)
    right, _ = ground_state.evaluate_one(0.0)
    assert left == pytest.approx(right, rel=1e-6)


def test_modulus_is_mirror_symmetric(ground_state):
    # P_xT symmetry: |psi(-conj z)| = |psi(z)|.
    points = np.array([0.7 - 0.2j, 1.3 + 0.1j])
    psi, _ = ground_state.evaluate(points).values()
    mirrored, _ = ground_state.evaluate(-np.conj(points)).values()
    np.testing.assert_allclose(np.abs(mirrored), np.abs(psi), rtol=1e-7)


def test_state_decays_on_the_real_axis(ground_state):
    x, psi, _ = ground_state.real_axis()
    assert np.all(np.diff(x) > 0)
    assert abs(psi[0]) < 1e-6 * np.max(np.abs(psi))
    assert abs(psi[-1]) < 1e-6 * np.max(np.abs(psi))


def test_pt_mismatch_changes_sign_at_level(k0):
    mf = MismatchFunction(k0)
    below, above = mf.pt_mismatch([K0_LEVELS[0] - 0.1, K0_LEVELS[0] + 0.1])
    assert below * above < 0


def test_pt_mismatch_needs_real_problem():
    mf = MismatchFunction(ProblemSpec.k_form(1.0 + 0.5j))
    with pytest.raises(InvalidParameterError):
        mf.pt_mismatch([1.0])


def test_label_is_kept(k0):
    pair = find_level(K0_LEVELS[2] + 0.05, k0, label=BranchLabel.large_hbar(2))
    assert pair.energy.branch == BranchLabel.large_hbar(2)
    assert pair.value == pytest.approx(K0_LEVELS[2], abs=1e-8)


def test_guess_outside_any_basin(k0):
    # Midway between two levels, farther than the basin radius from both.
    with pytest.raises(ConvergenceError):
        find_level(0.5 * (K0_LEVELS[0] + K0_LEVELS[1]), k0)


class TestSmallHbar:
    @pytest.mark.parametrize("hbar", [0.05, 0.1])
    def test_ground_pair_from_leading_formula(self, hbar):
        leading = wkb_level(0, hbar, 1).value
        pair = find_level(leading, ProblemSpec.h_form(hbar), label=BranchLabel.perturbative(0, 1))
        assert cmath.isfinite(pair.value)
        assert pair.value.imag < 0
        assert abs(pair.value - leading) < 0.5 * hbar**2
        assert pair.residual < 1e-6
        psi, _ = pair.evaluate_one(pair.anchor)
        assert psi == pytest.approx(1.0, abs=1e-8)

    def test_matching_data_is_normalized(self):
        hbar = 0.05
        value = MismatchFunction(ProblemSpec.h_form(hbar))(wkb_level(0, hbar, 1).value)
        assert max(abs(value.psi_left), abs(value.psi_right)) <= 1.0 + 1e-12
        assert math.isfinite(value.log_scale)
        assert math.isfinite(value.log_modulus)


def test_muller_step_with_huge_samples():
    def f(x: complex) -> complex:
        return 1e200 * (x - 1.05) * (x + 3.0)

    xs = (0.9 + 0j, 1.1 + 0j, 1.0 + 0j)
    step = _muller_step(*xs, *(f(x) for x in xs))
    assert step == pytest.approx(1.05)


class _NanMismatch:
    """Mismatch stand-in whose every value is NaN."""

    def __call__(self, energy: complex) -> MismatchValue:
        return MismatchValue(
            energy=complex(energy),
            psi_left=complex(math.nan, 0.0),
            dpsi_left=1.0,
            psi_right=1.0,
            dpsi_right=1.0,
            log_left=0.0,
            log_right=0.0,
        )

    def evaluate_many(self, energies):
        return [self(e) for e in energies]


def test_polish_rejects_non_finite_values(settings):
    with pytest.raises(ConvergenceError):
        polish_level(_NanMismatch(), 0.3 - 0.3j, settings)


@pytest.mark.slow
def test_scan_finds_lowest_levels(k0):
    levels = scan_spectrum(Rectangle(0.0, 5.0, -1.0, 1.0), k0)
    values = sorted((e.value for e in levels), key=lambda e: e.real)
    assert len(values) == 2
    np.testing.assert_allclose(values, K0_LEVELS[:2], atol=1e-7)
