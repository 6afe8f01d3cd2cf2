"""Dense harmonic-oscillator oracle."""

from __future__ import annotations

import numpy as np
import pytest

from pt_double_well.core.oracle import (
    assemble_operator,
    certified_oracle,
    kinetic_matrix,
    lowest_levels,
    optimal_omega,
    oracle_spectrum,
    position_matrix,
)
from pt_double_well.exceptions import InvalidParameterError
from pt_double_well.models.problem import ProblemSpec

from .conftest import K0_LEVELS


def test_position_matrix_squares_to_oscillator():
    omega = 1.7
    x = position_matrix(30, omega)
    p2 = kinetic_matrix(30, omega)
    # p^2 + omega^2 x^2 = 2 omega (n + 1/2) away from the truncation edge.
    h = p2 + omega**2 * (x @ x)
    np.testing.assert_allclose(np.diag(h)[:-1], omega * (2 * np.arange(29) + 1))
    off = h[:-2, :-2] - np.diag(np.diag(h)[:-2])
    np.testing.assert_allclose(off, 0.0, atol=1e-12)


def test_operator_is_complex_symmetric():
    a = assemble_operator(0.7, 40, 2.0)
    np.testing.assert_allclose(a, a.T, atol=1e-12)


def test_optimal_omega_grows_with_basis():
    assert optimal_omega(400) > optimal_omega(100) > 0


def test_ground_state_of_pure_cubic():
    result = certified_oracle(0.0, 150)
    assert result.count >= 5
    np.testing.assert_allclose(result.levels[:3], K0_LEVELS[:3], atol=1e-7)
    assert max(abs(e.imag) for e in result.levels[:3]) < 1e-7


def test_excluded_count():
    result = certified_oracle(0.0, 100)
    assert result.excluded == 100 - result.count
    assert result.excluded > 0


def test_levels_come_in_conjugate_pairs_for_real_alpha():
    levels = certified_oracle(-3.0, 150).levels
    for e in levels[:6]:
        assert min(abs(e.conjugate() - f) for f in levels) < 1e-6


def test_h_form_uses_scaling_map():
    hbar = 0.8
    h_levels = [e.value for e in oracle_spectrum(ProblemSpec.h_form(hbar), 150)]
    k_levels = certified_oracle(-(hbar**-0.8), 150).levels
    np.testing.assert_allclose(h_levels[:4], np.array(k_levels[:4]) * hbar**1.2, rtol=1e-12)


def test_basis_too_small():
    with pytest.raises(InvalidParameterError):
        certified_oracle(0.0, 10)


def test_lowest_levels_count_check():
    with pytest.raises(InvalidParameterError):
        lowest_levels(ProblemSpec.k_form(0.0), 500, 60)
