"""Potentials, scaling maps, parameter paths and turning points."""

from __future__ import annotations

import cmath
import math

import numpy as np
import pytest

from pt_double_well.core.model import (
    SQRT3,
    WELL_DEPTH,
    ParameterKind,
    ParameterPath,
    beta_from_hbar,
    continuation_path_alpha,
    energy_from_beta_level,
    imaginary_turning_ordinate,
    potential,
    potential_derivative,
    rotated_potential,
    scale_alpha_to_h,
    scale_h_to_alpha,
    sigma_contains,
    translated_potential,
    turning_points,
    well_bottom,
)
from pt_double_well.core.semiclassics import wkb_level
from pt_double_well.exceptions import DegenerateTurningPointError, InvalidParameterError
from pt_double_well.models.problem import ProblemSpec


class TestPotential:
    def test_h_form_values(self):
        spec = ProblemSpec.h_form(0.5)
        assert potential(2.0, spec) == pytest.approx(6j)
        assert potential(1j, spec) == pytest.approx(2.0)

    def test_k_form_uses_alpha(self):
        spec = ProblemSpec.k_form(2.0)
        assert potential(1.0, spec) == pytest.approx(3j)
        assert potential_derivative(1.0, spec) == pytest.approx(5j)

    def test_vectorized(self):
        spec = ProblemSpec.k_form(0.0)
        z = np.array([0.0, 1.0, -1.0])
        np.testing.assert_allclose(potential(z, spec), [0, 1j, -1j])

    def test_h_form_real_on_imaginary_axis(self):
        spec = ProblemSpec.h_form(1.0)
        y = np.linspace(-2, 2, 9)
        values = potential(1j * y, spec)
        np.testing.assert_allclose(values.imag, 0.0, atol=1e-14)
        np.testing.assert_allclose(values.real, -rotated_potential(y), atol=1e-14)

    @pytest.mark.parametrize("well", [1, -1])
    def test_translated_potential(self, well):
        spec = ProblemSpec.h_form(1.0)
        x, bottom = well_bottom(well)
        w = np.array([0.1, -0.3 + 0.2j, 0.7j])
        np.testing.assert_allclose(translated_potential(w, well) + bottom, potential(x + w, spec), atol=1e-14)

    def test_well_bottom(self):
        x, value = well_bottom(1)
        assert x == pytest.approx(1 / SQRT3)
        assert value == pytest.approx(-1j * WELL_DEPTH)
        assert potential_derivative(x, ProblemSpec.h_form(1.0)) == pytest.approx(0)

    def test_well_bottom_rejects_bad_well(self):
        with pytest.raises(InvalidParameterError):
            well_bottom(0)


class TestScaling:
    def test_unit_hbar(self):
        alpha, factor = scale_h_to_alpha(1.0)
        assert alpha == pytest.approx(-1.0)
        assert factor == pytest.approx(1.0)

    def test_round_trip_complex(self):
        hbar = 0.3 * cmath.exp(0.4j)
        alpha, _ = scale_h_to_alpha(hbar)
        assert scale_alpha_to_h(alpha) == pytest.approx(hbar)

    def test_factor_exponent(self):
        alpha, factor = scale_h_to_alpha(0.1)
        assert alpha == pytest.approx(-(0.1**-0.8))
        assert factor == pytest.approx(0.1**1.2)

    @pytest.mark.parametrize("hbar", [0.0, -1.0, cmath.exp(1j * math.pi / 3)])
    def test_outside_sector(self, hbar):
        with pytest.raises(InvalidParameterError):
            scale_h_to_alpha(hbar)

    def test_alpha_zero_has_no_hbar(self):
        with pytest.raises(InvalidParameterError):
            scale_alpha_to_h(0.0)

    @pytest.mark.parametrize("well", [1, -1])
    def test_beta_ground_state_matches_leading_wkb(self, well):
        # Ground level of p^2 + u^2 is 1.
        hbar = 0.05
        energy = energy_from_beta_level(1.0, hbar, well)
        assert energy == pytest.approx(wkb_level(0, hbar, well).value, abs=1e-12)

    def test_beta_is_linear_in_hbar(self):
        assert beta_from_hbar(0.2) == pytest.approx(2 * beta_from_hbar(0.1))


class TestParameterPath:
    def test_segment(self):
        path = ParameterPath.segment(ParameterKind.HBAR, 0.1, 0.5)
        assert not path.is_arc
        assert path.at(0.5) == pytest.approx(0.3)
        assert path.length == pytest.approx(0.4)
        assert path.reversed().at(0.0) == pytest.approx(0.5)

    @pytest.mark.parametrize("sign", [1, -1])
    def test_continuation_arc(self, sign):
        path = continuation_path_alpha(1.0, sign)
        assert path.is_arc
        assert path.at(0.0) == pytest.approx(1.0)
        assert path.end == pytest.approx(-1.0, abs=1e-12)
        assert path.at(0.5) == pytest.approx(sign * 1j)
        assert path.length == pytest.approx(math.pi)

    def test_arc_radius(self):
        path = continuation_path_alpha(0.2, 1)
        radius = 0.2**-0.8
        for t in np.linspace(0, 1, 7):
            assert abs(path.at(float(t))) == pytest.approx(radius)

    def test_reversed_arc(self):
        path = continuation_path_alpha(1.0, 1)
        back = path.reversed()
        assert back.at(0.0) == pytest.approx(path.end)
        assert back.at(1.0) == pytest.approx(path.start)
        assert back.at(0.5) == pytest.approx(path.at(0.5))

    @pytest.mark.parametrize(("hbar", "sign"), [(0.0, 1), (1.0, 0)])
    def test_continuation_arc_rejects(self, hbar, sign):
        with pytest.raises(InvalidParameterError):
            continuation_path_alpha(hbar, sign)


class TestTurningPoints:
    @pytest.mark.parametrize("energy", [0.2, 1.0, 3.0 - 0.5j])
    def test_roots_solve_cubic(self, energy):
        spec = ProblemSpec.h_form(1.0)
        tp = turning_points(energy, spec)
        for root in tp.roots:
            assert potential(root, spec) == pytest.approx(energy, abs=1e-10)

    def test_real_energy_classification(self):
        tp = turning_points(1.0, ProblemSpec.h_form(1.0))
        assert abs(tp.imaginary_point.real) < 1e-12
        assert tp.imaginary_point.imag == pytest.approx(imaginary_turning_ordinate(1.0, ProblemSpec.h_form(1.0)))
        assert tp.minus == pytest.approx(-tp.plus.conjugate())
        assert tp.minus.real < 0 < tp.plus.real
        assert not tp.degenerate

    def test_pairs(self):
        tp = turning_points(1.0, ProblemSpec.h_form(1.0))
        a, b, c = tp.pair("I0I+")
        assert (a, b, c) == (tp.imaginary_point, tp.plus, tp.minus)
        with pytest.raises(InvalidParameterError):
            tp.pair("I+I0")

    def test_coalescing_roots_are_degenerate(self):
        tp = turning_points(0.0, ProblemSpec.k_form(0.0))
        assert tp.degenerate
        with pytest.raises(DegenerateTurningPointError):
            tp.require_nondegenerate()

    def test_imaginary_turning_ordinate(self):
        assert imaginary_turning_ordinate(2.0, ProblemSpec.h_form(1.0)) == pytest.approx(1.0)
        assert imaginary_turning_ordinate(8.0, ProblemSpec.k_form(0.0)) == pytest.approx(2.0)
        # y^3 - 3y = 2 has roots -1 (double) and 2.
        assert imaginary_turning_ordinate(2.0, ProblemSpec.k_form(3.0)) == pytest.approx(2.0)

    def test_sigma_contains(self):
        spec = ProblemSpec.h_form(1.0)
        assert sigma_contains(-3j, 2.0, spec, 1e-6)
        assert sigma_contains(0.5j, 2.0, spec, 1e-6)
        assert not sigma_contains(1.5j, 2.0, spec, 1e-6)
        assert not sigma_contains(0.1 - 1j, 2.0, spec, 1e-6)
