"""Actions, semiclassical levels and Stokes geometry."""

from __future__ import annotations

import cmath
import math

import numpy as np
import pytest

from pt_double_well.core.model import SQRT3, WELL_DEPTH, well_bottom
from pt_double_well.core.semiclassics import (
    EP_BRACKET,
    ShortLineStatus,
    action,
    diagram_symmetry_defect,
    find_Ep,
    harmonic_action,
    segment_integral,
    short_line_functional,
    solve_action_quantization,
    trace_stokes,
    trend_ratios,
    wkb_level,
)
from pt_double_well.exceptions import BracketError, InvalidParameterError
from pt_double_well.models.problem import BranchKind, ProblemSpec


def test_segment_integral_of_quadratic_well():
    # V - E = i (z - a)(z - b)(z - c) with c far away behaves like a harmonic well.
    a, b, c = -0.1, 0.1, 50.0j
    value = segment_integral(a, b, c)
    # sqrt((z - a)(b - z)) integrates to pi (b - a)^2 / 8.
    assert abs(value) == pytest.approx(math.pi * 0.2**2 / 8 * math.sqrt(50.0), rel=1e-3)


@pytest.mark.parametrize("well", [1, -1])
def test_action_near_well_bottom_is_harmonic(well):
    spec = ProblemSpec.h_form(1.0)
    _, bottom = well_bottom(well)
    energy = bottom + 0.005 * cmath.exp(0.3j)
    pair = "I0I+" if well == 1 else "I0I-"
    exact = action(energy, pair, spec)
    approx = harmonic_action(energy, well)
    assert abs(exact) == pytest.approx(abs(approx), rel=0.05)


class TestWkbLevel:
    def test_leading_formula(self):
        hbar = 0.02
        level = wkb_level(2, hbar, 1)
        expected = -1j * WELL_DEPTH + cmath.sqrt(1j) * 3**0.25 * 5 * hbar
        assert level.value == pytest.approx(expected)
        assert level.branch.kind is BranchKind.PERTURBATIVE
        assert (level.branch.n, level.branch.sign) == (2, 1)

    def test_wells_are_mirror_images(self):
        plus = wkb_level(1, 0.03, 1).value
        minus = wkb_level(1, 0.03, -1).value
        assert minus == pytest.approx(plus.conjugate())

    @pytest.mark.parametrize(("n", "hbar", "sign"), [(-1, 0.1, 1), (0, 0.0, 1), (0, 0.1, 0)])
    def test_invalid_arguments(self, n, hbar, sign):
        with pytest.raises(InvalidParameterError):
            wkb_level(n, hbar, sign)

    def test_quantized_action_is_close_to_leading_level(self):
        hbar = 0.02
        refined = solve_action_quantization(0, hbar, 1)
        assert abs(refined - wkb_level(0, hbar, 1).value) < 20 * hbar**2
        assert refined.imag < 0


def test_short_line_functional_changes_sign_on_bracket():
    lo, hi = EP_BRACKET
    assert short_line_functional(lo) * short_line_functional(hi) < 0


def test_find_ep_root():
    root = find_Ep()
    assert EP_BRACKET[0] < root < EP_BRACKET[1]
    assert abs(short_line_functional(root)) < 1e-10


def test_traced_diagram_agrees_with_find_ep():
    # The traced well curves pass closest to I0 at the root of the analytic functional.
    root = find_Ep()
    offset = 0.05
    distance = {
        e: trace_stokes(e, step=0.01).imaginary_point_distance for e in (root - offset, root, root + offset)
    }
    assert distance[root] < 0.05
    assert distance[root] < 0.5 * min(distance[root - offset], distance[root + offset])


def test_find_ep_without_sign_change():
    with pytest.raises(BracketError):
        find_Ep((0.40, 0.45))


def test_trend_ratios():
    ratios = trend_ratios([(0.1, 0.36), (0.2, 0.39)], 0.35)
    np.testing.assert_allclose(ratios, [1.0, 1.0])


class TestStokes:
    def test_diagram_is_mirror_symmetric(self):
        diagram = trace_stokes(1.0, step=0.02)
        assert set(diagram.turning_points) == {"I0", "I-", "I+"}
        assert len(diagram.curves) == 9
        assert diagram_symmetry_defect(diagram) < 0.05
        assert diagram.short_line_status in set(ShortLineStatus)

    def test_rejects_non_positive_energy(self):
        with pytest.raises(InvalidParameterError):
            trace_stokes(-1.0)

    def test_rejects_k_form(self):
        with pytest.raises(InvalidParameterError):
            trace_stokes(1.0, ProblemSpec.k_form(0.0))


def test_well_depth_constant():
    assert WELL_DEPTH == pytest.approx(2 / (3 * SQRT3))
