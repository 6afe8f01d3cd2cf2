"""Level continuation along parameter paths and its building blocks."""

from __future__ import annotations

import cmath
import math

import numpy as np
import pytest

from pt_double_well.core.continuation import (
    NODE_BIRTH_SCAN,
    SCAN_RATIO,
    TABLE1,
    LevelTracer,
    NodeBirthLocator,
    _predict,
    find_node_birth,
    half_circle_paths,
    half_circle_targets,
    hbar_path,
    locate_crossing,
    real_roots,
    scan_grid,
    spec_at,
    trace_level,
)
from pt_double_well.core.model import ParameterKind, ParameterPath
from pt_double_well.core.oracle import certified_oracle, oracle_spectrum
from pt_double_well.exceptions import InvalidParameterError
from pt_double_well.models.problem import ProblemSpec
from pt_double_well.models.records import ParameterKindName


class TestSpecAt:
    def test_hbar(self):
        spec = spec_at(ProblemSpec.h_form(0.5), 0.7, ParameterKind.HBAR)
        assert spec.hbar == 0.7

    def test_hbar_outside_sector(self):
        with pytest.raises(InvalidParameterError):
            spec_at(ProblemSpec.h_form(0.5), -0.7, ParameterKind.HBAR)

    def test_alpha_arc_leaves_sector(self):
        alpha = 3.0 * cmath.exp(1j * math.radians(175))
        spec = spec_at(ProblemSpec.k_form(3.0), alpha, ParameterKind.ALPHA)
        assert spec.continuation
        assert spec.alpha == pytest.approx(alpha)

    def test_form_must_match_kind(self):
        with pytest.raises(InvalidParameterError):
            spec_at(ProblemSpec.k_form(1.0), 0.5, ParameterKind.HBAR)


def test_quadratic_predictor_is_exact_for_quadratics():
    history = [(0.0, 0j), (1.0, 1 + 1j), (2.0, 4 + 4j)]
    assert _predict(history, 3.0) == pytest.approx(9 + 9j)
    assert _predict(history[:2], 2.0) == pytest.approx(2 + 2j)
    assert _predict(history[:1], 5.0) == 0j


def test_hbar_path():
    path = hbar_path(0.1, 0.3)
    assert path.kind is ParameterKind.HBAR
    assert path.at(1.0) == pytest.approx(0.3)


def test_tracer_checks_start(ground_state):
    with pytest.raises(InvalidParameterError):
        LevelTracer(ground_state, ParameterPath.segment(ParameterKind.ALPHA, 1.0, 2.0))


def test_published_node_births():
    assert sorted(TABLE1) == [8, 9, 10, 11]
    assert TABLE1[8][:2] == (0.043835, 0.3519)
    assert TABLE1[11][:2] == (0.013060, 0.3522)


def test_node_birth_rejects_negative_index():
    with pytest.raises(InvalidParameterError):
        find_node_birth(-1)


def test_real_roots_match_oracle():
    hbar = 1.0
    window = (-0.5, 3.0)
    oracle = sorted(
        e.value.real for e in oracle_spectrum(ProblemSpec.h_form(hbar), 150)
        if abs(e.value.imag) < 1e-8 and window[0] < e.value.real < window[1]
    )
    roots = real_roots(hbar, window)
    assert len(roots) == len(oracle)
    np.testing.assert_allclose(roots, oracle, atol=1e-7)


@pytest.mark.slow
def test_trace_stays_real_for_nonnegative_alpha(ground_state):
    trace = trace_level(ground_state, ParameterPath.segment(ParameterKind.ALPHA, 0.0, 1.0))
    assert trace.parameter_kind is ParameterKindName.ALPHA_ARC
    assert not trace.truncated
    assert trace.final.param == pytest.approx(1.0)
    assert max(abs(e.imag) for e in trace.energies) < 1e-8
    assert trace.final.energy.value == pytest.approx(certified_oracle(1.0, 150).levels[0], abs=1e-7)


@pytest.mark.slow
def test_trace_reversal_returns_to_start(ground_state):
    path = ParameterPath.segment(ParameterKind.ALPHA, 0.0, 0.5 + 0.5j)
    forward = LevelTracer(ground_state, path)
    forward.run()
    back = trace_level(forward.final_pair(), path.reversed())
    assert back.final.energy.value == pytest.approx(ground_state.value, abs=1e-8)


class TestHalfCircles:
    PLUS = 0.31 - 0.02j
    TOL = 1e-6

    def _starts(self):
        return {"E_2 upper": 0.30, "E_2 lower": 0.30, "E_3 upper": 0.32, "E_3 lower": 0.32}

    def test_targets_follow_the_cut(self):
        targets = half_circle_targets(1, self.PLUS)
        assert targets["E_2 upper"] == (self.PLUS, "E_1^+")
        assert targets["E_2 lower"] == (self.PLUS.conjugate(), "E_1^-")
        assert targets["E_3 upper"] == (self.PLUS.conjugate(), "E_1^-")
        assert targets["E_3 lower"] == (self.PLUS, "E_1^+")

    def test_plus_member_has_negative_imaginary_part(self):
        with pytest.raises(InvalidParameterError):
            half_circle_targets(0, self.PLUS.conjugate())

    def test_expected_landing_passes(self):
        ends = {
            "E_2 upper": self.PLUS,
            "E_2 lower": self.PLUS.conjugate(),
            "E_3 upper": self.PLUS.conjugate() + 1e-9,
            "E_3 lower": self.PLUS,
        }
        paths = half_circle_paths(1, self.PLUS, self._starts(), ends, self.TOL)
        assert all(p.passed for p in paths)
        assert {p.name: p.target_label for p in paths}["E_2 upper"] == "E_1^+"

    def test_swapped_members_fail(self):
        # Every endpoint sits on a member of the pair, but on the wrong one.
        ends = {
            "E_2 upper": self.PLUS.conjugate(),
            "E_2 lower": self.PLUS,
            "E_3 upper": self.PLUS,
            "E_3 lower": self.PLUS.conjugate(),
        }
        paths = half_circle_paths(1, self.PLUS, self._starts(), ends, self.TOL)
        assert not any(p.passed for p in paths)
        assert min(p.mismatch for p in paths) == pytest.approx(0.04)


class TestNodeBirthScan:
    def test_grid_is_geometric_and_descending(self):
        grid = scan_grid(NODE_BIRTH_SCAN)
        assert grid[0] == pytest.approx(NODE_BIRTH_SCAN[1])
        assert grid[-1] == pytest.approx(NODE_BIRTH_SCAN[0])
        ratios = np.array(grid[:-1]) / np.array(grid[1:])
        assert np.all(ratios > 1.0)
        assert np.all(ratios <= SCAN_RATIO + 1e-12)

    def test_default_scan_covers_published_births(self):
        grid = scan_grid(NODE_BIRTH_SCAN)
        for h_p, _, _ in TABLE1.values():
            assert grid[-1] < h_p < grid[0]

    @pytest.mark.parametrize("scan", [(0.1, 0.05), (0.0, 0.1), (0.05, 0.05)])
    def test_bad_interval(self, scan):
        with pytest.raises(InvalidParameterError):
            scan_grid(scan)

    def test_find_node_birth_checks_interval(self):
        with pytest.raises(InvalidParameterError):
            find_node_birth(8, scan=(0.05, 0.01))


class TestEnteringZero:
    def test_largest_zero_inside_sigma(self):
        assert NodeBirthLocator.entering_zero([0.1, 0.4, 1.6], top=1.0) == 0.4

    def test_lowest_zero_above_turning_point(self):
        assert NodeBirthLocator.entering_zero([2.0, 1.3], top=1.0) == 1.3

    def test_single_zero(self):
        assert NodeBirthLocator.entering_zero([0.7], top=1.0) == 0.7


def test_ground_crossing_from_small_hbar():
    # Starts at hbar = 0.1, where the matched mismatch once overflowed.
    record, below, above = locate_crossing(0, h_small=0.1, h_large=0.6)
    assert below.samples[0].energy.value.imag < 0
    assert 0.2 < record.h_n < 0.45
    assert record.E_n_c > 0
    assert 0.4 <= record.sqrt_exponent_fit <= 0.6
