"""Zero counting, classification and the confinement checks."""

from __future__ import annotations

import math

import pytest

from pt_double_well.core.eigensolver import find_level
from pt_double_well.core.oracle import lowest_levels
from pt_double_well.core.zerolab import (
    check_confinement,
    check_zero_asymptotics,
    check_zero_free_axis,
    classify_zeros,
    conjugate_zero_defect,
    count_zeros,
    default_region,
    disk_contour,
    extend_state,
    locate_zeros,
    node_count_sweep,
    node_summary,
    px_symmetry_defect,
    require_simple,
)
from pt_double_well.exceptions import (
    InvalidParameterError,
    NonSimpleLevelError,
    SymmetryViolationError,
)
from pt_double_well.models.problem import ProblemSpec
from pt_double_well.models.records import ZeroRecord
from pt_double_well.utils.complex_utils import Rectangle

K0_TOP = 1.1562670719881128 ** (1 / 3)


def _zeros(*points: complex) -> list[ZeroRecord]:
    return [ZeroRecord(position=z, newton_residual=0.0) for z in points]


class TestClassification:
    def test_all_classes(self, k0):
        # E = 8 puts the turning ordinate at y = 2.
        summary = classify_zeros(_zeros(-1j, 3j, 0.5 - 1j, -0.5 - 1j), 8.0, k0)
        assert summary.n_plus == 1
        assert summary.n_minus == 1
        assert summary.has_imaginary_node
        assert summary.n_far == 1
        assert summary.windings[0].count == 4

    def test_two_imaginary_nodes(self, k0):
        with pytest.raises(SymmetryViolationError):
            classify_zeros(_zeros(-1j, -2j), 8.0, k0)

    def test_zero_below_turning_ordinate_is_a_node(self, k0):
        summary = classify_zeros(_zeros(1.5j), 8.0, k0)
        assert summary.has_imaginary_node
        assert summary.n_far == 0


class TestSyntheticChecks:
    def test_confinement(self, k0):
        assert check_confinement(_zeros(-1j, 1 - 1j, -1 - 1j), k0).passed
        report = check_confinement(_zeros(-1j, 2 - 0.5j), k0)
        assert not report.passed
        assert len(report.violations) == 1

    def test_confinement_drops_far_zeros(self, k0):
        assert check_confinement(_zeros(-1j, 3j), k0, energy=8.0).passed
        assert not check_confinement(_zeros(-1j, 3j), k0).passed

    def test_confinement_needs_nonnegative_alpha(self):
        with pytest.raises(InvalidParameterError):
            check_confinement([], ProblemSpec.k_form(-1.0))
        with pytest.raises(InvalidParameterError):
            check_confinement([], ProblemSpec.h_form(0.5))

    def test_mirror_defect(self):
        assert px_symmetry_defect(_zeros(0.5 - 1j, -0.5 - 1j, -2j)) == pytest.approx(0.0)
        assert px_symmetry_defect(_zeros(0.5 - 1j)) == math.inf

    def test_conjugate_defect(self):
        assert conjugate_zero_defect(_zeros(0.5 - 1j), _zeros(-0.5 - 1j)) == pytest.approx(0.0)
        assert conjugate_zero_defect(_zeros(0.5 - 1j), _zeros()) == math.inf

    def test_require_simple(self):
        require_simple(_zeros(-1j))
        with pytest.raises(NonSimpleLevelError):
            require_simple([ZeroRecord(position=-1j, newton_residual=0.0, multiplicity=2)])

    def test_disk_contour_is_closed(self):
        contour = disk_contour(1j, 0.5, vertices=16)
        assert len(contour) == 17
        assert contour[0] == contour[-1]
        assert all(abs(abs(z - 1j) - 0.5) < 1e-12 for z in contour)


def test_counts_in_lower_half_plane(ground_state, first_excited):
    contour = disk_contour(-1j, 2.0)
    assert count_zeros(ground_state, contour) == 0
    assert count_zeros(first_excited, contour) == 1


def test_real_level_skips_axis_scan(ground_state):
    report = check_zero_free_axis(ground_state)
    assert report.passed
    assert not report.applied


def test_default_region_of_k_form(ground_state):
    box = default_region(ground_state)
    assert (box.re_min, box.re_max, box.im_min) == (-2.5, 2.5, -3.0)
    assert box.im_max == pytest.approx(K0_TOP + 1.0)


@pytest.mark.slow
def test_first_excited_state_has_one_imaginary_node(first_excited, k0):
    zeros = locate_zeros(first_excited)
    summary = classify_zeros(zeros, first_excited.value, k0)
    assert summary.has_imaginary_node
    assert summary.n_plus == summary.n_minus == 0
    assert check_confinement(zeros, k0, energy=first_excited.value).passed
    assert px_symmetry_defect(zeros) < 1e-5


@pytest.mark.slow
def test_ground_state_nodes(ground_state):
    summary = node_summary(ground_state)
    assert not summary.has_imaginary_node
    assert summary.n_plus == summary.n_minus == 0


@pytest.mark.slow
def test_far_zeros_of_real_level_sit_on_the_axis(ground_state):
    report = check_zero_asymptotics(ground_state)
    assert report.passed
    assert report.values["count"] >= 1


def test_extend_state_matches_pointwise_values(ground_state):
    grid = extend_state(ground_state, Rectangle(-0.5, 0.5, -0.5, 0.5), spacing=0.25)
    assert grid.points.shape == (5, 5)
    assert not grid.failed_columns
    psi, _ = grid.values()
    expected, _ = ground_state.evaluate_one(complex(grid.points[1, 3]))
    assert abs(psi[1, 3] - expected) < 1e-8 * abs(expected)


def test_extend_state_beyond_truncation(ground_state):
    edge = ground_state.truncation
    with pytest.raises(InvalidParameterError):
        extend_state(ground_state, Rectangle(-edge, edge, -1.0, 1.0))


def test_node_count_sweep_needs_hbar(ground_state):
    with pytest.raises(InvalidParameterError):
        node_count_sweep(ground_state, [0.5])


@pytest.mark.slow
def test_node_count_sweep_keeps_imaginary_node():
    spec = ProblemSpec.h_form(2.0)
    start = find_level(lowest_levels(spec, 2)[1], spec)
    summaries = node_count_sweep(start, [2.0, 2.5, 3.0])
    assert all(s.has_imaginary_node for s in summaries)
    assert all(s.n_plus == s.n_minus == 0 for s in summaries)
