"""Path propagation, WKB seeds and the truncation radius."""

from __future__ import annotations

import math

import numpy as np
import pytest

from pt_double_well.core.model import turning_points
from pt_double_well.core.propagator import (
    boundary_rays,
    propagate,
    propagate_endpoints,
    propagate_state,
    relative_tolerance,
    resolve_truncation,
    wkb_seed,
    wronskian,
)
from pt_double_well.core.settings import Settings
from pt_double_well.exceptions import InvalidParameterError, WkbSeedError
from pt_double_well.models.problem import ProblemSpec

PATH = np.array([0.0, 1.0, 1.0 + 1.0j])


def _scaled_endpoint(solution):
    psi, dpsi, log = solution.endpoint()
    return psi * math.exp(log), dpsi * math.exp(log)


class TestPropagateState:
    def test_wronskian_is_constant(self, k0):
        a = propagate_state(1.0, 0.0, PATH, 2.0, k0)
        b = propagate_state(0.0, 1.0, PATH, 2.0, k0)
        assert np.array_equal(a.z, b.z)
        mant, log = wronskian(a, b)
        np.testing.assert_allclose(mant * np.exp(log), 1.0, atol=1e-8)

    def test_path_independence(self, k0):
        direct = propagate_state(1.0, 0.5j, PATH, 2.0 - 0.5j, k0)
        around = propagate_state(1.0, 0.5j, np.array([0.0, 1.0j, 1.0 + 1.0j]), 2.0 - 0.5j, k0)
        psi_a, dpsi_a = _scaled_endpoint(direct)
        psi_b, dpsi_b = _scaled_endpoint(around)
        assert abs(psi_a - psi_b) < 1e-8 * abs(psi_a)
        assert abs(dpsi_a - dpsi_b) < 1e-8 * abs(dpsi_a)

    def test_waypoints_are_samples(self, k0):
        solution = propagate_state(1.0, 0.0, PATH, 1.0, k0)
        np.testing.assert_allclose(solution.z[solution.node_index], PATH, atol=1e-12)

    def test_free_particle_limit(self):
        spec = ProblemSpec.k_form(0.0)
        energy = 400.0
        solution = propagate_state(1.0, 0.0, np.array([0.0, 0.05]), energy, spec)
        psi, _ = _scaled_endpoint(solution)
        assert psi == pytest.approx(math.cos(math.sqrt(energy) * 0.05), abs=1e-4)

    def test_non_finite_energy_rejected(self, k0):
        with pytest.raises(InvalidParameterError):
            propagate_state(1.0, 0.0, PATH, complex(math.nan, 0.0), k0)

    def test_endpoints_come_back_normalized(self, k0):
        length = resolve_truncation(k0, 12.0)
        _, (anchor, direction) = boundary_rays(k0, length)
        seeds = [wkb_seed(e, k0, anchor, direction) for e in (1.0, 4.0, 7.5)]
        psi, dpsi, logs = propagate_endpoints(seeds, np.array([anchor, 0.0]), k0)
        assert np.all(np.abs(psi) <= 1.0 + 1e-12)
        assert np.all(np.isfinite(dpsi))
        assert np.all(np.isfinite(logs))

    def test_endpoint_scale_is_folded_into_the_log(self, k0):
        length = resolve_truncation(k0, 12.0)
        _, (anchor, direction) = boundary_rays(k0, length)
        seed = wkb_seed(1.0, k0, anchor, direction)
        psi, _, logs = propagate_endpoints([seed], np.array([anchor, 0.0]), k0)
        sampled = propagate(seed, [anchor, 0.0], spec=k0)
        end_psi, _, end_log = sampled.endpoint()
        assert math.log(abs(psi[0])) + logs[0] == pytest.approx(math.log(abs(end_psi)) + end_log, abs=1e-6)


class TestSeeds:
    def test_seed_on_boundary_ray_decays(self, k0):
        length = resolve_truncation(k0, 12.0)
        _, (anchor, direction) = boundary_rays(k0, length)
        seed = wkb_seed(1.0, k0, anchor, direction)
        assert seed.branch.real > 0
        assert seed.contamination <= 1e-8

    def test_non_finite_energy_rejected(self, k0):
        length = resolve_truncation(k0, 12.0)
        _, (anchor, direction) = boundary_rays(k0, length)
        with pytest.raises(InvalidParameterError):
            wkb_seed(complex(math.inf, 0.0), k0, anchor, direction)

    def test_inward_direction_rejected(self, k0):
        with pytest.raises(InvalidParameterError):
            wkb_seed(1.0, k0, 10.0, -1.0)

    def test_anchor_near_turning_points_rejected(self, k0):
        _, (_, direction) = boundary_rays(k0, 1.0)
        with pytest.raises(WkbSeedError):
            wkb_seed(1.0, k0, 1.2 * direction, direction)

    def test_path_must_start_at_anchor(self, k0):
        length = resolve_truncation(k0, 12.0)
        _, (anchor, direction) = boundary_rays(k0, length)
        seed = wkb_seed(1.0, k0, anchor, direction)
        with pytest.raises(InvalidParameterError):
            propagate(seed, [anchor + 1.0, 0.0], spec=k0)


class TestTruncation:
    def test_rays_are_mirror_images(self, k0):
        (left, left_dir), (right, right_dir) = boundary_rays(k0, 8.0)
        assert left == pytest.approx(-right.conjugate())
        assert left_dir == pytest.approx(-right_dir.conjugate())
        assert abs(right) == pytest.approx(8.0)

    def test_radius_clears_turning_points(self, k0):
        radius = max(1.0, turning_points(12.0, k0).max_modulus)
        assert resolve_truncation(k0, 12.0) >= 2.0 * radius + 1.0

    def test_radius_grows_with_energy(self, k0):
        assert resolve_truncation(k0, 50.0) > resolve_truncation(k0, 5.0)

    def test_explicit_radius_wins(self):
        spec = ProblemSpec.k_form(0.0, truncation_radius=9.5)
        assert resolve_truncation(spec, 100.0) == 9.5


class TestTolerance:
    def test_setting_is_the_default(self):
        assert relative_tolerance(ProblemSpec.k_form(0.0), Settings(ode_rtol=1e-8)) == 1e-8

    def test_problem_value_wins(self):
        spec = ProblemSpec.k_form(0.0, ode_tolerance=1e-10)
        assert relative_tolerance(spec, Settings(ode_rtol=1e-8)) == 1e-10

    def test_setting_reaches_the_integrator(self, k0):
        loose = propagate_state(1.0, 0.0, PATH, 2.0, k0, settings=Settings(ode_rtol=1e-4))
        tight = propagate_state(1.0, 0.0, PATH, 2.0, k0, settings=Settings(ode_rtol=1e-12))
        psi_loose, _ = _scaled_endpoint(loose)
        psi_tight, _ = _scaled_endpoint(tight)
        assert psi_loose != psi_tight
        assert abs(psi_loose - psi_tight) < 1e-2 * abs(psi_tight)
