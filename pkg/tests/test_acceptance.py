"""End-to-end numerical checks against reference values; all marked slow."""

from __future__ import annotations

import cmath
import math

import numpy as np
import pytest

from pt_double_well.core.continuation import (
    SCAN_RATIO,
    TABLE1,
    arc_endpoint_level,
    critical_overlap,
    find_node_birth,
    locate_crossing,
    monodromy_check,
    selection_rule_report,
)
from pt_double_well.core.eigensolver import find_level
from pt_double_well.core.model import scale_h_to_alpha
from pt_double_well.core.oracle import certified_oracle, lowest_levels
from pt_double_well.core.semiclassics import EP_BRACKET, find_Ep, trend_ratios, wkb_level
from pt_double_well.core.verify import loeffel_martin_identity
from pt_double_well.core.zerolab import (
    check_confinement,
    check_zero_asymptotics,
    check_zero_free_axis,
    locate_zeros,
    node_summary,
)
from pt_double_well.models.problem import BranchLabel, ProblemSpec

from .conftest import K0_LEVELS

pytestmark = pytest.mark.slow

E_P = 0.352268


@pytest.fixture(scope="module")
def crossings():
    found = {}

    def get(n: int):
        if n not in found:
            found[n] = locate_crossing(n)[0]
        return found[n]

    return get


def _h_level(n: int, hbar: float, sign: int):
    guess = wkb_level(n, hbar, sign).value
    return find_level(guess, ProblemSpec.h_form(hbar), label=BranchLabel.perturbative(n, sign))


def test_twelve_levels_match_oracle(k0):
    reference = certified_oracle(0.0, 400).levels[:12]
    assert reference[0].real == pytest.approx(K0_LEVELS[0], abs=1e-10)
    for value in reference:
        pair = find_level(value, k0)
        assert abs(pair.value - value) < 1e-7


@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0, 2.0, 5.0])
def test_levels_real_and_positive(alpha):
    spec = ProblemSpec.k_form(alpha)
    below = [e for e in certified_oracle(alpha, 200).levels if e.real < 12.0]
    assert below
    for value in below:
        pair = find_level(value, spec)
        assert abs(pair.value.imag) < 1e-8
        assert pair.value.real > 0


@pytest.mark.parametrize("hbar", [0.8, 1.5])
def test_scaling_covariance(hbar):
    alpha, factor = scale_h_to_alpha(hbar)
    k_spec = ProblemSpec.k_form(alpha)
    h_spec = ProblemSpec.h_form(hbar)
    for guess in lowest_levels(k_spec, 6, 200):
        k_level = find_level(guess, k_spec).value
        h_level = find_level(factor * guess, h_spec).value
        assert abs(h_level - factor * k_level) < 1e-7 * max(1.0, abs(h_level))


def test_exceptional_energy():
    assert find_Ep(EP_BRACKET) == pytest.approx(E_P, abs=1e-5)


@pytest.mark.parametrize("n", [0, 1, 2])
def test_semiclassical_law(n):
    ratios = []
    for hbar in (0.08, 0.04, 0.02):
        plus = _h_level(n, hbar, 1)
        minus = _h_level(n, hbar, -1)
        assert minus.value == pytest.approx(plus.value.conjugate(), abs=1e-9)
        leading = -1j * 2.0 / (3.0 * math.sqrt(3.0)) + cmath.exp(1j * math.pi / 4) * 3.0**0.25 * (2 * n + 1) * hbar
        ratios.append(abs(plus.value - leading) / hbar**2)
    for coarse, fine in zip(ratios, ratios[1:]):
        assert 0.5 < fine / coarse < 1.5


def test_ground_correction_size():
    for hbar in (0.05, 0.1):
        err = abs(_h_level(0, hbar, 1).value - wkb_level(0, hbar, 1).value)
        assert 0.15 < err / hbar**2 < 0.35


@pytest.mark.parametrize("n", [8, 9, 10, 11])
def test_node_birth_table(n):
    h_p, e_p, error = TABLE1[n]
    record = find_node_birth(n)
    low, high = record.bracket
    assert high / low <= SCAN_RATIO + 1e-9
    assert record.h_p == pytest.approx(h_p, rel=2e-3)
    assert abs(record.E_p - e_p) <= error
    ratio = trend_ratios([(record.h_p, record.E_p)], E_P)[0]
    assert abs(ratio) < 10.0


@pytest.mark.parametrize("n", [0, 1])
def test_crossing(crossings, n):
    record = crossings(n)
    assert record.E_n_c > 0
    assert 0.45 <= record.sqrt_exponent_fit <= 0.55
    assert record.bracket_agreement < 1e-6
    assert selection_rule_report(n, record).passed


@pytest.mark.parametrize("n", [0, 1])
def test_monodromy(crossings, n):
    record = crossings(n)
    report = monodromy_check(n, 0.1 * record.h_n, record)
    assert report.passed, [p.name for p in report.paths if not p.passed]
    upper = next(p for p in report.paths if p.name == f"E_{2 * n} upper")
    assert upper.target_label == f"E_{n}^+"
    assert upper.end.imag < 0


@pytest.mark.parametrize("n", [0, 1])
def test_critical_overlap_vanishes(crossings, n):
    report = critical_overlap(n, crossings(n), deltas=(4e-3, 2e-3, 1e-3))
    assert report.passed, report.violations


@pytest.mark.parametrize("n", [0, 1])
@pytest.mark.parametrize("hbar", [2.0, 3.0])
def test_imaginary_node_dichotomy(n, hbar):
    spec = ProblemSpec.h_form(hbar)
    even_guess, odd_guess = lowest_levels(spec, 2 * n + 2, 200)[2 * n:]
    even = node_summary(find_level(even_guess, spec))
    odd = node_summary(find_level(odd_guess, spec))
    assert not even.has_imaginary_node
    assert odd.has_imaginary_node


@pytest.mark.parametrize("alpha", [0.0, 1.0, 5.0])
def test_confinement(alpha):
    spec = ProblemSpec.k_form(alpha)
    for value in certified_oracle(alpha, 200).levels[:7]:
        pair = find_level(value, spec)
        report = check_confinement(locate_zeros(pair), spec, energy=pair.value)
        assert report.passed, report.violations


@pytest.mark.parametrize("n", [0, 1])
@pytest.mark.parametrize("sign", [1, -1])
def test_axis_and_flux_for_complex_levels(n, sign):
    pair = _h_level(n, 0.1, sign)
    assert check_zero_free_axis(pair).passed
    flux = loeffel_martin_identity(pair)
    assert flux.max_relative_residual < 1e-7
    assert flux.tail_converged
    assert check_zero_asymptotics(pair).passed


def test_arc_endpoint_matches_direct_level():
    trace, energy = arc_endpoint_level(0, 0.1, 1)
    assert not trace.truncated
    assert str(energy.branch) == "E_0^-"
    assert energy.value.imag > 0
    direct = _h_level(0, 0.1, -1)
    assert np.isclose(energy.value, direct.value, atol=1e-6)
