"""Continuation of levels in hbar and alpha, crossings, monodromy and node births.

Levels are followed along a ``ParameterPath`` by a predictor-corrector loop:
quadratic extrapolation in the path parameter t, then Muller polish at the
new parameter. Branch labels are carried along and never re-derived from
values.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from pydantic import ValidationError
from scipy.optimize import brentq, minimize_scalar

from pt_double_well.core.eigensolver import (
    Eigenpair,
    MismatchFunction,
    assemble_eigenpair,
    find_level,
    polish_level,
)
from pt_double_well.core.error_handling import solver_logger
from pt_double_well.core.model import (
    ParameterKind,
    ParameterPath,
    continuation_path_alpha,
    imaginary_turning_ordinate,
)
from pt_double_well.core.oracle import lowest_levels, oracle_spectrum
from pt_double_well.core.semiclassics import wkb_level
from pt_double_well.core.settings import Settings, get_settings
from pt_double_well.core.verify import p_overlap
from pt_double_well.core.zerolab import (
    assign_classes,
    count_zeros,
    default_region,
    ladder_zeros,
    locate_zeros,
    node_summary,
)
from pt_double_well.exceptions import (
    BracketError,
    ConvergenceError,
    InvalidParameterError,
    PtdwError,
)
from pt_double_well.models.problem import (
    BranchLabel,
    ComplexEnergy,
    HamiltonianForm,
    ProblemSpec,
)
from pt_double_well.models.records import (
    AnnotationKind,
    BranchTrace,
    CheckReport,
    CrossingRecord,
    MonodromyPath,
    MonodromyReport,
    NodeBirthRecord,
    ParameterKindName,
    TraceAnnotation,
    TraceSample,
    ZeroClass,
)
from pt_double_well.tasks.worker_pool import WorkerPool
from pt_double_well.utils.complex_utils import Rectangle

logger = logging.getLogger(__name__)

MIN_STEP = 1e-7
SEGMENT_STEP = 0.02
BASIN_FRACTION = 0.5
BOUND_FACTOR = 10.0
REAL_THRESHOLD = 1e-8
BRACKET_WIDTH = 2e-8
AGREEMENT_WARNING = 1e-4
FIT_DELTAS = tuple(1e-3 * 2.0**-k for k in range(5))
OVERLAP_DELTAS = (0.1, 0.05, 0.025)
OVERLAP_LIMIT = 1e-4
NODE_BIRTH_SCAN = (0.008, 0.12)
SCAN_RATIO = 1.1

# n -> (h_n^p, E_n^p, error of E_n^p)
TABLE1: dict[int, tuple[float, float, float]] = {
    8: (0.043835, 0.3519, 0.0010),
    9: (0.030683, 0.3514, 0.0011),
    10: (0.023605, 0.3518, 0.0013),
    11: (0.013060, 0.3522, 0.0002),
}

StopCondition = Callable[[complex, complex], bool]


def spec_at(base: ProblemSpec, value: complex, kind: ParameterKind) -> ProblemSpec:
    """``base`` at another parameter value, with full sector validation.

    Alpha arcs run with the continuation flag, since they leave the
    analyticity sector on purpose.

    Raises:
        InvalidParameterError: the value is not admissible
    """
    expected = HamiltonianForm.H if kind is ParameterKind.HBAR else HamiltonianForm.K
    if base.form is not expected:
        raise InvalidParameterError(f"a {kind.value} path needs a {expected.value}-form problem")
    data = base.model_dump()
    data["hbar" if kind is ParameterKind.HBAR else "alpha"] = complex(value)
    if kind is ParameterKind.ALPHA:
        data["continuation"] = True
    try:
        return ProblemSpec.model_validate(data)
    except ValidationError as e:
        raise InvalidParameterError(
            f"{kind.value}={value} is not admissible",
            details={"value": str(value)},
        ) from e


def _predict(history: list[tuple[float, complex]], t: float) -> complex:
    pts = history[-3:]
    if len(pts) == 1:
        return pts[0][1]
    if len(pts) == 2:
        (t0, e0), (t1, e1) = pts
        return e1 + (e1 - e0) * (t - t1) / (t1 - t0)
    total = 0j
    for i, (ti, ei) in enumerate(pts):
        weight = 1.0
        for j, (tj, _) in enumerate(pts):
            if j != i:
                weight *= (t - tj) / (ti - tj)
        total += weight * ei
    return total


class LevelTracer:
    """Predictor-corrector continuation of one level along a parameter path."""

    def __init__(
        self,
        start: Eigenpair,
        path: ParameterPath,
        *,
        node_summaries: bool = False,
        stop: StopCondition | None = None,
        settings: Settings | None = None,
        pool: WorkerPool | None = None,
    ) -> None:
        if abs(start.spec.parameter - path.start) > 1e-12 * max(1.0, abs(path.start)):
            raise InvalidParameterError(
                f"path starts at {path.start}, the level is at {start.spec.parameter}"
            )
        self.start = start
        self.path = path
        self.node_summaries = node_summaries
        self.stop = stop
        self.settings = settings or get_settings()
        self.pool = pool
        self.label = start.energy.branch
        self.last_mismatch: MismatchFunction | None = None
        self.last_energy = start.value
        for t in np.linspace(0.0, 1.0, 9):
            spec_at(start.spec, path.at(float(t)), path.kind)

    def _initial_step(self) -> float:
        if self.path.is_arc:
            return math.radians(self.settings.arc_step_degrees) / max(abs(self.path.sweep), 1e-12)
        return SEGMENT_STEP

    def final_pair(self) -> Eigenpair:
        """Eigenpair at the last accepted sample."""
        if self.last_mismatch is None:
            return self.start
        return assemble_eigenpair(self.last_mismatch, self.last_energy, self.label)

    def run(self) -> BranchTrace:
        cfg = self.settings
        kind = ParameterKindName.ALPHA_ARC if self.path.kind is ParameterKind.ALPHA else ParameterKindName.HBAR
        e0 = self.start.value
        trace = BranchTrace(
            parameter_kind=kind,
            samples=[TraceSample(param=self.path.at(0.0), energy=ComplexEnergy(value=e0, branch=self.label))],
        )
        history: list[tuple[float, complex]] = [(0.0, e0)]
        bound = BOUND_FACTOR * max(abs(e0), 1.0)
        t, dt = 0.0, self._initial_step()
        accepted = 0
        while t < 1.0 - 1e-12:
            if dt < MIN_STEP:
                trace.truncated = True
                trace.diagnostics["reason"] = "step size underflow"
                trace.diagnostics["t"] = t
                logger.warning("Trace of %s truncated at t=%.6f", self.label, t)
                break
            dt = min(dt, 1.0 - t)
            t_new = t + dt
            param = self.path.at(t_new)
            e_prev = history[-1][1]
            e_pred = _predict(history, t_new)
            trust = cfg.trust_fraction * max(abs(e_prev), 0.1)
            try:
                mf = MismatchFunction(
                    spec_at(self.start.spec, param, self.path.kind),
                    energy_scale=max(12.0, 2.0 * abs(e_pred)),
                    settings=cfg,
                    pool=self.pool,
                )
                e_new, _, _ = polish_level(mf, e_pred, cfg)
            except PtdwError as exc:
                trace.rejected_steps += 1
                solver_logger.log_step_rejected(param, dt, str(exc))
                dt *= 0.25
                continue
            if abs(e_new - e_pred) > BASIN_FRACTION * cfg.basin_radius:
                trace.rejected_steps += 1
                solver_logger.log_step_rejected(param, dt, "basin escape")
                dt *= 0.25
                continue
            if abs(e_new - e_pred) > 0.2 * trust or abs(e_new - e_prev) > 0.2 * trust:
                trace.rejected_steps += 1
                solver_logger.log_step_rejected(param, dt, "trust radius")
                dt *= 0.5
                continue
            if self.stop is not None and self.stop(param, e_new):
                trace.diagnostics["stopped_at"] = {"re": param.real, "im": param.imag}
                break

            sample = TraceSample(param=param, energy=ComplexEnergy(value=e_new, branch=self.label), step=dt)
            accepted += 1
            if self.node_summaries and accepted % cfg.node_summary_every == 0:
                try:
                    sample.node_summary = node_summary(assemble_eigenpair(mf, e_new, self.label), pool=self.pool)
                except PtdwError as exc:
                    trace.diagnostics.setdefault("node_summary_failures", []).append(str(exc))
            trace.samples.append(sample)
            solver_logger.log_trace_step(param, e_new, dt)
            history.append((t_new, e_new))
            self.last_mismatch, self.last_energy = mf, e_new
            t = t_new
            if abs(e_new) > bound:
                trace.diagnostics["unbounded"] = True
                logger.warning("|E| exceeded %.3g along the trace of %s", bound, self.label)
                break
            if abs(e_new - e_prev) < 0.05 * trust:
                dt *= 1.5
        trace.diagnostics["max_abs_energy"] = max(abs(e) for e in trace.energies)
        return trace


def trace_level(
    start: Eigenpair,
    path: ParameterPath,
    *,
    node_summaries: bool = False,
    stop: StopCondition | None = None,
    settings: Settings | None = None,
    pool: WorkerPool | None = None,
) -> BranchTrace:
    """Continue ``start`` along ``path``; see ``LevelTracer``."""
    return LevelTracer(
        start, path, node_summaries=node_summaries, stop=stop, settings=settings, pool=pool
    ).run()


def hbar_path(start: float, end: float) -> ParameterPath:
    return ParameterPath.segment(ParameterKind.HBAR, start, end)


def arc_endpoint_level(
    n: int,
    hbar: float,
    sign: int,
    *,
    settings: Settings | None = None,
    pool: WorkerPool | None = None,
) -> tuple[BranchTrace, ComplexEnergy]:
    """Continue the K-form level n from alpha = hbar^(-4/5) along the sign arc.

    The arc through the upper half plane (sign +1) ends on E_n^-(hbar), the
    lower one on E_n^+(hbar), after scaling by hbar^(6/5).
    """
    alpha0 = hbar ** (-0.8)
    spec = ProblemSpec.k_form(alpha0)
    guess = lowest_levels(spec, n + 1)[n]
    start = find_level(guess, spec, label=BranchLabel.large_hbar(n), settings=settings)
    trace = trace_level(start, continuation_path_alpha(hbar, sign), settings=settings, pool=pool)
    if trace.truncated:
        raise ConvergenceError(
            f"arc continuation of level {n} stopped early",
            details=trace.diagnostics,
        )
    energy = hbar**1.2 * trace.final.energy.value
    return trace, ComplexEnergy(value=energy, branch=BranchLabel.perturbative(n, -sign))


def _pt_function(hbar: float, settings: Settings, pool: WorkerPool | None, scale: float) -> MismatchFunction:
    return MismatchFunction(ProblemSpec.h_form(hbar), energy_scale=max(12.0, 2.0 * scale), settings=settings, pool=pool)


def real_roots(
    hbar: float,
    window: tuple[float, float],
    *,
    samples: int | None = None,
    settings: Settings | None = None,
    pool: WorkerPool | None = None,
) -> list[float]:
    """Real levels of the H-form in ``window`` from sign changes of the real mismatch."""
    cfg = settings or get_settings()
    mf = _pt_function(hbar, cfg, pool, max(abs(window[0]), abs(window[1])))
    lo, hi = window
    count = samples or max(16, math.ceil((hi - lo) / (0.2 * hbar)))
    grid = np.linspace(lo, hi, count + 1)
    values = mf.pt_mismatch(grid)
    roots = []
    for k in range(count):
        if values[k] == 0:
            roots.append(float(grid[k]))
        elif values[k] * values[k + 1] < 0:
            roots.append(float(brentq(lambda e: float(mf.pt_mismatch([e])[0]), grid[k], grid[k + 1], xtol=1e-14)))
    return roots


@dataclass
class _RealWindow:
    sign: float
    center: float
    half_width: float


class CrossingLocator:
    """Two-sided bisection for the crossing h_n of E_n^+/- into E_2n, E_2n+1."""

    def __init__(self, n: int, *, settings: Settings | None = None, pool: WorkerPool | None = None) -> None:
        self.n = n
        self.settings = settings or get_settings()
        self.pool = pool

    def _mf(self, hbar: float, scale: float) -> MismatchFunction:
        return _pt_function(hbar, self.settings, self.pool, scale)

    def _window(self, hbar: float, level: float) -> _RealWindow:
        """Window around the real pair containing ``level`` (the lower one, E_2n)."""
        spread = 2.0 * hbar
        roots = real_roots(hbar, (level - spread, level + 2.0 * spread), settings=self.settings, pool=self.pool)
        if not roots:
            raise BracketError(f"no real level near {level} at hbar={hbar}")
        k = min(range(len(roots)), key=lambda i: abs(roots[i] - level))
        if k + 1 >= len(roots):
            raise BracketError(f"no partner above the real level {roots[k]} at hbar={hbar}")
        lower, upper = roots[k], roots[k + 1]
        center = 0.5 * (lower + upper)
        half = max(0.5 * hbar, 0.75 * (upper - lower))
        outside = [r for r in roots if r < lower or r > upper]
        if outside:
            half = min(half, 0.9 * min(abs(r - center) for r in outside))
        mf = self._mf(hbar, center + half)
        sign = 1.0 if mf.pt_mismatch([center - half])[0] > 0 else -1.0
        return _RealWindow(sign=sign, center=center, half_width=half)

    def _real_minimum(self, hbar: float, window: _RealWindow) -> tuple[float, float]:
        """(argmin, min) of sign * f over the window."""
        mf = self._mf(hbar, window.center + window.half_width)
        result = minimize_scalar(
            lambda e: window.sign * float(mf.pt_mismatch([e])[0]),
            bounds=(window.center - window.half_width, window.center + window.half_width),
            method="bounded",
            options={"xatol": 1e-12},
        )
        return float(result.x), float(result.fun)

    def _complex_level(self, hbar: float, guess: complex) -> complex | None:
        mf = self._mf(hbar, abs(guess))
        try:
            energy, _, _ = polish_level(mf, guess, self.settings)
        except ConvergenceError:
            return None
        if abs(energy - guess) > self.settings.basin_radius:
            return None
        return energy

    def _pair_roots(self, hbar: float, window: _RealWindow) -> tuple[float, float]:
        argmin, value = self._real_minimum(hbar, window)
        if value >= 0:
            raise BracketError(f"no real pair at hbar={hbar}")
        mf = self._mf(hbar, window.center + window.half_width)

        def f(e: float) -> float:
            return float(mf.pt_mismatch([e])[0])

        lo, hi = window.center - window.half_width, window.center + window.half_width
        return (
            float(brentq(f, lo, argmin, xtol=1e-14)),
            float(brentq(f, argmin, hi, xtol=1e-14)),
        )

    def refine(self, below: BranchTrace, above: BranchTrace) -> CrossingRecord:
        h_lo = below.final.param.real
        e_lo = below.final.energy.value
        h_hi = above.final.param.real
        e_hi = above.final.energy.value.real
        if not h_lo < h_hi:
            raise BracketError(
                f"traces do not bracket a crossing: complex up to {h_lo}, real down to {h_hi}",
                details={"below": h_lo, "above": h_hi},
            )
        window = self._window(h_hi, e_hi)

        # Complex side: the largest hbar with a non-real level.
        a, b, guess = h_lo, h_hi, e_lo
        while b - a > BRACKET_WIDTH:
            mid = 0.5 * (a + b)
            level = self._complex_level(mid, guess)
            if level is not None and abs(level.imag) > REAL_THRESHOLD:
                a, guess = mid, level
            else:
                b = mid
        bracket_below = (a, b)
        solver_logger.log_bracket("crossing", a, b)

        # Real side: the smallest hbar with a real pair in the window.
        a, b = h_lo, h_hi
        e_c = window.center
        while b - a > BRACKET_WIDTH:
            mid = 0.5 * (a + b)
            argmin, value = self._real_minimum(mid, window)
            if value < 0:
                b, e_c = mid, argmin
                window = _RealWindow(window.sign, argmin, window.half_width)
            else:
                a = mid
        bracket_above = (a, b)
        solver_logger.log_bracket("crossing", a, b)

        h_below = 0.5 * sum(bracket_below)
        h_above = 0.5 * sum(bracket_above)
        agreement = abs(h_below - h_above)
        if agreement > AGREEMENT_WARNING:
            logger.warning(
                "Crossing brackets disagree by %.3e (n=%d): another singularity may intervene",
                agreement, self.n,
            )
        h_n = 0.5 * (h_below + h_above)

        gaps = []
        last_pair: tuple[float, float] | None = None
        for delta in FIT_DELTAS:
            e1, e2 = self._pair_roots(h_n + delta, window)
            gaps.append(e2 - e1)
            last_pair = (e1, e2)
        exponent = float(np.polyfit(np.log(FIT_DELTAS), np.log(gaps), 1)[0])

        nodes: list[complex] = []
        if last_pair is not None:
            nodes = self._critical_nodes(h_n + FIT_DELTAS[-1], last_pair[0])
        return CrossingRecord(
            n=self.n,
            h_n=h_n,
            E_n_c=e_c,
            sqrt_exponent_fit=exponent,
            critical_node_set=nodes,
            bracket_below=bracket_below,
            bracket_above=bracket_above,
            bracket_agreement=agreement,
            fit_deltas=list(FIT_DELTAS),
            fit_gaps=gaps,
        )

    def _critical_nodes(self, hbar: float, energy: float) -> list[complex]:
        mf = self._mf(hbar, energy)
        try:
            pair = assemble_eigenpair(mf, complex(energy))
            zeros = locate_zeros(pair, pool=self.pool)
        except PtdwError as exc:
            logger.warning("Critical node set unavailable: %s", exc)
            return []
        classified = assign_classes(zeros, complex(energy), pair.spec)
        return [r.position for r in classified if r.zero_class in (ZeroClass.NODE_PLUS, ZeroClass.NODE_MINUS)]


def detect_crossing(
    below: BranchTrace,
    above: BranchTrace,
    *,
    n: int,
    settings: Settings | None = None,
    pool: WorkerPool | None = None,
) -> CrossingRecord:
    """Refine h_n between a non-real trace from below and a real trace from above.

    Raises:
        BracketError: the traces do not bracket a crossing, or no real pair is found
    """
    return CrossingLocator(n, settings=settings, pool=pool).refine(below, above)


def crossing_traces(
    n: int,
    *,
    h_small: float = 0.05,
    h_large: float = 1.0,
    settings: Settings | None = None,
    pool: WorkerPool | None = None,
) -> tuple[BranchTrace, BranchTrace]:
    """E_n^+ traced up from h_small until it turns real, E_2n traced down from h_large until it turns complex."""
    cfg = settings or get_settings()
    seed = wkb_level(n, h_small, 1)
    start = find_level(seed.value, ProblemSpec.h_form(h_small), label=seed.branch,
                       check_simplicity=False, settings=cfg)

    def turned_real(_: complex, e: complex) -> bool:
        return abs(e.imag) < 1e-3 * max(abs(e), 0.1)

    below = trace_level(start, hbar_path(h_small, h_large), stop=turned_real, settings=cfg, pool=pool)

    spec_hi = ProblemSpec.h_form(h_large)
    levels = oracle_spectrum(spec_hi, settings=cfg)
    if len(levels) <= 2 * n:
        raise BracketError(f"oracle gave {len(levels)} levels at hbar={h_large}")
    top = find_level(levels[2 * n].value, spec_hi, label=BranchLabel.large_hbar(2 * n), settings=cfg)

    def turned_complex(_: complex, e: complex) -> bool:
        return abs(e.imag) > REAL_THRESHOLD * 100

    above = trace_level(top, hbar_path(h_large, h_small), stop=turned_complex, settings=cfg, pool=pool)
    return below, above


def locate_crossing(
    n: int,
    *,
    h_small: float = 0.05,
    h_large: float = 1.0,
    settings: Settings | None = None,
    pool: WorkerPool | None = None,
) -> tuple[CrossingRecord, BranchTrace, BranchTrace]:
    """Trace both sides of crossing n between h_small and h_large and refine it."""
    below, above = crossing_traces(n, h_small=h_small, h_large=h_large, settings=settings, pool=pool)
    record = detect_crossing(below, above, n=n, settings=settings, pool=pool)
    for trace in (below, above):
        trace.annotations.append(
            TraceAnnotation(kind=AnnotationKind.CROSSING, parameter=record.h_n, energy=record.E_n_c)
        )
    return record, below, above


def _level_at(hbar: complex, guess: complex, label: BranchLabel, settings: Settings) -> Eigenpair:
    spec = ProblemSpec.h_form(hbar)
    return find_level(guess, spec, label=label, check_simplicity=False, settings=settings)


def half_circle_targets(n: int, plus: complex) -> dict[str, tuple[complex, str]]:
    """Labelled landing point of each half-circle around h_n.

    Above the cut E_2n continues to E_n^+ and E_2n+1 to E_n^-; below the cut
    the members swap. E_n^+ is the member with Im E < 0.
    """
    if plus.imag > 0:
        raise InvalidParameterError(f"E_{n}^+ must have Im E <= 0, got {plus}")
    upper = (plus, f"E_{n}^+")
    lower = (plus.conjugate(), f"E_{n}^-")
    return {
        f"E_{2 * n} upper": upper,
        f"E_{2 * n} lower": lower,
        f"E_{2 * n + 1} upper": lower,
        f"E_{2 * n + 1} lower": upper,
    }


def half_circle_paths(
    n: int,
    plus: complex,
    starts: dict[str, complex],
    ends: dict[str, complex],
    tolerance: float,
) -> list[MonodromyPath]:
    """Compare each half-circle endpoint with its labelled target, never the nearest member."""
    paths = []
    for name, (target, label) in half_circle_targets(n, plus).items():
        end = ends[name]
        paths.append(MonodromyPath(
            name=name, start=starts[name], end=end, target=target, target_label=label,
            mismatch=abs(end - target), passed=abs(end - target) < tolerance,
        ))
    return paths


def monodromy_check(
    n: int,
    radius: float,
    crossing: CrossingRecord,
    *,
    tolerance: float = 1e-6,
    settings: Settings | None = None,
    pool: WorkerPool | None = None,
) -> MonodromyReport:
    """Continue E_2n and E_2n+1 around h_n on half, full and double circles.

    E_n^+ is the member of the conjugate pair with Im E < 0.
    """
    cfg = settings or get_settings()
    h = crossing.h_n
    locator = CrossingLocator(n, settings=cfg, pool=pool)
    window = locator._window(h + radius, crossing.E_n_c)
    e_even, e_odd = locator._pair_roots(h + radius, window)
    even = _level_at(h + radius, e_even, BranchLabel.large_hbar(2 * n), cfg)
    odd = _level_at(h + radius, e_odd, BranchLabel.large_hbar(2 * n + 1), cfg)

    gap = abs(e_odd - e_even)
    plus = _level_at(h - radius, crossing.E_n_c - 1j * max(gap, 1e-3), BranchLabel.perturbative(n, 1), cfg).value
    if plus.imag > 0:
        plus = plus.conjugate()

    def around(pair: Eigenpair, sweep: float) -> complex:
        path = ParameterPath.arc(ParameterKind.HBAR, h, h + radius, sweep)
        trace = trace_level(pair, path, settings=cfg, pool=pool)
        if trace.truncated:
            raise ConvergenceError(f"monodromy arc (sweep {sweep:.3f}) stopped early", details=trace.diagnostics)
        return trace.final.energy.value

    report = MonodromyReport(n=n, h_n=h, radius=radius, tolerance=tolerance)
    starts: dict[str, complex] = {}
    ends: dict[str, complex] = {}
    for name, pair, sweep in (
        (f"E_{2 * n} upper", even, math.pi),
        (f"E_{2 * n} lower", even, -math.pi),
        (f"E_{2 * n + 1} upper", odd, math.pi),
        (f"E_{2 * n + 1} lower", odd, -math.pi),
    ):
        starts[name] = pair.value
        ends[name] = around(pair, sweep)
    report.paths.extend(half_circle_paths(n, plus, starts, ends, tolerance))

    full = around(even, 2.0 * math.pi)
    report.paths.append(MonodromyPath(
        name="full circle", start=even.value, end=full, target=odd.value,
        target_label=f"E_{2 * n + 1}", mismatch=abs(full - odd.value),
        passed=abs(full - odd.value) < tolerance,
    ))
    double = around(even, 4.0 * math.pi)
    report.paths.append(MonodromyPath(
        name="double circle", start=even.value, end=double, target=even.value,
        target_label=f"E_{2 * n}", mismatch=abs(double - even.value),
        passed=abs(double - even.value) < 0.1 * tolerance,
    ))
    return report


def selection_rule_report(
    n: int,
    crossing: CrossingRecord,
    *,
    offset: float = 0.02,
    pool: WorkerPool | None = None,
) -> CheckReport:
    """Node bookkeeping on both sides of h_n.

    Below: psi_n^+ has n nodes in C+ and psi_n^- has n nodes in C-.
    Above: psi_2n and psi_2n+1 both have 2n nodes off the imaginary axis.
    """
    cfg = get_settings()
    h = crossing.h_n
    violations: list[str] = []
    values: dict[str, float] = {}

    guess = crossing.E_n_c - 1j * 1e-2
    plus = _level_at(h - offset, guess, BranchLabel.perturbative(n, 1), cfg)
    minus = _level_at(h - offset, plus.value.conjugate(), BranchLabel.perturbative(n, -1), cfg)
    s_plus = node_summary(plus, pool=pool)
    s_minus = node_summary(minus, pool=pool)
    values.update(plus_n_plus=s_plus.n_plus, minus_n_minus=s_minus.n_minus)
    if s_plus.n_plus != n:
        violations.append(f"psi_{n}^+ has {s_plus.n_plus} nodes in C+")
    if s_minus.n_minus != n:
        violations.append(f"psi_{n}^- has {s_minus.n_minus} nodes in C-")

    locator = CrossingLocator(n, settings=cfg, pool=pool)
    window = locator._window(h + offset, crossing.E_n_c)
    for index, energy in zip((2 * n, 2 * n + 1), locator._pair_roots(h + offset, window), strict=True):
        pair = _level_at(h + offset, energy, BranchLabel.large_hbar(index), cfg)
        summary = node_summary(pair, pool=pool)
        values[f"level_{index}_nodes"] = float(summary.n_plus + summary.n_minus)
        if summary.n_plus + summary.n_minus != 2 * n:
            violations.append(f"psi_{index} has {summary.n_plus + summary.n_minus} nodes off the axis")
    return CheckReport(name="selection_rule", passed=not violations, values=values, violations=violations)


def critical_overlap(
    n: int,
    crossing: CrossingRecord,
    *,
    deltas: tuple[float, ...] = OVERLAP_DELTAS,
    limit: float = OVERLAP_LIMIT,
    settings: Settings | None = None,
    pool: WorkerPool | None = None,
) -> CheckReport:
    """P-overlaps of psi_2n and psi_2n+1 at h_n + delta, extrapolated to delta = 0.

    The overlap vanishes like sqrt(delta) at the crossing; a quadratic in
    sqrt(delta) through the samples gives the extrapolated value.
    """
    if len(deltas) < 3:
        raise InvalidParameterError("the overlap extrapolation needs at least three deltas")
    cfg = settings or get_settings()
    locator = CrossingLocator(n, settings=cfg, pool=pool)
    ordered = sorted(deltas, reverse=True)
    overlaps: dict[int, list[float]] = {2 * n: [], 2 * n + 1: []}
    for delta in ordered:
        h = crossing.h_n + delta
        window = locator._window(h, crossing.E_n_c)
        for index, energy in zip(overlaps, locator._pair_roots(h, window), strict=True):
            pair = _level_at(h, energy, BranchLabel.large_hbar(index), cfg)
            overlaps[index].append(p_overlap(pair).real)

    roots = np.sqrt(np.asarray(ordered))
    values: dict[str, float] = {}
    violations: list[str] = []
    for index, samples in overlaps.items():
        extrapolated = float(np.polyfit(roots, samples, 2)[-1])
        values[f"level_{index}_extrapolated"] = extrapolated
        for delta, value in zip(ordered, samples, strict=True):
            values[f"level_{index}_delta_{delta:g}"] = value
        if any(abs(b) >= abs(a) for a, b in zip(samples, samples[1:])):
            violations.append(f"|overlap| of psi_{index} does not decrease toward h_{n}")
        if abs(extrapolated) >= limit:
            violations.append(f"psi_{index} overlap extrapolates to {extrapolated:.2e}")
    return CheckReport(name="critical_overlap", passed=not violations, values=values, violations=violations)


def _right_half_count(pair: Eigenpair) -> int:
    box = default_region(pair)
    top = imaginary_turning_ordinate(pair.value.real, pair.spec) + 0.5
    half = Rectangle(0.02, box.re_max, box.im_min, min(top, box.im_max))
    return count_zeros(pair, half.closed_path())


class NodeBirthLocator:
    """Follows E_2n+1 in hbar and bisects on y~(E) - y*, y* the axis zero at the edge of Sigma(E)."""

    def __init__(
        self,
        n: int,
        *,
        energy_window: tuple[float, float] = (0.2, 0.5),
        settings: Settings | None = None,
        pool: WorkerPool | None = None,
    ) -> None:
        self.n = n
        self.energy_window = energy_window
        self.settings = settings or get_settings()
        self.pool = pool
        self._samples: list[tuple[float, float]] = []

    def identify(self, hbar: float) -> float:
        """E_2n+1 at hbar: the upper of the two real levels with n nodes in C+."""
        roots = real_roots(hbar, self.energy_window, settings=self.settings, pool=self.pool)
        matches = []
        for energy in roots:
            pair = _level_at(hbar, energy, BranchLabel(), self.settings)
            if _right_half_count(pair) == self.n:
                matches.append(energy)
        if len(matches) < 2:
            raise BracketError(
                f"found {len(matches)} real levels with {self.n} nodes in C+ at hbar={hbar}",
                details={"hbar": hbar, "roots": roots},
            )
        return max(matches[:2])

    def follow(self, h_from: float, e_from: float, h_to: float) -> None:
        """Trace the level between two hbar values and keep the samples for guesses."""
        start = _level_at(h_from, e_from, BranchLabel.large_hbar(2 * self.n + 1), self.settings)
        trace = trace_level(start, hbar_path(h_from, h_to), settings=self.settings, pool=self.pool)
        if trace.truncated:
            raise ConvergenceError(f"trace of E_{2 * self.n + 1} stopped early", details=trace.diagnostics)
        self._samples = sorted((s.param.real, s.energy.value.real) for s in trace.samples)

    def level(self, hbar: float) -> Eigenpair:
        hs = [s[0] for s in self._samples]
        es = [s[1] for s in self._samples]
        guess = float(np.interp(hbar, hs, es))
        pair = _level_at(hbar, guess, BranchLabel.large_hbar(2 * self.n + 1), self.settings)
        return pair

    @staticmethod
    def entering_zero(ordinates: list[float], top: float) -> float:
        """The axis zero y* compared with y~ = ``top``.

        Sigma(E) = {iy, y < y~} holds at most one zero of psi, so y* is the
        largest ordinate below y~. With none there, y* is the lowest zero above
        y~, the next one to enter, which keeps y~ - y* continuous in hbar.
        """
        inside = [y for y in ordinates if y < top]
        return max(inside) if inside else min(ordinates)

    def axis_zero(self, pair: Eigenpair) -> float:
        """Zero of psi on the imaginary axis that decides the node birth; see ``entering_zero``."""
        top = imaginary_turning_ordinate(pair.value.real, pair.spec)
        tol = max(self.settings.classification_tolerance, 1e-8)
        for extra in (1.5, 3.0):
            zeros = ladder_zeros(pair, y_min=top - 1.5, y_max=top + extra)
            on_axis = [r.position.imag for r in zeros if abs(r.position.real) < tol]
            if on_axis:
                return self.entering_zero(on_axis, top)
            logger.info("No axis zero up to y~+%.1f at E=%s, enlarging", extra, pair.value)
        raise BracketError(
            f"no zero of psi on the imaginary axis near y~={top:.4f}",
            details={"energy": str(pair.value)},
        )

    def functional(self, hbar: float) -> float:
        return self.functional_at(self.level(hbar))

    def functional_at(self, pair: Eigenpair) -> float:
        """y~(E) - y*; positive once the zero has entered Sigma(E)."""
        top = imaginary_turning_ordinate(pair.value.real, pair.spec)
        return top - self.axis_zero(pair)

    def locate(self, bracket: tuple[float, float]) -> NodeBirthRecord:
        lo, hi = bracket
        g_lo, g_hi = self.functional(lo), self.functional(hi)
        if g_lo * g_hi > 0:
            raise BracketError(
                f"no node birth between hbar={lo} and {hi}",
                details={"lower": lo, "upper": hi, "g_lower": g_lo, "g_upper": g_hi},
            )
        solver_logger.log_bracket("node_birth", lo, hi)
        h_p = float(brentq(self.functional, lo, hi, xtol=1e-10))
        e_p = self.level(h_p).value.real
        published = TABLE1.get(self.n)
        return NodeBirthRecord(
            n=self.n,
            h_p=h_p,
            E_p=e_p,
            bracket=(lo, hi),
            published_h_p=published[0] if published else None,
            published_E_p=published[1] if published else None,
            published_E_p_error=published[2] if published else None,
        )


def scan_grid(scan: tuple[float, float], ratio: float = SCAN_RATIO) -> list[float]:
    """Geometric hbar grid from the top of ``scan`` down to its bottom, steps at most ``ratio``."""
    lo, hi = scan
    if not 0.0 < lo < hi:
        raise InvalidParameterError(f"scan interval needs 0 < lower < upper, got {scan}")
    count = max(1, math.ceil(math.log(hi / lo) / math.log(ratio)))
    return [float(h) for h in np.geomspace(hi, lo, count + 1)]


def _scan_node_birth(locator: NodeBirthLocator, scan: tuple[float, float]) -> NodeBirthRecord:
    label = BranchLabel.large_hbar(2 * locator.n + 1)
    previous: tuple[float, float] | None = None
    for hbar in scan_grid(scan):
        try:
            energy = locator.identify(hbar)
            g = locator.functional_at(_level_at(hbar, energy, label, locator.settings))
        except (BracketError, ConvergenceError) as exc:
            if previous is None:
                logger.info("E_%d not identified at hbar=%.5f: %s", 2 * locator.n + 1, hbar, exc)
                continue
            break
        if previous is not None and previous[1] * g <= 0:
            upper = previous[0]
            locator.follow(hbar, energy, upper)
            return locator.locate((hbar, upper))
        previous = (hbar, g)
    raise BracketError(
        f"no node birth for n={locator.n} in hbar {scan}",
        details={"scan": list(scan), "last": previous[0] if previous else None},
    )


def find_node_birth(
    n: int,
    *,
    bracket: tuple[float, float] | None = None,
    crossing: CrossingRecord | None = None,
    scan: tuple[float, float] = NODE_BIRTH_SCAN,
    energy_window: tuple[float, float] = (0.2, 0.5),
    settings: Settings | None = None,
    pool: WorkerPool | None = None,
) -> NodeBirthRecord:
    """hbar at which psi_2n+1 acquires its imaginary node, and E_2n+1 there.

    With an explicit ``bracket`` the functional is solved inside it. With a
    ``crossing`` the level is followed upward from h_n in geometric steps.
    Otherwise ``scan`` is walked downward in geometric steps, identifying
    E_2n+1 afresh at each hbar, until the functional changes sign or the
    level stops being real. Published values are attached to the record for
    comparison only.

    Raises:
        BracketError: no sign change, or the level cannot be identified
    """
    if n < 0:
        raise InvalidParameterError(f"n must be non-negative, got {n}")
    locator = NodeBirthLocator(n, energy_window=energy_window, settings=settings, pool=pool)
    if bracket is not None:
        lo, hi = bracket
        locator.follow(lo, locator.identify(lo), hi)
        return locator.locate((lo, hi))
    if crossing is None:
        return _scan_node_birth(locator, scan)

    record = crossing
    h_start = record.h_n * 1.02
    locator_window = CrossingLocator(n, settings=locator.settings, pool=pool)
    window = locator_window._window(h_start, record.E_n_c)
    _, e_odd = locator_window._pair_roots(h_start, window)
    h_end = h_start * 1.1**25
    locator.follow(h_start, e_odd, h_end)
    previous = h_start
    g_prev = locator.functional(previous)
    for k in range(1, 26):
        current = h_start * 1.1**k
        g = locator.functional(current)
        if g_prev * g <= 0:
            return locator.locate((previous, current))
        previous, g_prev = current, g
    raise BracketError(
        f"no node birth for n={n} up to hbar={h_end:.4f}",
        details={"start": h_start, "end": h_end},
    )
