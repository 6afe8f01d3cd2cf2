"""Shooting eigensolver for the unified cubic problem.

Levels are zeros of the Wronskian mismatch W(E) = psi_L psi_R' - psi_L' psi_R
at the matching point z = 0, psi_L and psi_R being the WKB-seeded solutions
decaying along the left and right boundary rays. W is carried as a mantissa
and a log-scale; its phase drives the argument principle, and mantissas
rescaled to a common reference drive Muller's method.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING

import numpy as np
from numpy.typing import ArrayLike, NDArray

from pt_double_well.core.error_handling import solver_logger
from pt_double_well.core.model import ComplexArray, potential, turning_points
from pt_double_well.core.propagator import (
    PathSolution,
    WkbSeed,
    boundary_rays,
    propagate,
    propagate_endpoints,
    propagate_state,
    resolve_truncation,
    wkb_seed,
)
from pt_double_well.core.settings import Settings, get_settings
from pt_double_well.exceptions import (
    BasinEscapeError,
    ConvergenceError,
    InvalidParameterError,
    NonSimpleLevelError,
    PtdwError,
    WindingError,
)
from pt_double_well.models.problem import BranchLabel, ComplexEnergy, ProblemSpec
from pt_double_well.tasks.worker_pool import WorkerPool, pool_map
from pt_double_well.utils.complex_utils import Rectangle, wrapped_increments

if TYPE_CHECKING:
    from pt_double_well.models.records import NodeSummary

logger = logging.getLogger(__name__)

CHUNK = 8
EDGE_SPACING = 0.1
MAX_PHASE_STEP = 0.4
MAX_REFINEMENTS = 14
MAX_DEPTH = 12
NEAR_ZERO = 1e-7
MAX_EXPONENT = 700.0


@dataclass(frozen=True)
class MismatchValue:
    """W(E) at the matching point; the true value is mantissa * exp(log_scale)."""

    energy: complex
    psi_left: complex
    dpsi_left: complex
    psi_right: complex
    dpsi_right: complex
    log_left: float
    log_right: float

    @property
    def mantissa(self) -> complex:
        return self.psi_left * self.dpsi_right - self.dpsi_left * self.psi_right

    @property
    def log_scale(self) -> float:
        return self.log_left + self.log_right

    @property
    def scale(self) -> float:
        """|psi_L||psi_R'| + |psi_L'||psi_R| in mantissa units."""
        return abs(self.psi_left) * abs(self.dpsi_right) + abs(self.dpsi_left) * abs(self.psi_right)

    @property
    def relative(self) -> float:
        return abs(self.mantissa) / self.scale

    def scaled(self, reference_log: float) -> complex:
        """mantissa * exp(log_scale - reference_log), formed through the log-modulus."""
        if self.mantissa == 0:
            return 0j
        exponent = min(self.log_modulus - reference_log, MAX_EXPONENT)
        return self.mantissa / abs(self.mantissa) * math.exp(exponent)

    @property
    def log_modulus(self) -> float:
        return math.log(abs(self.mantissa)) + self.log_scale if self.mantissa != 0 else -math.inf


class MismatchFunction:
    """W(E) for one problem, with a fixed truncation radius and an evaluation cache.

    The cache is written only from the calling thread, after parallel chunks
    have been merged.
    """

    def __init__(
        self,
        spec: ProblemSpec,
        energy_scale: float = 12.0,
        *,
        settings: Settings | None = None,
        pool: WorkerPool | None = None,
    ) -> None:
        self.spec = spec
        self.settings = settings or get_settings()
        self.pool = pool
        self.truncation = resolve_truncation(spec, energy_scale, self.settings)
        (self.left_anchor, self.left_direction), (self.right_anchor, self.right_direction) = (
            boundary_rays(spec, self.truncation)
        )
        self.matching_point = 0j
        self._cache: dict[complex, MismatchValue] = {}

    @property
    def left_path(self) -> ComplexArray:
        return np.array([self.left_anchor, self.matching_point])

    @property
    def right_path(self) -> ComplexArray:
        return np.array([self.right_anchor, self.matching_point])

    def seeds(self, energy: complex) -> tuple[WkbSeed, WkbSeed]:
        tp = turning_points(energy, self.spec)
        if tp.degenerate:
            logger.warning("Mismatch requested at a caustic, E=%s", energy)
        left = wkb_seed(energy, self.spec, self.left_anchor, self.left_direction, self.settings)
        right = wkb_seed(energy, self.spec, self.right_anchor, self.right_direction, self.settings)
        return left, right

    def __call__(self, energy: complex) -> MismatchValue:
        e = complex(energy)
        cached = self._cache.get(e)
        if cached is not None:
            return cached
        value = self._evaluate_chunk([e])[0]
        self._cache[e] = value
        return value

    def evaluate_many(self, energies: ArrayLike) -> list[MismatchValue]:
        """Evaluate W at many energies, batching them through the integrator."""
        requested = [complex(e) for e in np.asarray(energies, dtype=complex).ravel()]
        todo = list(dict.fromkeys(e for e in requested if e not in self._cache))
        chunks = [todo[i : i + CHUNK] for i in range(0, len(todo), CHUNK)]
        results = pool_map(self.pool, self._evaluate_chunk, chunks)
        for chunk, values in zip(chunks, results, strict=True):
            for e, v in zip(chunk, values, strict=True):
                self._cache[e] = v
        return [self._cache[e] for e in requested]

    def _evaluate_chunk(self, energies: list[complex]) -> list[MismatchValue]:
        pairs = [self.seeds(e) for e in energies]
        pl, dpl, ll = propagate_endpoints([p[0] for p in pairs], self.left_path, self.spec, self.settings)
        pr, dpr, lr = propagate_endpoints([p[1] for p in pairs], self.right_path, self.spec, self.settings)
        return [
            MismatchValue(
                energy=e,
                psi_left=complex(pl[k]),
                dpsi_left=complex(dpl[k]),
                psi_right=complex(pr[k]),
                dpsi_right=complex(dpr[k]),
                log_left=float(ll[k]),
                log_right=float(lr[k]),
            )
            for k, e in enumerate(energies)
        ]

    def pt_mismatch(self, energies: ArrayLike) -> NDArray[np.float64]:
        """Real mismatch for real energies of a P_xT-symmetric problem.

        The left solution is the P_xT mirror of the right one, so
        W = 2 Re(conj(psi) psi') at z = 0 up to a positive factor. Returned
        normalized by 2|psi||psi'|; only the right half is propagated.
        """
        if not self.spec.is_pt_real:
            raise InvalidParameterError("pt_mismatch needs real hbar and real alpha")
        values = np.asarray(energies, dtype=float).ravel()
        chunks = [values[i : i + CHUNK] for i in range(0, len(values), CHUNK)]

        def run(chunk: NDArray[np.float64]) -> NDArray[np.float64]:
            seeds = [
                wkb_seed(complex(e), self.spec, self.right_anchor, self.right_direction, self.settings)
                for e in chunk
            ]
            psi, dpsi, _ = propagate_endpoints(seeds, self.right_path, self.spec, self.settings)
            return np.real(np.conj(psi) * dpsi) / (np.abs(psi) * np.abs(dpsi))

        return np.concatenate(pool_map(self.pool, run, chunks)) if chunks else np.array([])

    def derivative(self, energy: complex, step: float | None = None) -> tuple[complex, MismatchValue]:
        """Central difference dW/dE in the units of W(energy)'s mantissa."""
        e = complex(energy)
        h = step or 1e-6 * (1.0 + abs(e))
        center, plus, minus = self.evaluate_many([e, e + h, e - h])
        ref = center.log_scale
        return (plus.scaled(ref) - minus.scaled(ref)) / (2.0 * h), center


def mismatch(energy: complex, spec: ProblemSpec) -> complex:
    """W(E) as a plain complex number (overflows for very small hbar)."""
    value = MismatchFunction(spec, energy_scale=max(12.0, 2.0 * abs(energy)))(energy)
    return value.scaled(0.0)


@dataclass
class StateValues:
    """psi and psi' at points, as mantissas with per-point log-scales."""

    z: ComplexArray
    psi: ComplexArray
    dpsi: ComplexArray
    log: NDArray[np.float64]

    def values(self) -> tuple[ComplexArray, ComplexArray]:
        factor = np.exp(self.log)
        return self.psi * factor, self.dpsi * factor

    @property
    def log_derivative(self) -> ComplexArray:
        return self.dpsi / self.psi


@dataclass
class Eigenpair:
    """A converged level and its state on the complex plane.

    The state is ``gauge_right * psi_R`` for Re z >= 0 and
    ``gauge_left * psi_L`` for Re z < 0, each side measured relative to its
    log-scale at the matching point, so that psi(anchor) = 1.
    """

    energy: ComplexEnergy
    spec: ProblemSpec
    truncation: float
    left_seed: WkbSeed
    right_seed: WkbSeed
    left: PathSolution
    right: PathSolution
    gauge_left: complex
    gauge_right: complex
    anchor: complex
    residual: float
    anchor_shifted: bool = False
    node_summary: NodeSummary | None = None
    _settings: Settings = field(default_factory=get_settings, repr=False)

    @property
    def value(self) -> complex:
        return self.energy.value

    @property
    def gauge(self) -> complex:
        return self.gauge_right

    def with_gauge(self, factor: complex) -> Eigenpair:
        """Same state multiplied by ``factor``."""
        return replace(
            self,
            gauge_left=self.gauge_left * factor,
            gauge_right=self.gauge_right * factor,
        )

    def _side(self, right: bool) -> tuple[WkbSeed, PathSolution, complex]:
        if right:
            return self.right_seed, self.right, self.gauge_right
        return self.left_seed, self.left, self.gauge_left

    def _column(self, x: float, right: bool, targets: list[complex]) -> tuple[ComplexArray, ComplexArray, NDArray[np.float64]]:
        seed, axis, gauge = self._side(right)
        ref = axis.log_scale
        inside = (0.0 <= x <= axis.z[0].real) if right else (axis.z[0].real <= x <= 0.0)
        if inside:
            k = int(np.argmin(np.abs(axis.z - x)))
            start, psi0, dpsi0, log0 = axis.z[k], axis.psi[k], axis.dpsi[k], axis.log_scales[k]
        else:
            start, psi0, dpsi0, log0 = seed.anchor, seed.psi, seed.dpsi, 0.0
        path = [complex(start), complex(x, 0.0), *targets]
        sol = propagate_state(
            complex(psi0), complex(dpsi0), np.asarray(path), self.value, self.spec,
            log_scale=float(log0), spacing=None, settings=self._settings,
        )
        idx = sol.node_index[2:]
        return gauge * sol.psi[idx], gauge * sol.dpsi[idx], sol.log_scales[idx] - ref

    def evaluate(self, points: ArrayLike, pool: WorkerPool | None = None) -> StateValues:
        """psi and psi' at arbitrary points.

        Points are grouped by real part; each group is reached along the real
        axis from the decaying end of its half plane and then vertically.
        """
        pts = np.atleast_1d(np.asarray(points, dtype=complex)).ravel()
        groups: dict[tuple[bool, float, bool], list[int]] = {}
        for i, p in enumerate(pts):
            groups.setdefault((p.real >= 0.0, float(p.real), p.imag >= 0.0), []).append(i)
        keys = list(groups)

        def run(key: tuple[bool, float, bool]) -> tuple[ComplexArray, ComplexArray, NDArray[np.float64]]:
            right, x, _ = key
            order = sorted(groups[key], key=lambda i: abs(pts[i].imag))
            return self._column(x, right, [complex(pts[i]) for i in order])

        results = pool_map(pool, run, keys)
        psi = np.empty(len(pts), dtype=complex)
        dpsi = np.empty(len(pts), dtype=complex)
        logs = np.empty(len(pts))
        for key, (p, dp, lg) in zip(keys, results, strict=True):
            order = sorted(groups[key], key=lambda i: abs(pts[i].imag))
            psi[order], dpsi[order], logs[order] = p, dp, lg
        return StateValues(z=pts, psi=psi, dpsi=dpsi, log=logs)

    def evaluate_one(self, z: complex) -> tuple[complex, complex]:
        values = self.evaluate([z])
        psi, dpsi = values.values()
        return complex(psi[0]), complex(dpsi[0])

    def trace_line(self, start: complex, end: complex, spacing: float = 0.01) -> StateValues:
        """Gauged psi and psi' sampled along the segment start -> end."""
        first = self.evaluate([start])
        sol = propagate_state(
            complex(first.psi[0]), complex(first.dpsi[0]), np.array([start, end], dtype=complex),
            self.value, self.spec, log_scale=float(first.log[0]), spacing=spacing,
            settings=self._settings,
        )
        return StateValues(z=sol.z, psi=sol.psi, dpsi=sol.dpsi, log=sol.log_scales)

    def real_axis(self) -> tuple[NDArray[np.float64], ComplexArray, ComplexArray]:
        """Gauged psi and psi' on the stored real-axis samples, ordered by x."""
        lp, ldp = self.left.values()
        rp, rdp = self.right.values()
        x = np.concatenate([self.left.z.real, self.right.z.real[::-1][1:]])
        psi = np.concatenate([self.gauge_left * lp, (self.gauge_right * rp)[::-1][1:]])
        dpsi = np.concatenate([self.gauge_left * ldp, (self.gauge_right * rdp)[::-1][1:]])
        return x, psi, dpsi


def _muller_step(
    x0: complex, x1: complex, x2: complex, f0: complex, f1: complex, f2: complex
) -> complex:
    norm = max(abs(f0), abs(f1), abs(f2))
    if norm > 0 and math.isfinite(norm):
        f0, f1, f2 = f0 / norm, f1 / norm, f2 / norm
    h1, h2 = x1 - x0, x2 - x1
    d1, d2 = (f1 - f0) / h1, (f2 - f1) / h2
    a = (d2 - d1) / (h2 + h1)
    b = a * h2 + d2
    disc = cmath.sqrt(b * b - 4.0 * f2 * a)
    den = b + disc if abs(b + disc) >= abs(b - disc) else b - disc
    if den == 0:
        return x2 + 1e-3 * (1.0 + abs(x2))
    return x2 - 2.0 * f2 / den


def polish_level(
    mf: MismatchFunction, guess: complex, settings: Settings | None = None
) -> tuple[complex, int, MismatchValue]:
    """Muller iteration on W(E) from ``guess`` until |dE| < tol (1 + |E|).

    Raises:
        ConvergenceError: no convergence within the iteration budget
    """
    cfg = settings or mf.settings
    g = complex(guess)
    delta = 1e-3 * (1.0 + abs(g))
    xs = [g - delta, g + delta, g]
    vals = mf.evaluate_many(xs)
    tol = cfg.muller_tolerance
    for iteration in range(1, cfg.muller_max_iterations + 1):
        ref = max((v.log_modulus for v in vals if math.isfinite(v.log_modulus)), default=0.0)
        fs = [v.scaled(ref) for v in vals]
        if vals[-1].mantissa == 0:
            return xs[-1], iteration, vals[-1]
        x3 = _muller_step(*xs, *fs)
        if not cmath.isfinite(x3):
            raise ConvergenceError(
                f"Muller step from {xs[-1]} is not finite",
                details={"guess": str(g), "last": str(xs[-1]), "values": [str(f) for f in fs]},
            )
        v3 = mf(x3)
        step = abs(x3 - xs[-1])
        xs = [xs[1], xs[2], x3]
        vals = [vals[1], vals[2], v3]
        if step < tol * (1.0 + abs(x3)):
            solver_logger.log_level_converged(x3, iteration, v3.relative)
            return x3, iteration, v3
    raise ConvergenceError(
        f"Muller iteration from {g} did not converge",
        details={"guess": str(g), "last": str(xs[-1]), "iterations": cfg.muller_max_iterations},
    )


def simplicity(mf: MismatchFunction, energy: complex) -> float:
    """Relative |dW/dE| (1 + |E|) / scale(W); small values flag a double zero."""
    deriv, center = mf.derivative(energy)
    return abs(deriv) * (1.0 + abs(energy)) / center.scale


def assemble_eigenpair(
    mf: MismatchFunction,
    energy: complex,
    label: BranchLabel | None = None,
    spacing: float = 0.02,
) -> Eigenpair:
    """Propagate both halves with samples and fix the gauge psi(anchor) = 1."""
    spec = mf.spec
    left_seed, right_seed = mf.seeds(energy)
    left = propagate(left_seed, [left_seed.anchor, mf.matching_point], spec=spec,
                     spacing=spacing, settings=mf.settings)
    right = propagate(right_seed, [right_seed.anchor, mf.matching_point], spec=spec,
                      spacing=spacing, settings=mf.settings)
    pl, dpl, _ = left.endpoint()
    pr, dpr, _ = right.endpoint()
    kappa = max(1.0, abs(complex(potential(mf.matching_point, spec)) - energy) ** 0.5 / abs(spec.hbar_eff))
    # Endpoint mantissas can sit far from 1; each side is divided by its own size first.
    size_l = max(abs(pl), abs(dpl) / kappa)
    size_r = max(abs(pr), abs(dpr) / kappa)
    pl, dpl, pr, dpr = pl / size_l, dpl / size_l, pr / size_r, dpr / size_r
    ratio = (size_l / size_r) * (
        (pr.conjugate() * pl + dpr.conjugate() * dpl / kappa**2) / (abs(pr) ** 2 + abs(dpr) ** 2 / kappa**2)
    )
    residual = abs(pl * dpr - dpl * pr) / (abs(pl) * abs(dpr) + abs(dpl) * abs(pr))
    pair = Eigenpair(
        energy=ComplexEnergy(value=energy, branch=label or BranchLabel()),
        spec=spec,
        truncation=mf.truncation,
        left_seed=left_seed,
        right_seed=right_seed,
        left=left,
        right=right,
        gauge_left=1.0 / ratio,
        gauge_right=1.0 + 0j,
        anchor=complex(spec.gauge_anchor),
        residual=residual,
        _settings=mf.settings,
    )
    return normalize_at_anchor(pair)


def normalize_at_anchor(pair: Eigenpair, max_shifts: int = 5) -> Eigenpair:
    """Rescale so psi(anchor) = 1, moving the anchor up the imaginary axis off a zero."""
    anchor = pair.anchor
    shifted = False
    for _ in range(max_shifts + 1):
        psi, dpsi = pair.evaluate_one(anchor)
        rate = max(1.0, abs(complex(potential(anchor, pair.spec)) - pair.value) ** 0.5 / abs(pair.spec.hbar_eff))
        if abs(psi) * rate > 1e-3 * abs(dpsi):
            normalized = pair.with_gauge(1.0 / psi)
            normalized.anchor = anchor
            normalized.anchor_shifted = shifted
            return normalized
        logger.warning("psi nearly vanishes at anchor %s, shifting the anchor", anchor)
        anchor += 0.1j
        shifted = True
    raise ConvergenceError(f"no usable gauge anchor near {pair.anchor}")


def find_level(
    energy_guess: complex,
    spec: ProblemSpec,
    *,
    mismatch_function: MismatchFunction | None = None,
    label: BranchLabel | None = None,
    check_simplicity: bool = True,
    settings: Settings | None = None,
) -> Eigenpair:
    """Converge a level from a nearby guess and assemble its eigenpair.

    Raises:
        ConvergenceError: no convergence after the iteration budget
        BasinEscapeError: converged farther than the basin radius from the guess
        NonSimpleLevelError: |dW/dE| below the simplicity floor
    """
    cfg = settings or get_settings()
    guess = complex(energy_guess)
    mf = mismatch_function or MismatchFunction(spec, energy_scale=max(12.0, 2.0 * abs(guess)), settings=cfg)
    energy, _, _ = polish_level(mf, guess, cfg)
    if abs(energy - guess) > cfg.basin_radius:
        solver_logger.log_basin_escape(guess, energy)
        raise BasinEscapeError(
            f"guess {guess} converged to {energy}, outside the basin radius",
            details={"guess": str(guess), "energy": str(energy)},
        )
    if check_simplicity:
        rel = simplicity(mf, energy)
        if rel < cfg.simplicity_floor:
            raise NonSimpleLevelError(
                f"|dW/dE| vanishes at {energy} (relative {rel:.2e})",
                details={"energy": str(energy), "relative_derivative": rel},
            )
    return assemble_eigenpair(mf, energy, label)


@dataclass(frozen=True)
class _EdgeData:
    phase: float
    moment: complex
    min_relative: float

    def reversed(self) -> _EdgeData:
        return _EdgeData(-self.phase, -self.moment, self.min_relative)


@dataclass(frozen=True)
class _CellData:
    winding: float
    moment: complex

    @property
    def count(self) -> int:
        return int(round(self.winding))


class _BoundaryTooClose(Exception):
    pass


class SpectrumScanner:
    """Argument-principle search for all levels inside an E-plane rectangle."""

    def __init__(
        self,
        spec: ProblemSpec,
        *,
        mismatch_function: MismatchFunction | None = None,
        settings: Settings | None = None,
        pool: WorkerPool | None = None,
        energy_scale: float | None = None,
    ) -> None:
        self.spec = spec
        self.settings = settings or get_settings()
        self._energy_scale = energy_scale
        self._pool = pool
        self._mf = mismatch_function
        self._edges: dict[tuple[complex, complex], _EdgeData] = {}
        self.inflations = 0
        self.total_winding = 0

    def _mismatch(self, region: Rectangle | None = None) -> MismatchFunction:
        if self._mf is None:
            if region is None:
                raise InvalidParameterError("the scanner needs a region before evaluating W")
            scale = self._energy_scale or 1.2 * max(abs(c) for c in region.corners) + 1.0
            self._mf = MismatchFunction(self.spec, energy_scale=scale, settings=self.settings, pool=self._pool)
        return self._mf

    def _edge(self, a: complex, b: complex) -> _EdgeData:
        if (a, b) in self._edges:
            return self._edges[(a, b)]
        if (b, a) in self._edges:
            return self._edges[(b, a)].reversed()
        mf = self._mismatch()
        count = max(4, math.ceil(abs(b - a) / EDGE_SPACING))
        ts = list(np.linspace(0.0, 1.0, count + 1))
        values = mf.evaluate_many([a + (b - a) * t for t in ts])
        for _ in range(MAX_REFINEMENTS):
            inc = wrapped_increments([v.mantissa for v in values])
            bad = [k for k in range(len(inc)) if abs(inc[k]) > MAX_PHASE_STEP]
            if not bad:
                break
            new_ts = [0.5 * (ts[k] + ts[k + 1]) for k in bad]
            new_vals = mf.evaluate_many([a + (b - a) * t for t in new_ts])
            merged = sorted(zip(ts + new_ts, values + new_vals, strict=True), key=lambda p: p[0])
            ts = [p[0] for p in merged]
            values = [p[1] for p in merged]
        else:
            raise _BoundaryTooClose(f"phase of W not resolved on edge {a} -> {b}")

        min_relative = min(v.relative for v in values)
        if min_relative < NEAR_ZERO:
            raise _BoundaryTooClose(f"W nearly vanishes on edge {a} -> {b}")
        inc = wrapped_increments([v.mantissa for v in values])
        logs = np.array([v.log_modulus for v in values])
        dlog = np.diff(logs) + 1j * inc
        energies = np.array([a + (b - a) * t for t in ts])
        mids = 0.5 * (energies[1:] + energies[:-1])
        data = _EdgeData(float(np.sum(inc)), complex(np.sum(mids * dlog)), min_relative)
        self._edges[(a, b)] = data
        return data

    def _cell(self, cell: Rectangle) -> _CellData:
        c = cell.corners
        edges = [self._edge(c[k], c[(k + 1) % 4]) for k in range(4)]
        winding = sum(e.phase for e in edges) / (2.0 * math.pi)
        if abs(winding - round(winding)) > self.settings.winding_tolerance:
            raise WindingError(
                f"winding {winding:.3f} around {cell} is not an integer",
                details={"winding": winding},
            )
        return _CellData(winding, sum((e.moment for e in edges), 0j))

    def _locate_one(self, cell: Rectangle, data: _CellData) -> complex:
        mf = self._mismatch()
        estimate = data.moment / (2j * math.pi)
        guesses = [estimate] if cell.contains(estimate) else []
        guesses.append(cell.center)
        last: PtdwError | None = None
        for guess in guesses:
            try:
                energy, _, _ = polish_level(mf, guess, self.settings)
            except ConvergenceError as exc:
                last = exc
                continue
            if cell.contains(energy, margin=1e-8 * (1.0 + abs(energy))):
                return energy
        raise ConvergenceError(
            f"could not converge to the level inside {cell}",
            details={"estimate": str(estimate), "cause": str(last) if last else "outside cell"},
        )

    def _subdivide(self, cell: Rectangle, data: _CellData, depth: int) -> list[complex]:
        if data.count <= 0:
            return []
        if data.count == 1:
            return [self._locate_one(cell, data)]
        if depth >= MAX_DEPTH:
            raise NonSimpleLevelError(
                f"{data.count} levels remain clustered in {cell}",
                details={"count": data.count},
            )
        for offset in (0.0, 0.031, -0.047):
            try:
                children = cell.split(offset)
                child_data = [self._cell(child) for child in children]
                break
            except _BoundaryTooClose:
                continue
        else:
            raise WindingError(f"could not split {cell} away from its levels")
        if sum(d.count for d in child_data) != data.count:
            raise WindingError(
                f"child windings do not add up to {data.count} in {cell}",
                details={"children": [d.winding for d in child_data]},
            )
        found: list[complex] = []
        for child, d in zip(children, child_data, strict=True):
            found.extend(self._subdivide(child, d, depth + 1))
        return found

    def scan(self, region: Rectangle) -> list[ComplexEnergy]:
        """All levels inside ``region``, sorted by real then imaginary part."""
        self._mismatch(region.inflate(0.05))
        current = region
        for _ in range(3):
            try:
                data = self._cell(current)
                break
            except _BoundaryTooClose as exc:
                self.inflations += 1
                logger.warning("Inflating scan region by 1%%: %s", exc)
                current = current.inflate(0.01)
        else:
            raise WindingError(f"region boundary stays too close to a level: {region}")
        self.total_winding = data.count
        levels = self._subdivide(current, data, 0)
        return [ComplexEnergy(value=e) for e in sorted(levels, key=lambda z: (round(z.real, 9), z.imag))]


def scan_spectrum(
    region: Rectangle,
    spec: ProblemSpec,
    *,
    settings: Settings | None = None,
    pool: WorkerPool | None = None,
) -> list[ComplexEnergy]:
    """All levels inside an E-plane rectangle by recursive argument-principle subdivision."""
    return SpectrumScanner(spec, settings=settings, pool=pool).scan(region)
