"""Zeros of eigenstates in the complex plane.

States are reached off the real axis by vertical propagation from the stored
real-axis samples. Zeros are counted with the argument principle, the
integral of psi'/psi being carried along the contour by the integrator
itself, and located by quadtree subdivision followed by Newton hops
z <- z - psi/psi', each hop propagating the state from the previous point.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from pt_double_well.core.eigensolver import Eigenpair, StateValues, find_level
from pt_double_well.core.error_handling import solver_logger
from pt_double_well.core.model import (
    SQRT3,
    ComplexArray,
    imaginary_turning_ordinate,
    sigma_contains,
)
from pt_double_well.core.propagator import local_wavenumber, propagate_state
from pt_double_well.core.settings import Settings, get_settings
from pt_double_well.exceptions import (
    ConvergenceError,
    InvalidParameterError,
    NonSimpleLevelError,
    PropagationError,
    SymmetryViolationError,
    WindingError,
    ZeroCountError,
)
from pt_double_well.models.problem import HamiltonianForm, ProblemSpec
from pt_double_well.models.records import (
    CheckReport,
    ContourWinding,
    NodeSummary,
    ZeroClass,
    ZeroRecord,
)
from pt_double_well.tasks.worker_pool import WorkerPool, pool_map
from pt_double_well.utils.complex_utils import Rectangle, nearest_matching

logger = logging.getLogger(__name__)

GRID_SPACING = 0.05
CONTOUR_SPACING = 0.02
NEAR_CONTOUR = 0.02
MAX_NEWTON = 40
MAX_DEPTH = 10
LADDER_TOP = 8.0
CONFINEMENT_TOLERANCE = 0.02
FAR_ZERO_SLOPE = 0.25


@dataclass
class StateGrid:
    """psi and psi' on a rectangular grid, rows indexed by Im z and columns by Re z."""

    x: NDArray[np.float64]
    y: NDArray[np.float64]
    psi: ComplexArray
    dpsi: ComplexArray
    log: NDArray[np.float64]
    failed_columns: dict[int, str] = field(default_factory=dict)

    def values(self) -> tuple[ComplexArray, ComplexArray]:
        factor = np.exp(self.log)
        return self.psi * factor, self.dpsi * factor

    @property
    def points(self) -> ComplexArray:
        return self.x[None, :] + 1j * self.y[:, None]


def default_region(pair: Eigenpair) -> Rectangle:
    """Search box below the turning ordinate plus one unit above it.

    The K-form box is [-2.5, 2.5] x [-3, y~ + 1]; the H-form box is narrower,
    vertical integration into the decaying wedges being unstable for small hbar.
    """
    top = imaginary_turning_ordinate(pair.value.real, pair.spec) + 1.0
    if pair.spec.form is HamiltonianForm.K:
        box = Rectangle(-2.5, 2.5, -3.0, top)
    else:
        box = Rectangle(-1.5, 1.5, -1.5, top)
    limit = 0.9 * pair.truncation
    return Rectangle(
        max(box.re_min, -limit), min(box.re_max, limit),
        max(box.im_min, -limit), min(box.im_max, limit),
    )


def extend_state(
    pair: Eigenpair,
    region: Rectangle,
    *,
    spacing: float = GRID_SPACING,
    pool: WorkerPool | None = None,
) -> StateGrid:
    """Sample the gauged state on a grid covering ``region``.

    Columns whose propagation fails are left as NaN and listed in
    ``failed_columns``.
    """
    limit = pair.truncation
    if max(abs(c) for c in region.corners) >= limit:
        raise InvalidParameterError(
            f"region {region} reaches beyond the truncation radius {limit:.2f}",
            details={"truncation": limit},
        )
    nx = max(2, math.ceil(region.width / spacing) + 1)
    ny = max(2, math.ceil(region.height / spacing) + 1)
    x = np.linspace(region.re_min, region.re_max, nx)
    y = np.linspace(region.im_min, region.im_max, ny)

    def column(xv: float) -> StateValues | str:
        try:
            return pair.evaluate(xv + 1j * y)
        except PropagationError as e:
            return e.message

    results = pool_map(pool, column, list(x))
    psi = np.full((ny, nx), np.nan, dtype=complex)
    dpsi = np.full((ny, nx), np.nan, dtype=complex)
    logs = np.zeros((ny, nx))
    failed: dict[int, str] = {}
    for j, result in enumerate(results):
        if isinstance(result, str):
            failed[j] = result
            logger.warning("Column x=%.3f failed: %s", x[j], result)
            continue
        psi[:, j], dpsi[:, j], logs[:, j] = result.psi, result.dpsi, result.log
    return StateGrid(x=x, y=y, psi=psi, dpsi=dpsi, log=logs, failed_columns=failed)


def disk_contour(center: complex, radius: float, vertices: int = 64) -> list[complex]:
    """Closed counter-clockwise polygon inscribed in a circle."""
    angles = 2.0 * math.pi * np.arange(vertices + 1) / vertices
    points = [complex(center + radius * np.exp(1j * a)) for a in angles]
    points[-1] = points[0]
    return points


@dataclass(frozen=True)
class ContourIntegrals:
    """(1/2 pi i) times the integrals of psi'/psi and z psi'/psi around a contour."""

    winding: complex
    moment: complex
    nearest_zero: float

    @property
    def count(self) -> int:
        return int(round(self.winding.real))

    def off_integer(self) -> float:
        return abs(self.winding - self.count)


def _state_at(pair: Eigenpair, z: complex) -> tuple[complex, complex, float]:
    values = pair.evaluate([z])
    return complex(values.psi[0]), complex(values.dpsi[0]), float(values.log[0])


def _kappa(pair: Eigenpair, z: ComplexArray) -> NDArray[np.float64]:
    return np.maximum(1.0, local_wavenumber(z, pair.value, pair.spec))


def _path_integrals(
    pair: Eigenpair,
    path: Sequence[complex],
    start: tuple[complex, complex, float] | None = None,
) -> tuple[complex, complex, float]:
    """Integrals of psi'/psi and z psi'/psi along ``path`` plus the smallest scaled |psi/psi'|."""
    psi, dpsi, log = start or _state_at(pair, path[0])
    sol = propagate_state(
        psi, dpsi, np.asarray(path, dtype=complex), pair.value, pair.spec,
        log_scale=log, spacing=CONTOUR_SPACING, track_log_derivative=True,
        settings=pair._settings,
    )
    assert sol.log_integrals is not None
    ratio = np.abs(sol.psi / sol.dpsi) * _kappa(pair, sol.z)
    return complex(sol.log_integrals[0]), complex(sol.log_integrals[1]), float(ratio.min())


def contour_integrals(pair: Eigenpair, contour: Sequence[complex]) -> ContourIntegrals:
    path = list(contour)
    if path[0] != path[-1]:
        path.append(path[0])
    lam0, lam1, nearest = _path_integrals(pair, path)
    return ContourIntegrals(
        winding=lam0 / (2j * math.pi),
        moment=lam1 / (2j * math.pi),
        nearest_zero=nearest,
    )


def _perturbed(contour: Sequence[complex], factor: float = 1.013) -> list[complex]:
    center = complex(np.mean(np.asarray(contour[:-1] if contour[0] == contour[-1] else contour)))
    return [center + factor * (z - center) for z in contour]


def count_zeros(
    pair: Eigenpair,
    contour: Sequence[complex],
    *,
    settings: Settings | None = None,
) -> int:
    """Number of zeros of psi inside a closed counter-clockwise polyline.

    A contour passing within NEAR_CONTOUR (in local wavelengths) of a zero,
    or giving a winding farther than the tolerance from an integer, is
    enlarged slightly and retried once.

    Raises:
        WindingError: the retried contour is still unusable
    """
    cfg = settings or get_settings()
    attempts = [list(contour), _perturbed(contour)]
    last: ContourIntegrals | None = None
    for k, path in enumerate(attempts):
        result = contour_integrals(pair, path)
        last = result
        if result.nearest_zero >= NEAR_CONTOUR and result.off_integer() <= cfg.winding_tolerance:
            return result.count
        if k == 0:
            logger.warning(
                "Zero near the contour (scaled distance %.3e, winding %s); perturbing once",
                result.nearest_zero, result.winding,
            )
    assert last is not None
    raise WindingError(
        f"winding {last.winding:.4f} around the contour is unusable",
        details={"winding_re": last.winding.real, "winding_im": last.winding.imag,
                 "nearest_zero": last.nearest_zero},
    )


def newton_zero(
    pair: Eigenpair,
    start: complex,
    state: tuple[complex, complex, float] | None = None,
    *,
    tolerance: float | None = None,
    max_distance: float | None = None,
) -> ZeroRecord:
    """Newton hops z <- z - psi/psi', propagating the state between hops.

    Raises:
        ConvergenceError: no convergence, or the iterate left ``max_distance``
    """
    tol = tolerance or pair._settings.zero_tolerance
    z = complex(start)
    psi, dpsi, log = state or _state_at(pair, z)
    for _ in range(MAX_NEWTON):
        step = psi / dpsi
        if abs(step) < tol * max(1.0, abs(z)):
            solver_logger.log_zero_refined(z, abs(step))
            return ZeroRecord(position=z, newton_residual=abs(step))
        target = z - step
        if max_distance is not None and abs(target - start) > max_distance:
            break
        sol = propagate_state(
            psi, dpsi, np.array([z, target]), pair.value, pair.spec,
            log_scale=log, spacing=None, settings=pair._settings,
        )
        psi, dpsi, log = sol.endpoint()
        z = target
    raise ConvergenceError(
        f"Newton refinement from {start} did not converge",
        details={"start": str(start), "last": str(z)},
    )


@dataclass(frozen=True)
class _EdgeData:
    lam0: complex
    lam1: complex
    nearest: float

    def reversed(self) -> _EdgeData:
        return _EdgeData(-self.lam0, -self.lam1, self.nearest)


class _BoundaryTooClose(Exception):
    pass


class ZeroScanner:
    """Quadtree census of the zeros of one state inside a rectangle."""

    def __init__(
        self,
        pair: Eigenpair,
        *,
        settings: Settings | None = None,
        pool: WorkerPool | None = None,
    ) -> None:
        self.pair = pair
        self.settings = settings or pair._settings
        self.pool = pool
        self._corners: dict[complex, tuple[complex, complex, float]] = {}
        self._edges: dict[tuple[complex, complex], _EdgeData] = {}

    def _corner(self, z: complex) -> tuple[complex, complex, float]:
        if z not in self._corners:
            self._corners[z] = _state_at(self.pair, z)
        return self._corners[z]

    def _compute_edge(self, key: tuple[complex, complex]) -> _EdgeData:
        a, b = key
        lam0, lam1, nearest = _path_integrals(self.pair, [a, b], self._corner(a))
        return _EdgeData(lam0, lam1, nearest)

    def _edges_of(self, cells: list[Rectangle]) -> None:
        todo: list[tuple[complex, complex]] = []
        for cell in cells:
            c = cell.corners
            for k in range(4):
                key = (c[k], c[(k + 1) % 4])
                if key not in self._edges and key[::-1] not in self._edges and key not in todo:
                    todo.append(key)
        for key in todo:
            self._corner(key[0])
        for key, data in zip(todo, pool_map(self.pool, self._compute_edge, todo), strict=True):
            self._edges[key] = data

    def _edge(self, a: complex, b: complex) -> _EdgeData:
        if (a, b) in self._edges:
            return self._edges[(a, b)]
        return self._edges[(b, a)].reversed()

    def _cell(self, cell: Rectangle) -> tuple[int, complex]:
        self._edges_of([cell])
        c = cell.corners
        edges = [self._edge(c[k], c[(k + 1) % 4]) for k in range(4)]
        if min(e.nearest for e in edges) < NEAR_CONTOUR:
            raise _BoundaryTooClose(f"zero close to the boundary of {cell}")
        winding = sum((e.lam0 for e in edges), 0j) / (2j * math.pi)
        if abs(winding - round(winding.real)) > self.settings.winding_tolerance:
            raise _BoundaryTooClose(f"winding {winding} around {cell} is not an integer")
        moment = sum((e.lam1 for e in edges), 0j) / (2j * math.pi)
        return int(round(winding.real)), moment

    def _split(self, cell: Rectangle) -> tuple[list[Rectangle], list[tuple[int, complex]]]:
        for offset in (0.0, 0.037, -0.053):
            children = cell.split(offset)
            try:
                self._edges_of(children)
                return children, [self._cell(child) for child in children]
            except _BoundaryTooClose:
                continue
        raise WindingError(f"could not split {cell} away from its zeros")

    def _locate(self, cell: Rectangle, count: int, moment: complex, depth: int) -> list[ZeroRecord]:
        if count <= 0:
            return []
        if count == 1:
            guesses = [moment] if cell.contains(moment) else []
            guesses.append(cell.center)
            for guess in guesses:
                try:
                    record = newton_zero(
                        self.pair, guess, max_distance=2.0 * max(cell.width, cell.height)
                    )
                except ConvergenceError:
                    continue
                if cell.contains(record.position, margin=1e-8):
                    return [record]
            raise ConvergenceError(f"could not refine the zero inside {cell}")
        if depth >= MAX_DEPTH:
            center = moment / count
            logger.warning("%d zeros remain clustered near %s", count, center)
            psi, dpsi, _ = _state_at(self.pair, center)
            return [ZeroRecord(position=center, newton_residual=abs(psi / dpsi), multiplicity=count)]
        children, data = self._split(cell)
        if sum(d[0] for d in data) != count:
            raise WindingError(
                f"child windings do not add up to {count} in {cell}",
                details={"children": [d[0] for d in data]},
            )
        found: list[ZeroRecord] = []
        for child, (n, m) in zip(children, data, strict=True):
            found.extend(self._locate(child, n, m, depth + 1))
        return found

    def scan(self, region: Rectangle) -> list[ZeroRecord]:
        current = region
        for _ in range(3):
            try:
                count, moment = self._cell(current)
                break
            except _BoundaryTooClose as exc:
                logger.warning("Inflating zero search region by 1%%: %s", exc)
                current = current.inflate(0.01)
        else:
            raise WindingError(f"region boundary stays too close to a zero: {region}")
        zeros = self._locate(current, count, moment, 0)
        total = sum(z.multiplicity for z in zeros)
        if total != count:
            raise ZeroCountError(
                f"located {total} zeros but the region winding is {count}",
                details={"located": total, "winding": count},
            )
        return sorted(zeros, key=lambda r: (r.position.imag, r.position.real))


def locate_zeros(
    pair: Eigenpair,
    region: Rectangle | None = None,
    *,
    settings: Settings | None = None,
    pool: WorkerPool | None = None,
) -> list[ZeroRecord]:
    """All zeros of the state inside ``region``, sorted by (Im z, Re z)."""
    box = region or default_region(pair)
    return ZeroScanner(pair, settings=settings, pool=pool).scan(box)


def assign_classes(
    zeros: list[ZeroRecord],
    energy: complex,
    spec: ProblemSpec,
    tolerance: float | None = None,
) -> list[ZeroRecord]:
    """Zero records with their classes set from position and the turning ordinate."""
    tol = tolerance or get_settings().classification_tolerance
    top = imaginary_turning_ordinate(complex(energy).real, spec)
    classified = []
    for record in zeros:
        z = record.position
        if sigma_contains(z, complex(energy).real, spec, tol):
            kind = ZeroClass.IMAGINARY_NODE
        elif z.imag > top and abs(z.real) < FAR_ZERO_SLOPE * z.imag:
            kind = ZeroClass.FAR_ZERO
        elif z.real > 0:
            kind = ZeroClass.NODE_PLUS
        else:
            kind = ZeroClass.NODE_MINUS
        classified.append(record.model_copy(update={"zero_class": kind}))
    return classified


def classify_zeros(
    zeros: list[ZeroRecord],
    energy: complex,
    spec: ProblemSpec,
    *,
    tolerance: float | None = None,
    region_count: int | None = None,
) -> NodeSummary:
    """Node counts per class.

    Raises:
        SymmetryViolationError: more than one zero on the half-line below I0
    """
    classified = assign_classes(zeros, energy, spec, tolerance)
    counts = {kind: 0 for kind in ZeroClass}
    for record in classified:
        counts[record.zero_class] += record.multiplicity
    if counts[ZeroClass.IMAGINARY_NODE] > 1:
        raise SymmetryViolationError(
            f"{counts[ZeroClass.IMAGINARY_NODE]} imaginary nodes, at most one is possible",
            details={"positions": [str(r.position) for r in classified
                                   if r.zero_class is ZeroClass.IMAGINARY_NODE]},
        )
    total = sum(counts.values())
    windings = [ContourWinding(contour_id="region", count=region_count if region_count is not None else total)]
    return NodeSummary(
        n_plus=counts[ZeroClass.NODE_PLUS],
        n_minus=counts[ZeroClass.NODE_MINUS],
        has_imaginary_node=counts[ZeroClass.IMAGINARY_NODE] == 1,
        n_far=counts[ZeroClass.FAR_ZERO],
        windings=windings,
    )


def node_summary(
    pair: Eigenpair,
    region: Rectangle | None = None,
    *,
    pool: WorkerPool | None = None,
) -> NodeSummary:
    """Locate and classify the zeros of a state in its default search box."""
    zeros = locate_zeros(pair, region, pool=pool)
    return classify_zeros(zeros, pair.value, pair.spec, region_count=sum(z.multiplicity for z in zeros))


def node_count_sweep(
    start: Eigenpair,
    hbars: Sequence[float],
    *,
    pool: WorkerPool | None = None,
) -> list[NodeSummary]:
    """Node summaries along real hbar values, continuing the level step by step."""
    if start.spec.form is not HamiltonianForm.H:
        raise InvalidParameterError("node-count sweeps run in hbar (H-form)")
    summaries = []
    previous = start
    for hbar in hbars:
        spec = start.spec.with_parameter(hbar)
        pair = find_level(previous.value, spec, label=previous.energy.branch, check_simplicity=False)
        summaries.append(node_summary(pair, pool=pool))
        previous = pair
    return summaries


def check_confinement(
    zeros: list[ZeroRecord],
    spec: ProblemSpec,
    *,
    tolerance: float = CONFINEMENT_TOLERANCE,
    energy: complex | None = None,
) -> CheckReport:
    """Every node inside the wedge Im z < 0, |Re z| < -sqrt(3) Im z (+ tolerance).

    Far zeros above the turning ordinate are excluded when ``energy`` is given.
    """
    if spec.form is not HamiltonianForm.K or spec.linear_coefficient.imag != 0 or spec.linear_coefficient.real < 0:
        raise InvalidParameterError("confinement holds for the K-form with real alpha >= 0")
    nodes = zeros
    if energy is not None:
        nodes = [r for r in assign_classes(zeros, energy, spec) if r.zero_class is not ZeroClass.FAR_ZERO]
    violations = []
    margins = []
    for record in nodes:
        z = record.position
        margin = -SQRT3 * z.imag - abs(z.real)
        margins.append(margin)
        if not (z.imag < 0 and abs(z.real) < -SQRT3 * z.imag + tolerance):
            violations.append(f"zero {z} outside the wedge (margin {margin:.4f})")
    return CheckReport(
        name="confinement",
        passed=not violations,
        values={"min_margin": min(margins) if margins else math.inf, "nodes": float(len(nodes))},
        violations=violations,
    )


def check_zero_free_axis(pair: Eigenpair, *, y_max: float = LADDER_TOP) -> CheckReport:
    """Scan |psi(iy)| for y in [-Y, Y] and require it to stay away from 0.

    The scaled modulus |psi| / max(|psi|, |psi'|/kappa) is compared with
    1e-6 times its median. Real levels are skipped.
    """
    if abs(pair.value.imag) <= 1e-12 * max(1.0, abs(pair.value)):
        return CheckReport(name="zero_free_axis", passed=True, applied=False,
                           notes=["real level: the axis may carry an imaginary node"])
    top = min(0.9 * pair.truncation, y_max)
    spacing = min(0.01, 0.2 / float(_kappa(pair, np.array([1j * top]))[0]))
    up = pair.trace_line(0j, 1j * top, spacing)
    down = pair.trace_line(0j, -1j * top, spacing)
    z = np.concatenate([down.z[::-1], up.z[1:]])
    psi = np.concatenate([down.psi[::-1], up.psi[1:]])
    dpsi = np.concatenate([down.dpsi[::-1], up.dpsi[1:]])
    kappa = _kappa(pair, z)
    ratio = np.abs(psi) / np.maximum(np.abs(psi), np.abs(dpsi) / kappa)
    median = float(np.median(ratio))
    k = int(np.argmin(ratio))
    passed = bool(ratio[k] > 1e-6 * median)
    violations = [] if passed else [f"near-zero on the axis at {z[k]}"]
    return CheckReport(
        name="zero_free_axis",
        passed=passed,
        values={"min_ratio": float(ratio[k]), "median_ratio": median,
                "min_at": float(z[k].imag), "y_max": top},
        violations=violations,
    )


def ladder_zeros(
    pair: Eigenpair,
    *,
    y_min: float | None = None,
    y_max: float = LADDER_TOP,
) -> list[ZeroRecord]:
    """Zeros near the positive imaginary axis between y_min (default y~(E)) and y_max.

    Local minima of |psi(iy)| seed Newton hops from the axis sample.
    """
    bottom = imaginary_turning_ordinate(pair.value.real, pair.spec) if y_min is None else y_min
    top = min(0.9 * pair.truncation, y_max)
    if top <= bottom:
        return []
    spacing = min(0.01, 0.2 / float(_kappa(pair, np.array([1j * top]))[0]))
    line = pair.trace_line(1j * bottom, 1j * top, spacing)
    modulus = np.log(np.abs(line.psi)) + line.log
    minima = [k for k in range(1, len(modulus) - 1)
              if modulus[k] < modulus[k - 1] and modulus[k] <= modulus[k + 1]]
    zeros: list[ZeroRecord] = []
    for k in minima:
        start = complex(line.z[k])
        state = (complex(line.psi[k]), complex(line.dpsi[k]), float(line.log[k]))
        try:
            record = newton_zero(pair, start, state, max_distance=5.0 * spacing + 0.05)
        except ConvergenceError:
            logger.debug("Ladder minimum at %s did not refine to a zero", start)
            continue
        if all(abs(record.position - other.position) > 1e-8 for other in zeros):
            zeros.append(record)
    return sorted(zeros, key=lambda r: r.position.imag)


def check_zero_asymptotics(
    pair: Eigenpair,
    M: float | None = None,
    *,
    zeros: list[ZeroRecord] | None = None,
    y_max: float = LADDER_TOP,
) -> CheckReport:
    """Real parts of the high zeros: one common sign and decay for complex E, ~0 for real E.

    For complex E the expected sign of Re z is opposite to that of Im E.
    When ``M`` is not given it is estimated as the height above which every
    zero carries the expected sign. The log-log slope of |Re z| against
    Im z is reported and must lie in [-2.5, -1.0].
    """
    ladder = zeros if zeros is not None else ladder_zeros(pair, y_max=y_max)
    e = pair.value
    if abs(e.imag) <= 1e-12 * max(1.0, abs(e)):
        high = [r for r in ladder if M is None or r.position.imag > M]
        worst = max((abs(r.position.real) for r in high), default=0.0)
        return CheckReport(
            name="zero_asymptotics",
            passed=worst < 0.02,
            values={"max_abs_re": worst, "count": float(len(high))},
            violations=[] if worst < 0.02 else [f"|Re z| = {worst:.3e} for a real level"],
        )

    expected = -1.0 if e.imag > 0 else 1.0
    if M is None:
        wrong = [r.position.imag for r in ladder if r.position.real * expected <= 0]
        M = max(wrong) if wrong else (ladder[0].position.imag - 1e-9 if ladder else 0.0)
    high = [r for r in ladder if r.position.imag > M]
    violations = [f"zero {r.position} has the wrong sign of Re z"
                  for r in high if r.position.real * expected <= 0]
    values: dict[str, float] = {"M": float(M), "count": float(len(high))}
    if len(high) >= 3:
        y = np.array([r.position.imag for r in high])
        x = np.array([abs(r.position.real) for r in high])
        slope = float(np.polyfit(np.log(y), np.log(x), 1)[0])
        values["slope"] = slope
        values["envelope_ratio"] = float(np.min(x * (3.0 * y**2 + 1.0)) / abs(e.imag))
        if not -2.5 <= slope <= -1.0:
            violations.append(f"log-log slope {slope:.3f} outside [-2.5, -1.0]")
    else:
        violations.append(f"only {len(high)} zeros above M={M:.3f}")
    return CheckReport(name="zero_asymptotics", passed=not violations, values=values,
                       violations=violations)


def px_symmetry_defect(zeros: list[ZeroRecord], radius: float = 0.1) -> float:
    """Largest matching distance between a zero set and its mirror z -> -conj(z).

    Unmatched zeros count as infinite distance.
    """
    points = sorted((r.position for r in zeros), key=lambda z: (z.imag, z.real))
    mirrored = [-z.conjugate() for z in points]
    return _matching_defect(points, mirrored, radius)


def conjugate_zero_defect(plus: list[ZeroRecord], minus: list[ZeroRecord], radius: float = 0.1) -> float:
    """Distance between the zeros of psi_n^+ and the mirrored zeros of psi_n^-."""
    a = sorted((r.position for r in plus), key=lambda z: (z.imag, z.real))
    b = sorted((-r.position.conjugate() for r in minus), key=lambda z: (z.imag, z.real))
    return _matching_defect(a, b, radius)


def _matching_defect(a: list[complex], b: list[complex], radius: float) -> float:
    if len(a) != len(b):
        return math.inf
    if not a:
        return 0.0
    matches = nearest_matching(a, b, radius)
    if len(matches) != len(a):
        return math.inf
    return max(d for _, _, d in matches)


def require_simple(zeros: list[ZeroRecord]) -> None:
    """Raise when a clustered (non-simple) zero was reported."""
    multiple = [r for r in zeros if r.multiplicity > 1]
    if multiple:
        raise NonSimpleLevelError(
            f"{len(multiple)} zeros with multiplicity > 1",
            details={"positions": [str(r.position) for r in multiple]},
        )
