"""Action integrals, leading-order WKB levels and Stokes geometry.

With p0 = sqrt(E - V) and a turning-point pair (a, b), the integral of p0
from a to b is evaluated on the segment z = m - h cos(phi), m = (a + b)/2,
h = (b - a)/2, where

    int_a^b p0 dz = h^2 int_0^pi sin(phi)^2 sqrt(i (z - c)) dphi

and c is the third turning point. The closed cycle around the pair is twice
that, and ``action`` returns (1/2 pi i) times the cycle integral of
sqrt(V - E), i.e. S / pi, which equals hbar (n + 1/2) at the n-th level of a
harmonic well.

Stokes curves are the curves on which Im int_t^z p0 dz = 0 for a turning
point t. The bilocalization energy E^p is the real energy at which the
imaginary turning point lies on the curve joining I- and I+.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import brentq, newton

from pt_double_well.core.model import (
    SQRT3,
    WELL_DEPTH,
    ComplexArray,
    potential,
    potential_derivative,
    turning_points,
    well_bottom,
)
from pt_double_well.exceptions import (
    BracketError,
    ConvergenceError,
    DegenerateTurningPointError,
    InvalidParameterError,
)
from pt_double_well.models.problem import (
    BranchLabel,
    ComplexEnergy,
    HamiltonianForm,
    ProblemSpec,
)
from pt_double_well.tasks.worker_pool import WorkerPool, pool_map
from pt_double_well.utils.complex_utils import continuous_sqrt

logger = logging.getLogger(__name__)

STOKES_CONVENTION = "im_p0_integral_zero"
CONTOUR_CLEARANCE = 0.05
WKB_VALIDITY = 0.1
EP_BRACKET = (0.25, 0.45)
CRITICAL_DISTANCE = 1e-5

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)
_PHI = 0.5 * math.pi * (_GL_NODES + 1.0)
_PHI_WEIGHTS = 0.5 * math.pi * _GL_WEIGHTS
_STEP_NODES, _STEP_WEIGHTS = np.polynomial.legendre.leggauss(8)


class ContourKind(str, Enum):
    SEGMENT = "segment"
    ELLIPSE = "ellipse"


@dataclass(frozen=True)
class ActionCycle:
    """(1/2 pi i) times the cycle integral of sqrt(V - E) around a turning-point pair."""

    energy: complex
    pair: str
    contour: ContourKind
    value: complex
    endpoints: tuple[complex, complex]
    clearance: float


def _branch_from_middle(
    values: ComplexArray, mid: int | None = None, reference: complex | None = None
) -> ComplexArray:
    """Square roots continuous along the samples.

    The branch at sample ``mid`` (default: the middle one) is the principal
    one, or the one closest to ``reference``.
    """
    mid = len(values) // 2 if mid is None else mid
    start = complex(np.sqrt(values[mid]))
    if reference is not None:
        start = _nearest_branch(start, reference)
    right = continuous_sqrt(values[mid:], start=start)
    left = continuous_sqrt(values[: mid + 1][::-1], start=start)[::-1]
    return np.concatenate([left[:-1], right])


def _segment_distance(point: complex, a: complex, b: complex) -> float:
    d = b - a
    if d == 0:
        return abs(point - a)
    t = min(1.0, max(0.0, ((point - a) * d.conjugate()).real / abs(d) ** 2))
    return abs(point - (a + t * d))


def segment_integral(a: complex, b: complex, c: complex) -> complex:
    """int_a^b sqrt(E - V) dz along the straight segment, V - E = i(z-a)(z-b)(z-c).

    The branch is the principal one of sqrt(i (z - c)) at the segment
    midpoint, continued along the segment.

    Raises:
        DegenerateTurningPointError: the third root lies within the contour clearance
    """
    distance = _segment_distance(c, a, b)
    if distance < CONTOUR_CLEARANCE:
        raise DegenerateTurningPointError(
            f"turning point {c} lies {distance:.3e} from the contour {a} -> {b}",
            details={"a": str(a), "b": str(b), "c": str(c), "distance": distance},
        )
    m = 0.5 * (a + b)
    h = 0.5 * (b - a)
    z = m - h * np.cos(_PHI)
    g = _branch_from_middle(1j * (z - c))
    return complex(h * h * np.sum(_PHI_WEIGHTS * np.sin(_PHI) ** 2 * g))


def _ellipse_integral(a: complex, b: complex, c: complex, nodes: int = 256) -> tuple[complex, float]:
    """Cycle integral on a confocal ellipse around a and b by the periodic trapezoid rule.

    Returns:
        (integral, clearance of the ellipse from all three turning points)
    """
    m = 0.5 * (a + b)
    h = 0.5 * (b - a)
    w_c = cmath.acos((m - c) / h)
    rho_c = abs(w_c.imag)
    rho_min = math.acosh(1.0 + CONTOUR_CLEARANCE / abs(h))
    rho = 0.5 * (rho_min + rho_c) if rho_c > rho_min else math.nan
    if math.isnan(rho):
        raise DegenerateTurningPointError(
            f"no ellipse around {a}, {b} clears {c} by {CONTOUR_CLEARANCE}",
            details={"a": str(a), "b": str(b), "c": str(c)},
        )
    theta = 2.0 * math.pi * np.arange(nodes) / nodes
    w = theta + 1j * rho
    z = m - h * np.cos(w)
    g = _branch_from_middle(1j * (z - c), mid=nodes // 4, reference=cmath.sqrt(1j * (m - c)))
    integral = complex(2.0 * math.pi / nodes * np.sum(h * h * np.sin(w) ** 2 * g))
    clearance = float(min(np.min(np.abs(z - a)), np.min(np.abs(z - b)), np.min(np.abs(z - c))))
    if clearance < CONTOUR_CLEARANCE:
        raise DegenerateTurningPointError(
            f"ellipse clearance {clearance:.3e} below {CONTOUR_CLEARANCE}",
            details={"clearance": clearance},
        )
    return integral, clearance


def action_cycle(
    energy: complex,
    which_pair: str,
    spec: ProblemSpec,
    contour: ContourKind | str = ContourKind.SEGMENT,
) -> ActionCycle:
    """Action of the cycle around ``which_pair`` ("I+I-", "I0I+" or "I0I-")."""
    kind = ContourKind(contour)
    tp = turning_points(complex(energy), spec).require_nondegenerate()
    a, b, c = tp.pair(which_pair)
    if kind is ContourKind.SEGMENT:
        value = segment_integral(a, b, c) / math.pi
        clearance = _segment_distance(c, a, b)
    else:
        integral, clearance = _ellipse_integral(a, b, c)
        value = integral / (2.0 * math.pi)
    return ActionCycle(
        energy=complex(energy),
        pair=which_pair,
        contour=kind,
        value=value,
        endpoints=(a, b),
        clearance=clearance,
    )


def action(
    energy: complex,
    which_pair: str,
    spec: ProblemSpec,
    contour: ContourKind | str = ContourKind.SEGMENT,
) -> complex:
    """(1/2 pi i) times the cycle integral of sqrt(V - E) around a turning-point pair.

    Raises:
        DegenerateTurningPointError: coalescing turning points, or the third
            root too close to the contour (E = 0 for the pair "I+I-")
    """
    return action_cycle(energy, which_pair, spec, contour).value


def harmonic_action(energy: complex, well: int) -> complex:
    """Action of the quadratic approximation at the H-form well bottom: (E - V0) / (2 sqrt(k))."""
    _, bottom = well_bottom(well)
    k = 1j * SQRT3 * well
    return (complex(energy) - bottom) / (2.0 * cmath.sqrt(k))


def _leading_level(n: int, hbar: float, sign: int) -> complex:
    return -sign * 1j * WELL_DEPTH + cmath.sqrt(sign * 1j) * 3.0**0.25 * (2 * n + 1) * hbar


def wkb_level(n: int, hbar: float, sign: int, *, refine: bool = False) -> ComplexEnergy:
    """Leading semiclassical level E_n^{sign}(hbar) of the H-form.

    E = -/+ i 2/(3 sqrt 3) + sqrt(+/- i) 3^(1/4) (2n + 1) hbar. With ``refine``
    the value is replaced by the root of the action quantization condition.
    """
    if n < 0:
        raise InvalidParameterError(f"level index must be non-negative, got {n}")
    if sign not in (1, -1):
        raise InvalidParameterError(f"sign must be +1 or -1, got {sign}")
    if hbar <= 0:
        raise InvalidParameterError(f"hbar must be positive, got {hbar}")
    if hbar > WKB_VALIDITY:
        logger.warning("Leading-order WKB level requested at hbar=%.3f > %.1f", hbar, WKB_VALIDITY)
    value = _leading_level(n, hbar, sign)
    label = BranchLabel.perturbative(n, sign)
    if refine:
        value = solve_action_quantization(n, hbar, sign)
    return ComplexEnergy(value=value, branch=label)


def solve_action_quantization(n: int, hbar: float, sign: int, *, tol: float = 1e-13) -> complex:
    """Solve action(E, well pair) = hbar (n + 1/2) from the leading WKB level.

    The right well (sign +1, Im E < 0) is the pair I0I+, the left one I0I-.
    The orientation of the cycle is fixed at the starting guess.

    Raises:
        ConvergenceError: the secant iteration did not converge
    """
    spec = ProblemSpec.h_form(hbar)
    start = _leading_level(n, hbar, sign)
    pair = "I0I+" if sign == 1 else "I0I-"
    target = hbar * (n + 0.5)
    orientation = 1.0 if action(start, pair, spec).real >= 0 else -1.0

    def residual(e: complex) -> complex:
        return orientation * action(e, pair, spec) - target

    try:
        root = newton(residual, start, x1=start * (1.0 + 1e-4) + 1e-6, tol=tol, maxiter=60)
    except (RuntimeError, DegenerateTurningPointError) as e:
        raise ConvergenceError(
            f"action quantization n={n} hbar={hbar} sign={sign} did not converge",
            details={"n": n, "hbar": hbar, "sign": sign, "start": str(start)},
        ) from e
    return complex(root)


class ShortLineStatus(str, Enum):
    PRESENT = "present"
    ABSENT = "absent"
    CRITICAL = "critical"


@dataclass
class StokesCurve:
    """A traced curve Im int_source^z p0 dz = 0."""

    source: str
    direction_index: int
    points: ComplexArray
    end: str
    residual: float

    @property
    def connected(self) -> bool:
        return self.end != "truncated"


@dataclass
class StokesDiagram:
    energy: float
    turning_points: dict[str, complex]
    curves: list[StokesCurve]
    short_line_status: ShortLineStatus
    imaginary_point_distance: float
    short_line_functional: float
    convention: str = STOKES_CONVENTION
    notes: list[str] = field(default_factory=list)

    @property
    def max_residual(self) -> float:
        return max((c.residual for c in self.curves), default=0.0)


def _p0(z: complex | ComplexArray, energy: complex, spec: ProblemSpec) -> complex | ComplexArray:
    return np.sqrt(energy - np.asarray(potential(z, spec), dtype=complex))


def _nearest_branch(value: complex, reference: complex) -> complex:
    return value if abs(value - reference) <= abs(value + reference) else -value


def _step_integral(z0: complex, z1: complex, p_ref: complex, energy: complex, spec: ProblemSpec) -> tuple[complex, complex]:
    """int_z0^z1 p0 dz by 8-point Gauss-Legendre, branch continued from p_ref.

    Returns:
        (integral, p0 at z1 on the continued branch)
    """
    t = 0.5 * (_STEP_NODES + 1.0)
    z = z0 + (z1 - z0) * t
    p = continuous_sqrt(energy - np.asarray(potential(z, spec), dtype=complex), start=p_ref)
    integral = complex(0.5 * (z1 - z0) * np.sum(_STEP_WEIGHTS * p))
    end = _nearest_branch(complex(_p0(z1, energy, spec)), complex(p[-1]))
    return integral, end


class StokesTracer:
    """Follows Stokes curves with RK4 on dz/ds = sigma conj(p0)/|p0|.

    After each step the point is projected back onto Im Phi = 0 along the
    normal, Phi being the accumulated integral of p0 from the source.
    """

    def __init__(
        self,
        energy: float,
        spec: ProblemSpec,
        *,
        step: float = 0.01,
        box_radius: float = 4.0,
        seed_distance: float = 1e-3,
        max_steps: int = 20000,
    ) -> None:
        self.energy = complex(energy)
        self.spec = spec
        self.step = step
        self.box_radius = box_radius
        self.seed_distance = seed_distance
        self.max_steps = max_steps
        tp = turning_points(self.energy, spec).require_nondegenerate()
        self.points = {"I0": tp.imaginary_point, "I-": tp.minus, "I+": tp.plus}

    def seed_angles(self, name: str) -> list[float]:
        """The three local directions (2/3)(k pi - arg sqrt(-V'(t)))."""
        t = self.points[name]
        s = cmath.sqrt(-complex(potential_derivative(t, self.spec)))
        return [(2.0 / 3.0) * (k * math.pi - cmath.phase(s)) for k in range(3)]

    def _direction(self, z: complex, p_ref: complex, sigma: float) -> tuple[complex, complex]:
        p = _nearest_branch(complex(_p0(z, self.energy, self.spec)), p_ref)
        if p == 0:
            return 0j, p
        return sigma * p.conjugate() / abs(p), p

    def trace(self, name: str, index: int) -> StokesCurve:
        source = self.points[name]
        theta = self.seed_angles(name)[index]
        s = cmath.sqrt(-complex(potential_derivative(source, self.spec)))
        offset = self.seed_distance * cmath.exp(1j * theta)
        z = source + offset
        p = _nearest_branch(
            complex(_p0(z, self.energy, self.spec)),
            s * math.sqrt(self.seed_distance) * cmath.exp(0.5j * theta),
        )
        phi = (2.0 / 3.0) * s * self.seed_distance**1.5 * cmath.exp(1.5j * theta)
        sigma = 1.0 if phi.real >= 0 else -1.0
        others = {k: v for k, v in self.points.items() if k != name}
        capture = 2.0 * self.step

        points = [source, z]
        residual = abs(phi.imag)
        end = "truncated"
        for _ in range(self.max_steps):
            dist = min(abs(z - v) for v in self.points.values())
            ds = min(self.step, max(1e-4, 0.5 * dist))
            k1, p1 = self._direction(z, p, sigma)
            k2, _ = self._direction(z + 0.5 * ds * k1, p1, sigma)
            k3, _ = self._direction(z + 0.5 * ds * k2, p1, sigma)
            k4, _ = self._direction(z + ds * k3, p1, sigma)
            z_new = z + ds * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
            delta, p_new = _step_integral(z, z_new, p1, self.energy, self.spec)
            phi_new = phi + delta
            if p_new != 0:
                normal = 1j * sigma * p_new.conjugate() / abs(p_new)
                z_corr = z_new + normal * (-phi_new.imag / abs(p_new))
                delta, p_new = _step_integral(z_new, z_corr, p_new, self.energy, self.spec)
                z_new, phi_new = z_corr, phi_new + delta
            z, p, phi = z_new, p_new, phi_new
            points.append(z)
            residual = max(residual, abs(phi.imag) / max(1.0, abs(phi)))

            hit = next((k for k, v in others.items() if abs(z - v) < capture), None)
            if hit is not None:
                points.append(others[hit])
                end = hit
                break
            if abs(z) > self.box_radius:
                break
        return StokesCurve(
            source=name,
            direction_index=index,
            points=np.asarray(points, dtype=complex),
            end=end,
            residual=residual,
        )

    def trace_all(self, pool: WorkerPool | None = None) -> list[StokesCurve]:
        def run(name: str) -> list[StokesCurve]:
            return [self.trace(name, k) for k in range(3)]

        names = ["I-", "I0", "I+"]
        return [curve for group in pool_map(pool, run, names) for curve in group]


def polyline_distances(points: ComplexArray, polyline: ComplexArray) -> NDArray[np.float64]:
    """Distance from each of ``points`` to a polyline."""
    pts = np.atleast_1d(np.asarray(points, dtype=complex))[:, None]
    line = np.asarray(polyline, dtype=complex)
    if len(line) == 1:
        return np.abs(pts[:, 0] - line[0])
    a, d = line[:-1][None, :], np.diff(line)[None, :]
    length2 = np.where(np.abs(d) > 0, np.abs(d) ** 2, 1.0)
    t = np.clip(np.real((pts - a) * np.conj(d)) / length2, 0.0, 1.0)
    return np.min(np.abs(pts - (a + t * d)), axis=1)


def polyline_distance(point: complex, polyline: ComplexArray) -> float:
    return float(polyline_distances(np.array([point]), polyline)[0])


def short_line_functional(energy: float, spec: ProblemSpec | None = None) -> float:
    """Signed Im F / |F|, F = int_{I-}^{I0} p0 dz on the branch with Re F > 0."""
    problem = spec or ProblemSpec.h_form(1.0)
    tp = turning_points(complex(energy), problem).require_nondegenerate()
    a, b, c = tp.pair("I0I-")
    f = segment_integral(a, b, c)
    if f.real < 0:
        f = -f
    return f.imag / abs(f)


def _require_stokes_problem(energy: float, spec: ProblemSpec) -> None:
    if spec.form is not HamiltonianForm.H:
        raise InvalidParameterError("Stokes diagrams are defined for the H-form")
    if energy <= 0:
        raise InvalidParameterError(f"Stokes diagrams need E > 0, got {energy}")


def trace_stokes(
    energy: float,
    spec: ProblemSpec | None = None,
    *,
    step: float = 0.01,
    pool: WorkerPool | None = None,
) -> StokesDiagram:
    """Trace the three curves from each turning point and classify the short line.

    Raises:
        InvalidParameterError: E <= 0 or a K-form problem
        DegenerateTurningPointError: coalescing turning points
    """
    problem = spec or ProblemSpec.h_form(1.0)
    _require_stokes_problem(energy, problem)
    tracer = StokesTracer(energy, problem, step=step)
    curves = tracer.trace_all(pool)

    i0 = tracer.points["I0"]
    well_curves = [c for c in curves if c.source != "I0"]
    distance = min(polyline_distance(i0, c.points) for c in well_curves)
    functional = short_line_functional(energy, problem)

    joins = {(c.source, c.end) for c in curves}
    notes: list[str] = []
    if abs(functional) < CRITICAL_DISTANCE or ("I-", "I0") in joins or ("I+", "I0") in joins:
        status = ShortLineStatus.CRITICAL
    elif ("I-", "I+") in joins or ("I+", "I-") in joins:
        status = ShortLineStatus.PRESENT
    else:
        status = ShortLineStatus.ABSENT
    truncated = sum(1 for c in curves if not c.connected)
    if truncated:
        notes.append(f"{truncated} curves left the box of radius {tracer.box_radius}")
    logger.info(
        "Stokes diagram at E=%.6f: short line %s, I0 distance %.3e",
        energy, status.value, distance,
    )
    return StokesDiagram(
        energy=float(energy),
        turning_points=dict(tracer.points),
        curves=curves,
        short_line_status=status,
        imaginary_point_distance=distance,
        short_line_functional=functional,
        notes=notes,
    )


def diagram_symmetry_defect(diagram: StokesDiagram) -> float:
    """Largest distance between a curve mirrored by z -> -conj(z) and the curve set."""
    mirror = {"I-": "I+", "I+": "I-", "I0": "I0"}
    worst = 0.0
    for curve in diagram.curves:
        mirrored = -np.conj(curve.points)
        best = min(
            float(np.max(polyline_distances(mirrored, other.points)))
            for other in diagram.curves
            if other.source == mirror[curve.source]
        )
        worst = max(worst, best)
    return worst


def find_Ep(bracket: tuple[float, float] = EP_BRACKET, *, xtol: float = 1e-13) -> float:
    """Energy at which the imaginary turning point lies on the short Stokes line.

    Raises:
        BracketError: the functional does not change sign on the bracket
    """
    lo, hi = bracket
    d_lo, d_hi = short_line_functional(lo), short_line_functional(hi)
    if d_lo * d_hi > 0:
        raise BracketError(
            f"short-line functional has no sign change on [{lo}, {hi}]",
            details={"lower": lo, "upper": hi, "d_lower": d_lo, "d_upper": d_hi},
        )
    root = float(brentq(short_line_functional, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps))
    logger.info("E^p = %.10f", root)
    return root


def trend_ratios(rows: list[tuple[float, float]], e_p: float) -> NDArray[np.float64]:
    """(E_n^p - E^p) / (h_n^p)^2 for (h_n^p, E_n^p) rows."""
    return np.array([(e - e_p) / h**2 for h, e in rows])
