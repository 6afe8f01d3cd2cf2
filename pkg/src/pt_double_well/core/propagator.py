"""Propagation of -h^2 psi'' + (V - E) psi = 0 along polylines in the complex plane.

Each straight segment is parameterized by t in [0, 1] and integrated with
DOP853 on the first-order system (psi, psi'). Segments are cut into pieces
whose estimated WKB exponent stays bounded, and between pieces the state is
divided by a positive factor that is accumulated in a log-scale so that
|psi| never leaves the floating point range. Several energies can be
propagated in one integrator call.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy.integrate import solve_ivp

from pt_double_well.core.model import ComplexArray, potential, potential_derivative, turning_points
from pt_double_well.core.settings import Settings, get_settings
from pt_double_well.exceptions import (
    ErrorCode,
    InvalidParameterError,
    PropagationError,
    WkbSeedError,
)
from pt_double_well.models.problem import ProblemSpec

logger = logging.getLogger(__name__)

RENORMALIZE_WINDOW = (1e-100, 1e100)
MAX_PIECE_EXPONENT = 60.0
MIN_DECAY_RATIO = 0.1
WKB_CONTAMINATION = 1e-8
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(48)


@dataclass(frozen=True)
class WkbSeed:
    """WKB initial data at an anchor, decaying along ``direction``.

    psi = s^(-1/2) and psi'/psi = -s/d - V'/(4 (V - E)) with
    s = sqrt(d^2 (V - E) / h^2) on the principal branch, so Re s >= 0.
    """

    anchor: complex
    direction: complex
    energy: complex
    psi: complex
    dpsi: complex
    branch: complex
    error_estimate: float
    contamination: float


@dataclass
class PathSolution:
    """Propagated samples along a polyline.

    The solution at sample k is ``psi[k] * exp(log_scales[k])``.
    ``node_index[j]`` is the sample index of waypoint j.
    """

    path: ComplexArray
    energy: complex
    z: ComplexArray
    psi: ComplexArray
    dpsi: ComplexArray
    log_scales: NDArray[np.float64]
    node_index: NDArray[np.int64]
    log_integrals: ComplexArray | None = None

    @property
    def log_scale(self) -> float:
        return float(self.log_scales[-1])

    def endpoint(self) -> tuple[complex, complex, float]:
        """(psi, psi', log_scale) at the end of the path."""
        return complex(self.psi[-1]), complex(self.dpsi[-1]), self.log_scale

    def values(self, reference_log: float | None = None) -> tuple[ComplexArray, ComplexArray]:
        """psi and psi' rescaled by exp(log_scale - reference_log)."""
        ref = self.log_scale if reference_log is None else reference_log
        factor = np.exp(self.log_scales - ref)
        return self.psi * factor, self.dpsi * factor

    def at_nodes(self, reference_log: float | None = None) -> tuple[ComplexArray, ComplexArray]:
        psi, dpsi = self.values(reference_log)
        return psi[self.node_index], dpsi[self.node_index]


@dataclass
class _BatchState:
    psi: ComplexArray
    dpsi: ComplexArray
    logs: NDArray[np.float64]
    integrals: ComplexArray
    samples_z: list[complex] = field(default_factory=list)
    samples_psi: list[ComplexArray] = field(default_factory=list)
    samples_dpsi: list[ComplexArray] = field(default_factory=list)
    samples_log: list[NDArray[np.float64]] = field(default_factory=list)

    def record(self, z: complex, psi: ComplexArray, dpsi: ComplexArray) -> None:
        self.samples_z.append(z)
        self.samples_psi.append(psi.copy())
        self.samples_dpsi.append(dpsi.copy())
        self.samples_log.append(self.logs.copy())


def local_wavenumber(z: complex | ComplexArray, energy: complex, spec: ProblemSpec) -> NDArray[np.float64]:
    """|k| = |V - E|^(1/2) / |h|, the local exponential rate."""
    diff = np.asarray(potential(z, spec), dtype=complex) - energy
    return np.sqrt(np.abs(diff)) / abs(spec.hbar_eff)


def decay_exponent(spec: ProblemSpec, energy: complex, start: complex, end: complex) -> float:
    """Integral of Re sqrt(d^2 (V - E) / h^2) |dz| on the segment start -> end."""
    length = abs(end - start)
    if length == 0:
        return 0.0
    d = (end - start) / length
    t = 0.5 * (_GL_NODES + 1.0)
    z = start + (end - start) * t
    s = np.sqrt(d * d * (np.asarray(potential(z, spec)) - energy) / spec.hbar_eff**2)
    return float(0.5 * length * np.sum(_GL_WEIGHTS * s.real))


def _decay_angle_factor(spec: ProblemSpec) -> float:
    arg = abs(math.atan2(spec.hbar_eff.imag, spec.hbar_eff.real))
    return max(math.cos(math.pi / 4 + arg + 2.5 * abs(spec.boundary_angle)), 1e-3)


def _kappa(z: complex, energies: ComplexArray, spec: ProblemSpec) -> NDArray[np.float64]:
    """Local rate max(1, |k|) per energy, used to compare psi with psi'."""
    rate = np.sqrt(np.abs(complex(potential(z, spec)) - energies)) / abs(spec.hbar_eff)
    return np.maximum(1.0, rate)


def resolve_truncation(
    spec: ProblemSpec, energy_scale: float, settings: Settings | None = None
) -> float:
    """Truncation radius L for energies up to ``energy_scale`` in modulus.

    L is the smallest radius with (2/5) c (L^(5/2) - R^(5/2)) / |h| above the
    decay budget, where R bounds the turning points and c is the decay rate of
    the boundary rays; it is never below 2R + 1.
    """
    if spec.truncation_radius is not None:
        return float(spec.truncation_radius)
    cfg = settings or get_settings()
    tp = turning_points(complex(energy_scale), spec)
    radius = max(1.0, tp.max_modulus)
    target = cfg.decay_budget + cfg.truncation_margin
    c = _decay_angle_factor(spec)
    length = (radius**2.5 + target * abs(spec.hbar_eff) / (0.4 * c)) ** 0.4
    return float(max(length, 2.0 * radius + 1.0))


def boundary_rays(spec: ProblemSpec, length: float) -> tuple[tuple[complex, complex], tuple[complex, complex]]:
    """Anchors and outward directions ((left), (right)) of the L^2 boundary conditions.

    The right ray is L e^{i theta}; the left one is its mirror -L e^{-i theta}.
    """
    theta = spec.boundary_angle
    right_dir = complex(math.cos(theta), math.sin(theta))
    left_dir = -right_dir.conjugate()
    return (length * left_dir, left_dir), (length * right_dir, right_dir)


def wkb_seed(
    energy: complex,
    spec: ProblemSpec,
    anchor: complex,
    direction: complex,
    settings: Settings | None = None,
) -> WkbSeed:
    """WKB data at ``anchor`` for the solution decaying along ``direction``.

    The error estimate is eps = |h| |V'| / (4 |V - E|^(3/2)); the seed error
    enters the inward solution damped by exp(-2 S), S being the decay
    exponent from the turning-point disc out to the anchor.

    Raises:
        InvalidParameterError: direction does not point outward, or E is not finite
        WkbSeedError: anchor too close (WKB_TOO_CLOSE) or the ray does not
            decay (WKB_NOT_DECAYING)
    """
    e = complex(energy)
    z0 = complex(anchor)
    d = complex(direction)
    _require_finite(np.array([e]))
    if d == 0:
        raise InvalidParameterError("direction must be nonzero")
    d /= abs(d)
    if (z0.conjugate() * d).real <= 0:
        raise InvalidParameterError(
            f"direction {d} does not point away from the origin at {z0}"
        )

    h = spec.hbar_eff
    diff = complex(potential(z0, spec)) - e
    s = complex(np.sqrt(d * d * diff / h**2))
    if abs(s) == 0 or s.real / abs(s) < MIN_DECAY_RATIO:
        raise WkbSeedError(
            f"ray through {z0} along {d} is not a decaying direction",
            error_code=ErrorCode.WKB_NOT_DECAYING,
            details={"anchor": str(z0), "direction": str(d), "ratio": s.real / max(abs(s), 1e-300)},
        )

    eps = abs(h) * abs(complex(potential_derivative(z0, spec))) / (4.0 * abs(diff) ** 1.5)
    radius = max(1.0, turning_points(e, spec).max_modulus)
    inner = z0 - d * max(abs(z0) - radius, 0.0)
    contamination = eps * math.exp(-2.0 * max(decay_exponent(spec, e, inner, z0), 0.0))
    if eps >= 1.0 or contamination > WKB_CONTAMINATION:
        raise WkbSeedError(
            f"anchor {z0} too close to the turning points (eps={eps:.2e}, "
            f"contamination={contamination:.2e})",
            error_code=ErrorCode.WKB_TOO_CLOSE,
            details={"anchor": str(z0), "eps": eps, "contamination": contamination},
        )

    k = s / d
    psi = s ** (-0.5)
    dpsi = psi * (-k - complex(potential_derivative(z0, spec)) / (4.0 * diff))
    return WkbSeed(
        anchor=z0,
        direction=d,
        energy=e,
        psi=psi,
        dpsi=dpsi,
        branch=s,
        error_estimate=eps,
        contamination=contamination,
    )


def relative_tolerance(spec: ProblemSpec, settings: Settings) -> float:
    """The integrator rtol: the problem's own ode_tolerance, else the ode_rtol setting."""
    return settings.ode_rtol if spec.ode_tolerance is None else spec.ode_tolerance


def _require_finite(energies: ComplexArray) -> None:
    bad = [str(e) for e in np.asarray(energies, dtype=complex).ravel() if not cmath.isfinite(e)]
    if bad:
        raise InvalidParameterError(
            f"non-finite energy {bad[0]}", details={"energies": bad[:4]}
        )


def _pieces(spec: ProblemSpec, energies: ComplexArray, start: complex, end: complex) -> int:
    length = abs(end - start)
    probe = start + (end - start) * np.linspace(0.0, 1.0, 9)
    rate = max(float(local_wavenumber(probe, complex(e), spec).max()) for e in energies)
    count = math.ceil(rate * length / MAX_PIECE_EXPONENT)
    return max(1, count)


def _renormalize(
    state: _BatchState, z: complex, energies: ComplexArray, spec: ProblemSpec, *, force: bool = False
) -> None:
    """Divide out max(|psi|, |psi'|/kappa) where it left the window, or everywhere with ``force``."""
    kappa = _kappa(z, energies, spec)
    scale = np.maximum(np.abs(state.psi), np.abs(state.dpsi) / kappa)
    low, high = RENORMALIZE_WINDOW
    outside = (scale > 0) & (force | (scale < low) | (scale > high))
    if np.any(outside):
        factor = np.where(outside, scale, 1.0)
        state.psi = state.psi / factor
        state.dpsi = state.dpsi / factor
        state.logs = state.logs + np.log(factor)


def _integrate(
    path: ComplexArray,
    psi0: ComplexArray,
    dpsi0: ComplexArray,
    energies: ComplexArray,
    spec: ProblemSpec,
    *,
    rtol: float,
    atol: float,
    spacing: float | None,
    track_log_derivative: bool,
) -> tuple[_BatchState, list[int]]:
    _require_finite(energies)
    n = len(energies)
    h2 = spec.hbar_eff**2
    a = spec.linear_coefficient
    state = _BatchState(
        psi=psi0.astype(complex),
        dpsi=dpsi0.astype(complex),
        logs=np.zeros(n),
        integrals=np.zeros(2 * n, dtype=complex),
    )
    state.record(complex(path[0]), state.psi, state.dpsi)
    node_index = [0]
    total_length = float(np.sum(np.abs(np.diff(path))))

    for seg, (za, zb) in enumerate(zip(path[:-1], path[1:], strict=True)):
        za, zb = complex(za), complex(zb)
        if za == zb:
            node_index.append(len(state.samples_z) - 1)
            continue
        pieces = _pieces(spec, energies, za, zb)
        for j in range(pieces):
            pa = za + (zb - za) * j / pieces
            pb = za + (zb - za) * (j + 1) / pieces
            _renormalize(state, pa, energies, spec)
            delta = pb - pa
            length = abs(delta)
            count = 1 if spacing is None else max(1, math.ceil(length / spacing - 1e-9))
            t_eval = np.linspace(0.0, 1.0, count + 1)

            def rhs(t: float, y: ComplexArray, pa: complex = pa, delta: complex = delta) -> ComplexArray:
                z = pa + delta * t
                q = (1j * (z**3 + a * z) - energies) / h2
                psi = y[:n]
                dpsi = y[n : 2 * n]
                out = np.empty_like(y)
                out[:n] = delta * dpsi
                out[n : 2 * n] = delta * q * psi
                if track_log_derivative:
                    ratio = dpsi / psi
                    out[2 * n : 3 * n] = delta * ratio
                    out[3 * n :] = delta * z * ratio
                return out

            kappa = _kappa(pa, energies, spec)
            scale = np.maximum(np.abs(state.psi), np.abs(state.dpsi) / kappa)
            scale = np.where(scale > 0, scale, 1.0)
            atol_vec = [atol * scale, atol * scale * kappa]
            y0 = [state.psi, state.dpsi]
            if track_log_derivative:
                y0.append(np.zeros(2 * n, dtype=complex))
                atol_vec.append(np.full(2 * n, atol))
            sol = solve_ivp(
                rhs,
                (0.0, 1.0),
                np.concatenate(y0),
                method="DOP853",
                t_eval=t_eval,
                rtol=rtol,
                atol=np.concatenate(atol_vec),
            )
            if sol.status != 0 or sol.y.shape[1] != len(t_eval):
                raise PropagationError(
                    f"integration failed on segment {seg} near {pa}: {sol.message}",
                    details={
                        "segment": seg,
                        "start": str(pa),
                        "end": str(pb),
                        "path_length": total_length,
                        "energies": [str(e) for e in energies[:4]],
                    },
                )
            for col in range(1, len(t_eval)):
                z = pa + delta * t_eval[col]
                state.record(z, sol.y[:n, col], sol.y[n : 2 * n, col])
            state.psi = sol.y[:n, -1].copy()
            state.dpsi = sol.y[n : 2 * n, -1].copy()
            if track_log_derivative:
                state.integrals = state.integrals + sol.y[2 * n :, -1]
        node_index.append(len(state.samples_z) - 1)
    _renormalize(state, complex(path[-1]), energies, spec, force=True)
    return state, node_index


def propagate(
    seed: WkbSeed,
    path: list[complex] | ComplexArray,
    energy: complex | None = None,
    spec: ProblemSpec | None = None,
    *,
    spacing: float | None = 0.05,
    track_log_derivative: bool = False,
    settings: Settings | None = None,
) -> PathSolution:
    """Propagate a seeded solution along ``path`` (which must start at the anchor).

    Args:
        seed: Initial data
        path: Complex waypoints
        energy: Energy; defaults to the seed energy and must agree with it
        spec: Problem definition
        spacing: Maximum distance between stored samples, None for waypoints only
        track_log_derivative: Also integrate psi'/psi and z psi'/psi

    Raises:
        PropagationError: integrator failure (step underflow near a singularity)
    """
    if spec is None:
        raise InvalidParameterError("propagate needs a problem spec")
    e = seed.energy if energy is None else complex(energy)
    if abs(e - seed.energy) > 1e-14 * (1.0 + abs(e)):
        raise InvalidParameterError(f"energy {e} differs from the seed energy {seed.energy}")
    waypoints = np.asarray(path, dtype=complex)
    if abs(waypoints[0] - seed.anchor) > 1e-12 * (1.0 + abs(seed.anchor)):
        raise InvalidParameterError("path must start at the seed anchor")
    return propagate_state(
        seed.psi, seed.dpsi, waypoints, e, spec,
        spacing=spacing, track_log_derivative=track_log_derivative, settings=settings,
    )


def propagate_state(
    psi: complex,
    dpsi: complex,
    path: ComplexArray,
    energy: complex,
    spec: ProblemSpec,
    *,
    log_scale: float = 0.0,
    spacing: float | None = 0.05,
    track_log_derivative: bool = False,
    settings: Settings | None = None,
) -> PathSolution:
    """Propagate arbitrary data (psi, psi') given at ``path[0]``."""
    cfg = settings or get_settings()
    energies = np.array([complex(energy)])
    state, nodes = _integrate(
        np.asarray(path, dtype=complex),
        np.array([psi]),
        np.array([dpsi]),
        energies,
        spec,
        rtol=relative_tolerance(spec, cfg),
        atol=cfg.ode_atol,
        spacing=spacing,
        track_log_derivative=track_log_derivative,
    )
    return PathSolution(
        path=np.asarray(path, dtype=complex),
        energy=complex(energy),
        z=np.array(state.samples_z, dtype=complex),
        psi=np.array([p[0] for p in state.samples_psi], dtype=complex),
        dpsi=np.array([p[0] for p in state.samples_dpsi], dtype=complex),
        log_scales=np.array([lg[0] for lg in state.samples_log]) + log_scale,
        node_index=np.asarray(nodes, dtype=np.int64),
        log_integrals=state.integrals[[0, 1]] if track_log_derivative else None,
    )


def propagate_endpoints(
    seeds: list[WkbSeed],
    path: ComplexArray,
    spec: ProblemSpec,
    settings: Settings | None = None,
) -> tuple[ComplexArray, ComplexArray, NDArray[np.float64]]:
    """Propagate several seeds (same anchor, different energies) to the path end.

    The relative tolerance is divided by sqrt(n) because the integrator
    controls the RMS error over all components.

    Returns:
        (psi, psi', log_scale) arrays at the end of the path
    """
    cfg = settings or get_settings()
    energies = np.array([s.energy for s in seeds], dtype=complex)
    rtol = relative_tolerance(spec, cfg) / math.sqrt(len(seeds))
    state, _ = _integrate(
        np.asarray(path, dtype=complex),
        np.array([s.psi for s in seeds]),
        np.array([s.dpsi for s in seeds]),
        energies,
        spec,
        rtol=max(rtol, 1e-13),
        atol=cfg.ode_atol,
        spacing=None,
        track_log_derivative=False,
    )
    return state.psi, state.dpsi, state.logs


def wronskian(
    first: PathSolution, second: PathSolution
) -> tuple[ComplexArray, NDArray[np.float64]]:
    """W = psi_a psi_b' - psi_a' psi_b on shared samples, as (mantissa, log)."""
    mant = first.psi * second.dpsi - first.dpsi * second.psi
    return mant, first.log_scales + second.log_scales
