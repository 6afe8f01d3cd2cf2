"""Independent identity checks on converged states.

Flux identities on the imaginary axis and on horizontal lines, the PT gauge
and its reality check, the P_xT partner relation and the bilinear
P-overlap on the real line.
"""

from __future__ import annotations

import logging
import math

import numpy as np
from numpy.typing import NDArray

from pt_double_well.core.eigensolver import Eigenpair, StateValues
from pt_double_well.core.model import ComplexArray, imaginary_turning_ordinate
from pt_double_well.exceptions import (
    ConvergenceError,
    InvalidParameterError,
    SymmetryViolationError,
)
from pt_double_well.models.problem import HamiltonianForm
from pt_double_well.models.records import CheckReport, FluxReport

logger = logging.getLogger(__name__)

FLUX_SPACING = 1e-3
REALITY_TOLERANCE = 1e-6
TAIL_TOLERANCE = 1e-6
WEDGE_REACH = 6.0


def _real_hbar(pair: Eigenpair) -> float:
    h = pair.spec.hbar_eff
    if h.imag != 0.0:
        raise InvalidParameterError(f"flux identities need a real hbar, got {h}")
    return h.real


def _is_real_level(pair: Eigenpair, tol: float = 1e-10) -> bool:
    return abs(pair.value.imag) <= tol * max(1.0, abs(pair.value))


def cumulative_hermite(
    t: NDArray[np.float64], g: NDArray[np.float64], dg: NDArray[np.float64]
) -> NDArray[np.float64]:
    """Running integral of g from t[0], trapezoid plus the endpoint derivative correction."""
    dt = np.diff(t)
    pieces = 0.5 * dt * (g[:-1] + g[1:]) + dt**2 / 12.0 * (dg[:-1] - dg[1:])
    return np.concatenate([[0.0], np.cumsum(pieces)])


def _axis_samples(pair: Eigenpair, y_min: float, y_max: float, spacing: float) -> tuple[NDArray[np.float64], ComplexArray, ComplexArray]:
    # Downward from the oscillatory end: psi grows toward -i infinity.
    line: StateValues = pair.trace_line(1j * y_max, 1j * y_min, spacing=spacing)
    psi, dpsi = line.values()
    y = line.z.imag[::-1]
    return y, psi[::-1], 1j * dpsi[::-1]


def loeffel_martin_identity(
    pair: Eigenpair,
    *,
    y_range: tuple[float, float] | None = None,
    spacing: float = FLUX_SPACING,
) -> FluxReport:
    """h^2 Im(conj(phi) phi') against Im E times the running integral of |phi|^2, phi(y) = psi(iy).

    Both sides are measured from a base point, the end of the grid where
    |phi| is smaller; the base flux is reported. With base flux negligible
    the identity reads as the integral from the decaying end.
    """
    h = _real_hbar(pair)
    if y_range is None:
        top = imaginary_turning_ordinate(pair.value.real, pair.spec)
        y_range = (-1.0, top + 1.0)
    y_min, y_max = y_range
    if not y_max > y_min:
        raise InvalidParameterError(f"empty y range {y_range}")

    y, phi, dphi = _axis_samples(pair, y_min, y_max, spacing)
    density = np.abs(phi) ** 2
    d_density = 2.0 * np.real(np.conj(phi) * dphi)
    flux = h**2 * np.imag(np.conj(phi) * dphi)

    from_top = density[-1] < density[0]
    if from_top:
        y, density, d_density, flux = -y[::-1], density[::-1], -d_density[::-1], -flux[::-1]
    running = cumulative_hermite(y, density, d_density)
    lhs = flux - flux[0]
    rhs = pair.value.imag * running
    if from_top:
        y, lhs, rhs = -y[::-1], -lhs[::-1], -rhs[::-1]
        base_point, base_flux = y_max, float(-flux[0])
    else:
        base_point, base_flux = y_min, float(flux[0])

    scale = max(float(np.max(np.abs(lhs))), float(np.max(np.abs(rhs))), 1e-300)
    residual = float(np.max(np.abs(lhs - rhs)) / scale)
    converged = abs(base_flux) <= 1e-6 * scale or _is_real_level(pair)
    logger.debug(
        "Flux identity residual %.3e on [%.2f, %.2f] (base flux %.3e)",
        residual, y_min, y_max, base_flux,
    )
    return FluxReport(
        y=y.tolist(),
        lhs=lhs.tolist(),
        rhs=rhs.tolist(),
        max_relative_residual=residual,
        tail_converged=converged,
        im_energy=pair.value.imag,
        base_point=base_point,
        base_flux=base_flux,
    )


def wedge_flux_sign(
    pair: Eigenpair,
    x: float,
    y: float,
    *,
    spacing: float = 0.005,
    tolerance: float = 1e-6,
) -> CheckReport:
    """Sign of -Im[conj(psi) d_x psi] at x + iy against its one-sided integral.

    For |x| >= sqrt(3)|y| the integrand (s^3 - 3 s y^2 + alpha s)|psi|^2
    keeps the sign of x on the tail, so the flux cannot vanish there.
    """
    spec = pair.spec
    if spec.form is not HamiltonianForm.K or spec.alpha.imag != 0.0 or spec.alpha.real < 0.0:
        raise InvalidParameterError("the wedge flux check needs the K-form with real alpha >= 0")
    if not _is_real_level(pair):
        raise InvalidParameterError(f"the wedge flux check needs a real level, got {pair.value}")

    applied = abs(x) >= math.sqrt(3.0) * abs(y)
    report = CheckReport(name="wedge_flux_sign", passed=True, applied=applied)
    if not applied:
        report.notes.append(f"|x| < sqrt(3)|y| at x={x}, y={y}: the integrand changes sign")
        return report

    direction = 1.0 if x >= 0 else -1.0
    reach = direction * min(0.9 * pair.truncation, abs(x) + WEDGE_REACH)
    line = pair.trace_line(complex(reach, y), complex(x, y), spacing=spacing)
    psi, dpsi = line.values()
    s = line.z.real[::-1]
    psi, dpsi = psi[::-1], dpsi[::-1]
    alpha = spec.alpha.real
    im_v = s**3 - 3.0 * s * y**2 + alpha * s
    d_im_v = 3.0 * s**2 - 3.0 * y**2 + alpha
    density = np.abs(psi) ** 2
    g = im_v * density
    dg = d_im_v * density + im_v * 2.0 * np.real(np.conj(psi) * dpsi)

    # Integral from x out to the end of the line: the right tail for x > 0,
    # minus the left tail for x < 0.
    outward = float(cumulative_hermite(s, g, dg)[-1])
    one_sided = direction * outward
    flux = float(-np.imag(np.conj(psi[0]) * dpsi[0]))
    residual = abs(flux - outward) / max(abs(flux), abs(outward), 1e-300)
    edge = float(density[-1] / max(float(np.max(density)), 1e-300))

    report.values.update(
        flux=flux, integral=one_sided, relative_residual=residual, expected_sign=direction, edge_density=edge
    )
    if flux <= 0.0:
        report.violations.append(f"flux {flux:.3e} is not positive")
    if one_sided == 0.0 or math.copysign(1.0, one_sided) != direction:
        report.violations.append(f"one-sided integral {one_sided:.3e} does not have sign {direction:+.0f}")
    if residual > tolerance:
        report.violations.append(f"flux and integral differ by {residual:.2e} relative")
    if edge > 1e-12:
        report.notes.append(f"|psi|^2 at the end of the line is {edge:.1e} of its maximum")
    report.passed = not report.violations
    return report


def pt_reality_defect(pair: Eigenpair, *, samples: int = 41) -> float:
    """max |Im psi(iy)| / |psi(iy)| over the axis below y~ + 1, skipping near-zeros."""
    top = imaginary_turning_ordinate(pair.value.real, pair.spec)
    points = 1j * np.linspace(-1.0, top + 1.0, samples)
    psi, _ = pair.evaluate(points).values()
    size = np.abs(psi)
    keep = size > 1e-8 * float(np.max(size))
    return float(np.max(np.abs(psi.imag[keep]) / size[keep]))


def pt_gauge(pair: Eigenpair, *, tolerance: float = REALITY_TOLERANCE, max_shifts: int = 5) -> Eigenpair:
    """Multiply by a unit constant so psi is real positive at the anchor on the imaginary axis.

    Raises:
        InvalidParameterError: the level or hbar is not real
        SymmetryViolationError: psi is not real on the imaginary axis afterwards
    """
    if not pair.spec.is_pt_real or not _is_real_level(pair):
        raise InvalidParameterError(
            f"no PT gauge for E={pair.value} at parameter {pair.spec.parameter}",
            details={"energy": str(pair.value)},
        )
    anchor = 1j * pair.anchor.imag
    shifted = False
    psi, dpsi = pair.evaluate_one(anchor)
    for _ in range(max_shifts):
        if abs(psi) > 1e-6 * max(abs(dpsi), 1.0):
            break
        logger.warning("psi nearly vanishes at gauge anchor %s, shifting", anchor)
        anchor += 0.1j
        shifted = True
        psi, dpsi = pair.evaluate_one(anchor)
    gauged = pair.with_gauge(abs(psi) / psi)
    gauged.anchor = anchor
    gauged.anchor_shifted = pair.anchor_shifted or shifted
    defect = pt_reality_defect(gauged)
    if defect > tolerance:
        raise SymmetryViolationError(
            f"psi is not real on the imaginary axis after gauging (defect {defect:.2e})",
            details={"defect": defect, "anchor": str(anchor)},
        )
    return gauged


def pxt_partner_defect(plus: Eigenpair, minus: Eigenpair, points: ComplexArray | None = None) -> float:
    """Relative misfit of psi^+(z) = c conj(psi^-(-conj z)) with the best unit constant c."""
    if abs(plus.value - minus.value.conjugate()) > 1e-8 * max(1.0, abs(plus.value)):
        raise InvalidParameterError(f"{plus.value} and {minus.value} are not a conjugate pair")
    if points is None:
        xs = np.linspace(-1.0, 1.0, 5)
        ys = np.linspace(-1.0, 0.5, 4)
        points = (xs[:, None] + 1j * ys[None, :]).ravel()
    pts = np.asarray(points, dtype=complex)
    a, _ = plus.evaluate(pts).values()
    b, _ = minus.evaluate(-np.conj(pts)).values()
    b = np.conj(b)
    c = np.vdot(b, a) / np.vdot(b, b)
    c /= abs(c)
    return float(np.max(np.abs(a - c * b)) / np.max(np.abs(a)))


def _tail(psi: complex, dpsi: complex, outward: float) -> tuple[complex, float]:
    """int psi^2 and int |psi|^2 beyond an endpoint where psi ~ exp(-kappa |x|)."""
    kappa = -outward * dpsi / psi
    if kappa.real <= 0:
        raise ConvergenceError(f"state is not decaying at the truncation edge (kappa={kappa})")
    return psi**2 / (2.0 * kappa), abs(psi) ** 2 / (2.0 * kappa.real)


def p_overlap(pair: Eigenpair, *, normalize: bool = True) -> complex:
    """Bilinear int psi(x)^2 dx over the real line in the PT gauge.

    With ``normalize`` the state is scaled so int |psi|^2 dx = 1 first.

    Raises:
        InvalidParameterError: the level is not real
        ConvergenceError: the closed-form tails are not negligible against the total
    """
    gauged = pt_gauge(pair)
    x, psi, dpsi = gauged.real_axis()
    sq = psi**2
    d_sq = 2.0 * psi * dpsi
    mod = np.abs(psi) ** 2
    d_mod = 2.0 * np.real(np.conj(psi) * dpsi)

    dx = np.diff(x)
    bilinear = complex(np.sum(0.5 * dx * (sq[:-1] + sq[1:]) + dx**2 / 12.0 * (d_sq[:-1] - d_sq[1:])))
    norm = float(cumulative_hermite(x, mod, d_mod)[-1])

    left_sq, left_mod = _tail(complex(psi[0]), complex(dpsi[0]), -1.0)
    right_sq, right_mod = _tail(complex(psi[-1]), complex(dpsi[-1]), 1.0)
    tails = abs(left_sq) + abs(right_sq) + left_mod + right_mod
    if tails > TAIL_TOLERANCE * max(norm, abs(bilinear)):
        raise ConvergenceError(
            f"real-line tails beyond +/-{gauged.truncation:.2f} carry {tails:.2e} of the integral",
            details={"tails": tails, "norm": norm},
        )
    bilinear += left_sq + right_sq
    norm += left_mod + right_mod
    return bilinear / norm if normalize else bilinear
