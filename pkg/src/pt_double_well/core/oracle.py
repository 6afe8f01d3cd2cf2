"""Dense harmonic-oscillator basis oracle for K(alpha) = p^2 + i(x^3 + alpha x).

The operator is assembled with exact banded matrix elements in a scaled
oscillator basis and diagonalized densely. An eigenvalue is certified when
it survives doubling the basis and changing the basis scale.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from numpy.typing import NDArray
from scipy.optimize import minimize_scalar

from pt_double_well.core.model import scale_h_to_alpha
from pt_double_well.core.settings import Settings, get_settings
from pt_double_well.exceptions import InvalidParameterError
from pt_double_well.models.problem import ComplexEnergy, HamiltonianForm, ProblemSpec
from pt_double_well.utils.complex_utils import nearest_matching

logger = logging.getLogger(__name__)

MIN_BASIS = 50


@dataclass
class OracleResult:
    """Certified eigenvalues plus what was dropped on the way."""

    levels: list[complex]
    basis_size: int
    omega: float
    excluded: int
    drift: list[float] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.levels)


def position_matrix(size: int, omega: float) -> NDArray[np.float64]:
    """x = (a + a^dagger) / sqrt(2 omega), tridiagonal."""
    off = np.sqrt(np.arange(1, size) / (2.0 * omega))
    return np.diag(off, 1) + np.diag(off, -1)


def kinetic_matrix(size: int, omega: float) -> NDArray[np.float64]:
    """p^2 with diagonal omega (n + 1/2) and second off-diagonals -(omega/2) sqrt((n+1)(n+2))."""
    n = np.arange(size)
    off = -0.5 * omega * np.sqrt((n[:-2] + 1.0) * (n[:-2] + 2.0))
    return np.diag(omega * (n + 0.5)) + np.diag(off, 2) + np.diag(off, -2)


def assemble_operator(alpha: complex, size: int, omega: float) -> NDArray[np.complex128]:
    """Matrix of p^2 + i(x^3 + alpha x) in the first ``size`` oscillator states.

    x^3 is cubed in a basis three states larger and then truncated, which
    makes every kept element exact.
    """
    x_big = position_matrix(size + 3, omega)
    x3 = (x_big @ x_big @ x_big)[:size, :size]
    x = x_big[:size, :size]
    return kinetic_matrix(size, omega) + 1j * (x3 + complex(alpha) * x)


def optimal_omega(size: int) -> float:
    """Scale balancing the kinetic cutoff against the cubic coupling at the basis edge."""
    result = minimize_scalar(
        lambda w: max(w * size / 2.0, (size / (2.0 * w)) ** 1.5),
        bounds=(1e-3, 1e3),
        method="bounded",
    )
    return float(result.x)


def raw_spectrum(alpha: complex, size: int, omega: float) -> NDArray[np.complex128]:
    """All eigenvalues of the truncated matrix, sorted by real part."""
    values = scipy.linalg.eigvals(assemble_operator(alpha, size, omega))
    return np.asarray(sorted(values, key=lambda e: (e.real, e.imag)), dtype=complex)


def certified_oracle(
    alpha: complex,
    basis_size: int | None = None,
    *,
    settings: Settings | None = None,
) -> OracleResult:
    """Eigenvalues of K(alpha) stable between (N, w), (2N, w) and (N, ratio * w).

    Returns:
        OracleResult with the 2N values of the certified eigenvalues
    """
    cfg = settings or get_settings()
    size = basis_size or cfg.oracle_basis_size
    if size < MIN_BASIS:
        raise InvalidParameterError(f"basis size must be at least {MIN_BASIS}, got {size}")

    omega = optimal_omega(size)
    base = raw_spectrum(alpha, size, omega)
    doubled = raw_spectrum(alpha, 2 * size, omega)
    rescaled = raw_spectrum(alpha, size, cfg.oracle_scale_ratio * omega)

    radius = cfg.oracle_match_radius
    to_doubled = {i: (j, d) for i, j, d in nearest_matching(list(base), list(doubled), radius)}
    to_rescaled = {i: (j, d) for i, j, d in nearest_matching(list(base), list(rescaled), radius)}

    levels: list[complex] = []
    drift: list[float] = []
    for i, value in enumerate(base):
        if i not in to_doubled or i not in to_rescaled:
            continue
        j, d_size = to_doubled[i]
        _, d_scale = to_rescaled[i]
        bound = cfg.oracle_stability * max(1.0, abs(value))
        if d_size <= bound and d_scale <= bound:
            levels.append(complex(doubled[j]))
            drift.append(max(d_size, d_scale))

    excluded = size - len(levels)
    logger.debug(
        "Oracle certified %d of %d eigenvalues (alpha=%s, N=%d, omega=%.4f)",
        len(levels), size, alpha, size, omega,
    )
    order = sorted(range(len(levels)), key=lambda k: (levels[k].real, levels[k].imag))
    return OracleResult(
        levels=[levels[k] for k in order],
        basis_size=size,
        omega=omega,
        excluded=excluded,
        drift=[drift[k] for k in order],
    )


def oracle_spectrum(
    spec: ProblemSpec,
    basis_size: int | None = None,
    *,
    settings: Settings | None = None,
) -> list[ComplexEnergy]:
    """Certified eigenvalues of the problem, H-form handled through the scaling map."""
    if spec.form is HamiltonianForm.H:
        alpha, factor = scale_h_to_alpha(spec.hbar)
    else:
        alpha, factor = complex(spec.alpha), 1.0 + 0j
    result = certified_oracle(alpha, basis_size, settings=settings)
    if result.excluded:
        logger.info("Oracle excluded %d unconverged eigenvalues", result.excluded)
    return [ComplexEnergy(value=factor * e) for e in result.levels]


def lowest_levels(spec: ProblemSpec, count: int, basis_size: int | None = None) -> list[complex]:
    """The ``count`` certified levels with the smallest real part.

    Raises:
        InvalidParameterError: fewer than ``count`` levels could be certified
    """
    levels = [e.value for e in oracle_spectrum(spec, basis_size)]
    if len(levels) < count:
        raise InvalidParameterError(
            f"oracle certified only {len(levels)} levels, {count} requested",
            details={"certified": len(levels), "requested": count},
        )
    return levels[:count]
