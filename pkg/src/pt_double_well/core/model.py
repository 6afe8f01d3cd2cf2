"""Potential evaluation, scaling maps and turning points.

Everything here is pure and reentrant. Potentials accept scalars or numpy
arrays.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.typing import ArrayLike, NDArray

from pt_double_well.exceptions import DegenerateTurningPointError, InvalidParameterError
from pt_double_well.models.problem import HBAR_SECTOR, ProblemSpec

SQRT3 = math.sqrt(3.0)
WELL_CENTER = 1.0 / SQRT3
WELL_DEPTH = 2.0 / (3.0 * SQRT3)
CAUSTIC_THRESHOLD = 1e-8

ComplexArray = NDArray[np.complex128]


def potential(z: ArrayLike, spec: ProblemSpec) -> complex | ComplexArray:
    """V(z) = i(z^3 - z) for the H-form, i(z^3 + alpha z) for the K-form."""
    zz = np.asarray(z, dtype=complex)
    value = 1j * (zz**3 + spec.linear_coefficient * zz)
    return complex(value) if value.ndim == 0 else value


def potential_derivative(z: ArrayLike, spec: ProblemSpec) -> complex | ComplexArray:
    zz = np.asarray(z, dtype=complex)
    value = 1j * (3.0 * zz**2 + spec.linear_coefficient)
    return complex(value) if value.ndim == 0 else value


def translated_potential(w: ArrayLike, well: int) -> complex | ComplexArray:
    """H-form potential re-centred at the well bottom x = well/sqrt(3), minus V there.

    V(x_well + w) - V(x_well) = i(w^3 + well*sqrt(3) w^2).
    """
    ww = np.asarray(w, dtype=complex)
    value = 1j * (ww**3 + well * SQRT3 * ww**2)
    return complex(value) if value.ndim == 0 else value


def well_bottom(well: int) -> tuple[float, complex]:
    """Position and potential value of the H-form well bottom x_{+/-}.

    Returns:
        (x, V(x)) with V(x_{+/-}) = -/+ i 2/(3 sqrt 3)
    """
    if well not in (1, -1):
        raise InvalidParameterError(f"well must be +1 or -1, got {well}")
    return well * WELL_CENTER, -1j * well * WELL_DEPTH


def rotated_potential(y: ArrayLike) -> float | NDArray[np.float64]:
    """Potential of the operator on the imaginary axis after z = iy: -y^3 - y."""
    yy = np.asarray(y, dtype=float)
    value = -(yy**3) - yy
    return float(value) if value.ndim == 0 else value


def _validate_hbar(hbar: complex) -> complex:
    h = complex(hbar)
    if h == 0 or abs(cmath.phase(h)) >= HBAR_SECTOR:
        raise InvalidParameterError(
            f"hbar={hbar} must be positive or lie in |arg hbar| < pi/4",
            details={"hbar": str(hbar)},
        )
    return h


def scale_h_to_alpha(hbar: complex) -> tuple[complex, complex]:
    """Map the H-form at hbar to the K-form.

    E(hbar) = hbar^(6/5) * E_K(alpha) with alpha = -hbar^(-4/5), principal
    branch on |arg hbar| < pi/4.

    Returns:
        (alpha, energy_factor)

    Raises:
        InvalidParameterError: hbar not positive / outside the sector
    """
    h = _validate_hbar(hbar)
    return -(h ** (-0.8)), h**1.2


def scale_alpha_to_h(alpha: complex) -> complex:
    """Inverse of scale_h_to_alpha: hbar = (-alpha)^(-5/4)."""
    a = complex(alpha)
    if a == 0:
        raise InvalidParameterError("alpha = 0 has no H-form counterpart")
    hbar = (-a) ** (-1.25)
    _validate_hbar(hbar)
    return hbar


def beta_from_hbar(hbar: complex, well: int = 1) -> complex:
    """Coupling of p^2 + u^2 + i sqrt(beta) u^3 equivalent to the H-form near a well.

    With w = lambda u and lambda^4 = hbar^2 / (well * i sqrt 3) the H-form
    becomes (hbar^2/lambda^2)(p^2 + u^2 + i sqrt(beta) u^3) + V(x_well) and
    beta = hbar * (well * i sqrt 3)^(-5/2).
    """
    h = _validate_hbar(hbar)
    return h * (well * 1j * SQRT3) ** (-2.5)


def energy_from_beta_level(e_beta: complex, hbar: complex, well: int = 1) -> complex:
    """H-form energy of a level E_beta of p^2 + u^2 + i sqrt(beta) u^3."""
    h = _validate_hbar(hbar)
    _, bottom = well_bottom(well)
    return bottom + h * cmath.sqrt(well * 1j * SQRT3) * e_beta


class ParameterKind(str, Enum):
    HBAR = "hbar"
    ALPHA = "alpha"


@dataclass(frozen=True)
class ParameterPath:
    """A segment or circular arc in a complex parameter plane.

    Arcs are ``center + (start - center) * exp(i * sweep * t)`` for t in [0, 1].
    """

    kind: ParameterKind
    start: complex
    end: complex
    center: complex | None = None
    sweep: float = 0.0

    @property
    def is_arc(self) -> bool:
        return self.center is not None

    def at(self, t: float) -> complex:
        if self.center is not None:
            return self.center + (self.start - self.center) * cmath.exp(1j * self.sweep * t)
        return self.start + (self.end - self.start) * t

    @property
    def length(self) -> float:
        if self.center is not None:
            return abs(self.start - self.center) * abs(self.sweep)
        return abs(self.end - self.start)

    def reversed(self) -> ParameterPath:
        if self.center is not None:
            return ParameterPath(self.kind, self.end, self.start, self.center, -self.sweep)
        return ParameterPath(self.kind, self.end, self.start)

    @classmethod
    def segment(cls, kind: ParameterKind, start: complex, end: complex) -> ParameterPath:
        return cls(kind, complex(start), complex(end))

    @classmethod
    def arc(
        cls, kind: ParameterKind, center: complex, start: complex, sweep: float
    ) -> ParameterPath:
        c, s = complex(center), complex(start)
        return cls(kind, s, c + (s - c) * cmath.exp(1j * sweep), c, sweep)


def continuation_path_alpha(hbar: float, sign: int) -> ParameterPath:
    """Arc |alpha| = hbar^(-4/5) from the positive real axis to exp(+/- i pi) hbar^(-4/5).

    Sign +1 runs through the upper half plane, -1 through the lower one.
    """
    if hbar <= 0:
        raise InvalidParameterError(f"hbar must be positive, got {hbar}")
    if sign not in (1, -1):
        raise InvalidParameterError(f"sign must be +1 or -1, got {sign}")
    radius = hbar ** (-0.8)
    return ParameterPath.arc(ParameterKind.ALPHA, 0.0, radius, sign * math.pi)


@dataclass(frozen=True)
class TurningPoints:
    """Roots of V(z) = E, classified as I0 (imaginary point) and I-/I+.

    I0 is the root with the smallest |Re z|; the other two are ordered by real
    part.
    """

    energy: complex
    roots: tuple[complex, complex, complex]
    imaginary_point: complex
    minus: complex
    plus: complex
    degenerate: bool
    separation: float

    def require_nondegenerate(self) -> TurningPoints:
        if self.degenerate:
            raise DegenerateTurningPointError(
                f"turning points coalesce at E={self.energy} (separation {self.separation:.2e})",
                details={"energy": str(self.energy), "separation": self.separation},
            )
        return self

    def pair(self, which: str) -> tuple[complex, complex, complex]:
        """Return (a, b, c): the pair named by ``which`` and the third root.

        ``which`` is one of "I+I-", "I0I+", "I0I-".
        """
        if which == "I+I-":
            return self.minus, self.plus, self.imaginary_point
        if which == "I0I+":
            return self.imaginary_point, self.plus, self.minus
        if which == "I0I-":
            return self.minus, self.imaginary_point, self.plus
        raise InvalidParameterError(f"unknown turning-point pair {which!r}")

    @property
    def max_modulus(self) -> float:
        return max(abs(r) for r in self.roots)


def _cubic_roots(p: complex, q: complex) -> list[complex]:
    """Roots of z^3 + p z + q = 0 by Cardano's formula."""
    delta = cmath.sqrt((q / 2) ** 2 + (p / 3) ** 3)
    u3 = -q / 2 + delta
    if abs(u3) < abs(-q / 2 - delta):
        u3 = -q / 2 - delta
    if u3 == 0:
        return [0j, 0j, 0j]
    u = u3 ** (1.0 / 3.0)
    omega = cmath.exp(2j * math.pi / 3)
    roots = []
    for k in range(3):
        uk = u * omega**k
        roots.append(uk - p / (3 * uk))
    return roots


def _polish(z: complex, p: complex, q: complex, steps: int = 3) -> complex:
    for _ in range(steps):
        d = 3 * z * z + p
        if d == 0:
            break
        z = z - (z**3 + p * z + q) / d
    return z


def turning_points(energy: complex, spec: ProblemSpec) -> TurningPoints:
    """Solve V(z) = E and classify the roots.

    i(z^3 + a z) = E is the depressed cubic z^3 + a z + iE = 0.
    """
    e = complex(energy)
    p = spec.linear_coefficient
    q = 1j * e
    roots = [_polish(r, p, q) for r in _cubic_roots(p, q)]

    separation = min(abs(roots[i] - roots[j]) for i in range(3) for j in range(i + 1, 3))
    degenerate = separation < CAUSTIC_THRESHOLD * (1.0 + abs(e))

    # Ties in |Re z| resolve towards the upper half plane.
    i0 = min(range(3), key=lambda k: (round(abs(roots[k].real), 12), -roots[k].imag))
    rest = sorted((roots[k] for k in range(3) if k != i0), key=lambda r: (r.real, r.imag))
    return TurningPoints(
        energy=e,
        roots=(roots[0], roots[1], roots[2]),
        imaginary_point=roots[i0],
        minus=rest[0],
        plus=rest[1],
        degenerate=degenerate,
        separation=separation,
    )


def imaginary_turning_ordinate(energy: float, spec: ProblemSpec) -> float:
    """Largest real y with V(iy) = E, i.e. y^3 - a y = E (H-form: y^3 + y = E)."""
    a = spec.linear_coefficient.real
    roots = np.roots([1.0, 0.0, -a, -float(energy)])
    real = roots[np.abs(roots.imag) < 1e-9 * (1.0 + np.abs(roots))].real
    return float(real.max())


def sigma_contains(z: complex, energy: float, spec: ProblemSpec, tolerance: float) -> bool:
    """Membership of z in the imaginary half-line i(-inf, y~(E))."""
    return abs(z.real) < tolerance and z.imag < imaginary_turning_ordinate(energy, spec)
