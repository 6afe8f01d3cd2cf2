"""Small complex-analysis helpers: rectangles, phase unwrapping, branch tracking."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray


@dataclass(frozen=True)
class Rectangle:
    """Axis-parallel rectangle [re_min, re_max] x [im_min, im_max]."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self) -> None:
        if not (self.re_max > self.re_min and self.im_max > self.im_min):
            raise ValueError(f"empty rectangle {self}")

    @property
    def corners(self) -> tuple[complex, complex, complex, complex]:
        """Counter-clockwise corners starting at the lower left."""
        return (
            complex(self.re_min, self.im_min),
            complex(self.re_max, self.im_min),
            complex(self.re_max, self.im_max),
            complex(self.re_min, self.im_max),
        )

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))

    @property
    def width(self) -> float:
        return self.re_max - self.re_min

    @property
    def height(self) -> float:
        return self.im_max - self.im_min

    def contains(self, z: complex, margin: float = 0.0) -> bool:
        return (
            self.re_min - margin <= z.real <= self.re_max + margin
            and self.im_min - margin <= z.imag <= self.im_max + margin
        )

    def boundary_distance(self, z: complex) -> float:
        return min(
            abs(z.real - self.re_min),
            abs(z.real - self.re_max),
            abs(z.imag - self.im_min),
            abs(z.imag - self.im_max),
        )

    def inflate(self, fraction: float) -> Rectangle:
        dx = 0.5 * fraction * self.width
        dy = 0.5 * fraction * self.height
        return Rectangle(self.re_min - dx, self.re_max + dx, self.im_min - dy, self.im_max + dy)

    def split(self, offset: float = 0.0) -> list[Rectangle]:
        """Four quadrants, or two halves when the rectangle is elongated.

        ``offset`` moves the cut lines by that fraction of the size.
        """
        xm = self.re_min + (0.5 + offset) * self.width
        ym = self.im_min + (0.5 + offset) * self.height
        if self.width > 2.0 * self.height:
            return [
                Rectangle(self.re_min, xm, self.im_min, self.im_max),
                Rectangle(xm, self.re_max, self.im_min, self.im_max),
            ]
        if self.height > 2.0 * self.width:
            return [
                Rectangle(self.re_min, self.re_max, self.im_min, ym),
                Rectangle(self.re_min, self.re_max, ym, self.im_max),
            ]
        return [
            Rectangle(self.re_min, xm, self.im_min, ym),
            Rectangle(xm, self.re_max, self.im_min, ym),
            Rectangle(self.re_min, xm, ym, self.im_max),
            Rectangle(xm, self.re_max, ym, self.im_max),
        ]

    def closed_path(self) -> list[complex]:
        c = self.corners
        return [c[0], c[1], c[2], c[3], c[0]]


def wrapped_increments(values: ArrayLike) -> NDArray[np.float64]:
    """Phase increments between consecutive samples, each wrapped to (-pi, pi]."""
    phase = np.angle(np.asarray(values, dtype=complex))
    diff = np.diff(phase)
    return (diff + math.pi) % (2.0 * math.pi) - math.pi


def continuous_sqrt(values: ArrayLike, start: complex | None = None) -> NDArray[np.complex128]:
    """Square roots along a sampled curve, with the sign chosen by continuity.

    ``start`` fixes the branch of the first sample when given.
    """
    vals = np.asarray(values, dtype=complex)
    roots = np.sqrt(vals)
    if roots.size == 0:
        return roots
    if start is not None and abs(roots[0] - start) > abs(roots[0] + start):
        roots[0] = -roots[0]
    for k in range(1, roots.size):
        if abs(roots[k] - roots[k - 1]) > abs(roots[k] + roots[k - 1]):
            roots[k] = -roots[k]
    return roots


def nearest_matching(
    reference: list[complex], candidates: list[complex], radius: float
) -> list[tuple[int, int, float]]:
    """Greedy nearest-distance assignment, rejecting pairs farther than ``radius``.

    Returns:
        (reference index, candidate index, distance) triples
    """
    pairs = sorted(
        (abs(r - c), i, j)
        for i, r in enumerate(reference)
        for j, c in enumerate(candidates)
        if abs(r - c) <= radius
    )
    used_ref: set[int] = set()
    used_cand: set[int] = set()
    matches = []
    for dist, i, j in pairs:
        if i in used_ref or j in used_cand:
            continue
        used_ref.add(i)
        used_cand.add(j)
        matches.append((i, j, dist))
    return sorted(matches)
