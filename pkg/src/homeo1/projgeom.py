"""Unoriented tangent directions on the plane.

A direction is a line through a point, stored as an angle in [0, pi).
Vertical lines are ordinary directions (pi/2); the slope representation
uses ``INF`` for them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Sequence

import numpy as np

INF = math.inf
ANGLE_EPS = 1e-12


class Point2(NamedTuple):
    x: float
    y: float

    def __add__(self, other):  # type: ignore[override]
        return Point2(self.x + other[0], self.y + other[1])

    def __sub__(self, other):
        return Point2(self.x - other[0], self.y - other[1])

    def scale(self, s: float) -> "Point2":
        return Point2(self.x * s, self.y * s)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)


def _wrap(theta: float) -> float:
    t = math.fmod(theta, math.pi)
    if t < 0.0:
        t += math.pi
    if t >= math.pi:
        t = 0.0
    return t


@dataclass(frozen=True)
class ProjDir:
    """A point of the projective line, i.e. an angle modulo pi."""

    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", _wrap(float(self.theta)))

    @property
    def slope(self) -> float:
        if abs(self.theta - math.pi / 2) < ANGLE_EPS:
            return INF
        return math.tan(self.theta)

    def rotated(self, angle: float) -> "ProjDir":
        return ProjDir(self.theta + angle)

    def vector(self) -> tuple[float, float]:
        return (math.cos(self.theta), math.sin(self.theta))


def dir_from_slope(m: float) -> ProjDir:
    if math.isinf(m):
        return ProjDir(math.pi / 2)
    return ProjDir(math.atan(m))


def dir_from_vector(dx: float, dy: float) -> ProjDir:
    return ProjDir(math.atan2(dy, dx))


def proj_distance(a: ProjDir, b: ProjDir) -> float:
    d = abs(a.theta - b.theta)
    return min(d, math.pi - d)


class Orientation(str, Enum):
    CW = "CW"
    CCW = "CCW"
    DEGENERATE = "DEGENERATE"


def cyclic_order(a: ProjDir, b: ProjDir, c: ProjDir) -> Orientation:
    if (
        proj_distance(a, b) <= ANGLE_EPS
        or proj_distance(b, c) <= ANGLE_EPS
        or proj_distance(a, c) <= ANGLE_EPS
    ):
        return Orientation.DEGENERATE
    db = _wrap(b.theta - a.theta)
    dc = _wrap(c.theta - a.theta)
    return Orientation.CCW if db < dc else Orientation.CW


def circular_mean(dirs: Sequence[ProjDir]) -> ProjDir:
    """Mean on the projective line via doubled angles."""
    two = np.array([2.0 * d.theta for d in dirs])
    return ProjDir(0.5 * math.atan2(np.sin(two).sum(), np.cos(two).sum()))


def default_h_grid() -> tuple[float, ...]:
    return tuple(float(h) for h in np.geomspace(1e-4, 1e-6, 5))


@dataclass(frozen=True)
class ResolutionParams:
    """Finite stand-ins for the limits in the definitions.

    ``tail_start`` and ``tail_ratio`` shape the geometric parameter tail used by
    the C1 surrogate; ``h_rel`` caps finite-difference steps relative to the
    distance from the probed parameter; ``trend_exponent`` is the minimum
    power-law decay rate accepted as convergence on a finite tail.
    """

    tail_length: int = 40
    dir_tolerance: float = 1e-3
    slope_tolerance: float = 1e-3
    h_grid: tuple[float, ...] = field(default_factory=default_h_grid)
    tail_ratio: float = 0.7
    tail_start: float = 0.1
    h_rel: float = 1e-4
    trend_exponent: float = 0.5

    def __post_init__(self):
        if self.tail_length < 1:
            raise ValueError("tail_length must be positive")
        if self.dir_tolerance <= 0 or self.slope_tolerance <= 0:
            raise ValueError("tolerances must be positive")
        hs = tuple(float(h) for h in self.h_grid)
        if not hs or any(h <= 0 for h in hs):
            raise ValueError("h_grid must contain positive steps")
        if any(b >= a for a, b in zip(hs, hs[1:])):
            raise ValueError("h_grid must be strictly decreasing")
        object.__setattr__(self, "h_grid", hs)
        if not 0 < self.tail_ratio < 1:
            raise ValueError("tail_ratio must lie in (0, 1)")

    def with_overrides(self, **kw) -> "ResolutionParams":
        data = self.as_dict()
        data.update(kw)
        return ResolutionParams(**data)

    def as_dict(self) -> dict:
        return {
            "tail_length": self.tail_length,
            "dir_tolerance": self.dir_tolerance,
            "slope_tolerance": self.slope_tolerance,
            "h_grid": list(self.h_grid),
            "tail_ratio": self.tail_ratio,
            "tail_start": self.tail_start,
            "h_rel": self.h_rel,
            "trend_exponent": self.trend_exponent,
        }
