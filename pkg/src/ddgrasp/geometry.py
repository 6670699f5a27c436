"""Points, rotations and the two grasp representations.

Image frame throughout: origin top-left, x to the right, y downward.
Angles are radians measured from +x toward +y in that frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise GeometryError(f"non-finite point ({self.x}, {self.y})")

    def __add__(self, other: "Point2") -> "Point2":
        return Point2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Point2") -> "Point2":
        return Point2(self.x - other.x, self.y - other.y)

    def scale(self, k: float) -> "Point2":
        return Point2(self.x * k, self.y * k)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def dist(self, other: "Point2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)


def midpoint(a: Point2, b: Point2) -> Point2:
    return Point2(0.5 * (a.x + b.x), 0.5 * (a.y + b.y))


def wrap_pi(angle: float) -> float:
    """Reduce an axis angle into [0, pi)."""
    a = math.fmod(angle, math.pi)
    if a < 0:
        a += math.pi
    # fmod of values like -1e-17 lands exactly on pi after the shift
    if a >= math.pi:
        a = 0.0
    return a


def wrap_two_pi(angle: float) -> float:
    """Reduce a direction angle into (-pi, pi]."""
    a = math.remainder(angle, 2.0 * math.pi)
    if a <= -math.pi:
        a += 2.0 * math.pi
    return a


def angle_diff(a: float, b: float) -> float:
    """Unsigned difference between two directions, in [0, pi]."""
    return abs(math.remainder(a - b, 2.0 * math.pi))


def axis_angle_diff(a: float, b: float) -> float:
    """Unsigned difference between two undirected axes, in [0, pi/2]."""
    return abs(math.remainder(a - b, math.pi))


@dataclass(frozen=True)
class Rotation2:
    theta: float

    def matrix(self) -> np.ndarray:
        c, s = math.cos(self.theta), math.sin(self.theta)
        return np.array([[c, -s], [s, c]])

    def inverse(self) -> "Rotation2":
        return Rotation2(-self.theta)

    def apply(self, p: Point2, about: Point2 | None = None) -> Point2:
        c, s = math.cos(self.theta), math.sin(self.theta)
        ox, oy = (about.x, about.y) if about is not None else (0.0, 0.0)
        dx, dy = p.x - ox, p.y - oy
        return Point2(ox + c * dx - s * dy, oy + s * dx + c * dy)


@dataclass(frozen=True)
class DoubleDotGrasp:
    """A grasp given by the centers of its two fingertips."""

    c1: Point2
    c2: Point2

    def __post_init__(self):
        if self.c1 == self.c2:
            raise GeometryError("zero opening")

    @property
    def opening(self) -> float:
        return self.c1.dist(self.c2)

    @property
    def center(self) -> Point2:
        return midpoint(self.c1, self.c2)

    def swapped(self) -> "DoubleDotGrasp":
        return DoubleDotGrasp(self.c2, self.c1)


@dataclass(frozen=True)
class OrientedRect:
    """Grasp rectangle: center, opening ``w``, jaw size ``h``, axis angle ``theta`` in [0, pi)."""

    center: Point2
    w: float
    h: float
    theta: float

    def __post_init__(self):
        if not (self.w > 0 and math.isfinite(self.w)):
            raise GeometryError(f"rectangle opening must be positive, got {self.w}")
        if not (self.h > 0 and math.isfinite(self.h)):
            raise GeometryError(f"rectangle jaw size must be positive, got {self.h}")
        if not (0.0 <= self.theta < math.pi):
            raise GeometryError(f"rectangle angle {self.theta} outside [0, pi)")

    @classmethod
    def make(cls, x: float, y: float, w: float, h: float, theta: float) -> "OrientedRect":
        """Build a rectangle, reducing any angle into [0, pi)."""
        return cls(Point2(x, y), w, h, wrap_pi(theta))

    def corners(self) -> list[Point2]:
        """Corners in positive-shoelace order."""
        c, s = math.cos(self.theta), math.sin(self.theta)
        hw, hh = 0.5 * self.w, 0.5 * self.h
        out = []
        for u, v in ((-hw, -hh), (hw, -hh), (hw, hh), (-hw, hh)):
            out.append(Point2(self.center.x + c * u - s * v, self.center.y + s * u + c * v))
        return out

    @property
    def area(self) -> float:
        return self.w * self.h


def rect_to_grasp(r: OrientedRect) -> DoubleDotGrasp:
    hx = 0.5 * r.w * math.cos(r.theta)
    hy = 0.5 * r.w * math.sin(r.theta)
    return DoubleDotGrasp(
        Point2(r.center.x + hx, r.center.y + hy),
        Point2(r.center.x - hx, r.center.y - hy),
    )


def grasp_axis_angle(g: DoubleDotGrasp) -> float:
    if g.c1 == g.c2:
        raise GeometryError("zero opening")
    return wrap_pi(math.atan2(g.c2.y - g.c1.y, g.c2.x - g.c1.x))


def grasp_to_rect(g: DoubleDotGrasp, h: float) -> OrientedRect:
    if g.c1 == g.c2:
        raise GeometryError("zero opening")
    if not h > 0:
        raise GeometryError(f"jaw size must be positive, got {h}")
    return OrientedRect(g.center, g.opening, h, grasp_axis_angle(g))


def fingertip_orientation(c: Point2, center: Point2) -> float:
    """Direction from a fingertip toward the grasp center, in (-pi, pi]."""
    if c == center:
        raise GeometryError("fingertip coincides with center")
    return math.atan2(center.y - c.y, center.x - c.x)


def transform_point(p: Point2, theta: float, tx: float, ty: float) -> Point2:
    """Rotate about the origin by ``theta`` then translate."""
    q = Rotation2(theta).apply(p)
    return Point2(q.x + tx, q.y + ty)


def transform_rect(r: OrientedRect, theta: float, tx: float, ty: float) -> OrientedRect:
    c = transform_point(r.center, theta, tx, ty)
    return OrientedRect(c, r.w, r.h, wrap_pi(r.theta + theta))


def transform_grasp(g: DoubleDotGrasp, theta: float, tx: float, ty: float) -> DoubleDotGrasp:
    return DoubleDotGrasp(transform_point(g.c1, theta, tx, ty), transform_point(g.c2, theta, tx, ty))
