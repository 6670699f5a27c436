"""Planar grasp-execution oracle on simple polygons.

Polygons are stored with positive shoelace area (counterclockwise when the
y axis points up; the same vertex list looks clockwise on a y-down screen).
Outward edge normals are therefore ``(ey, -ex) / |e|`` for edge vector ``e``.

Fingertips are points: the plate width plays no part in closing, but each
fingertip must start strictly outside the object.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .geometry import DoubleDotGrasp, Point2, midpoint, transform_point

BOUNDARY_TOL = 1e-9


class SimError(ValueError):
    pass


def signed_area(vertices: Sequence[Point2]) -> float:
    s = 0.0
    n = len(vertices)
    for i in range(n):
        a, b = vertices[i], vertices[(i + 1) % n]
        s += a.x * b.y - b.x * a.y
    return 0.5 * s


def _orient(a: Point2, b: Point2, c: Point2) -> float:
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)


def _on_segment(a: Point2, b: Point2, p: Point2) -> bool:
    return min(a.x, b.x) <= p.x <= max(a.x, b.x) and min(a.y, b.y) <= p.y <= max(a.y, b.y)


def segments_intersect(a: Point2, b: Point2, c: Point2, d: Point2) -> bool:
    """Closed-segment intersection test, touching included."""
    o1, o2 = _orient(a, b, c), _orient(a, b, d)
    o3, o4 = _orient(c, d, a), _orient(c, d, b)
    if ((o1 > 0) != (o2 > 0)) and ((o3 > 0) != (o4 > 0)) and 0 not in (o1, o2, o3, o4):
        return True
    if o1 == 0 and _on_segment(a, b, c):
        return True
    if o2 == 0 and _on_segment(a, b, d):
        return True
    if o3 == 0 and _on_segment(c, d, a):
        return True
    if o4 == 0 and _on_segment(c, d, b):
        return True
    return False


def is_simple(vertices: Sequence[Point2]) -> bool:
    """Brute force: no two non-adjacent edges meet, adjacent edges share only their vertex."""
    n = len(vertices)
    if n < 3:
        return False
    if len(set(vertices)) != n:
        return False
    edges = [(vertices[i], vertices[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            adjacent = j == i + 1 or (i == 0 and j == n - 1)
            a, b = edges[i]
            c, d = edges[j]
            if adjacent:
                # shared vertex is fine; a collinear fold-back is not
                shared = b if j == i + 1 else a
                other_i = a if shared == b else b
                other_j = d if shared == c else c
                if _orient(a, b, other_j) == 0 and _on_segment(a, b, other_j):
                    return False
                if _orient(c, d, other_i) == 0 and _on_segment(c, d, other_i):
                    return False
                continue
            if segments_intersect(a, b, c, d):
                return False
    return True


@dataclass(frozen=True)
class PolygonScene:
    vertices: tuple[Point2, ...]
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        if len(self.vertices) < 3:
            raise SimError("polygon needs at least 3 vertices")
        if not signed_area(self.vertices) > 0:
            raise SimError("polygon must have positive (counterclockwise) area")
        if not is_simple(self.vertices):
            raise SimError("polygon is not simple")

    def edges(self) -> list[tuple[Point2, Point2]]:
        n = len(self.vertices)
        return [(self.vertices[i], self.vertices[(i + 1) % n]) for i in range(n)]

    def outward_normal(self, i: int) -> tuple[float, float]:
        a, b = self.edges()[i]
        ex, ey = b.x - a.x, b.y - a.y
        L = math.hypot(ex, ey)
        return ey / L, -ex / L

    def centroid(self) -> Point2:
        A = signed_area(self.vertices)
        cx = cy = 0.0
        for a, b in self.edges():
            cr = a.x * b.y - b.x * a.y
            cx += (a.x + b.x) * cr
            cy += (a.y + b.y) * cr
        return Point2(cx / (6 * A), cy / (6 * A))

    def bbox(self) -> tuple[float, float, float, float]:
        xs = [p.x for p in self.vertices]
        ys = [p.y for p in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)

    def contains(self, p: Point2) -> bool:
        """Inside or on the boundary."""
        for a, b in self.edges():
            if _point_segment_distance(p, a, b) <= BOUNDARY_TOL:
                return True
        inside = False
        for a, b in self.edges():
            if (a.y > p.y) != (b.y > p.y):
                x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y)
                if x_cross > p.x:
                    inside = not inside
        return inside

    def transformed(self, theta: float, tx: float, ty: float) -> "PolygonScene":
        return PolygonScene(tuple(transform_point(p, theta, tx, ty) for p in self.vertices), self.seed)


def _point_segment_distance(p: Point2, a: Point2, b: Point2) -> float:
    ex, ey = b.x - a.x, b.y - a.y
    L2 = ex * ex + ey * ey
    t = 0.0 if L2 == 0 else max(0.0, min(1.0, ((p.x - a.x) * ex + (p.y - a.y) * ey) / L2))
    return math.hypot(p.x - (a.x + t * ex), p.y - (a.y + t * ey))


@dataclass(frozen=True)
class SceneParams:
    n_vertices: tuple[int, int] = (5, 9)
    radius: tuple[float, float] = (14.0, 26.0)
    irregularity: float = 0.3
    center: tuple[float, float] = (256.0, 256.0)

    def __post_init__(self):
        lo, hi = self.n_vertices
        if lo < 3 or hi < lo:
            raise SimError(f"bad vertex-count range {self.n_vertices}")
        rlo, rhi = self.radius
        if not 0 < rlo <= rhi:
            raise SimError(f"bad radius range {self.radius}")
        if not 0 <= self.irregularity < 1:
            raise SimError("irregularity must lie in [0, 1)")


def generate_scene(seed: int, params: SceneParams = SceneParams()) -> PolygonScene:
    """Random star-shaped polygon around ``params.center``; deterministic in ``seed``."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(params.n_vertices[0], params.n_vertices[1] + 1))
    r = float(rng.uniform(*params.radius)) if params.radius[0] < params.radius[1] else float(params.radius[0])
    phase = float(rng.uniform(0.0, 2 * math.pi))
    irr = params.irregularity
    step = 2 * math.pi / n
    # jitter stays below half a step, so angles remain strictly increasing
    angles = phase + step * (np.arange(n) + irr * rng.uniform(-0.5, 0.5, n))
    radii = r * (1.0 + irr * rng.uniform(-0.5, 0.5, n))
    cx, cy = params.center
    verts = tuple(Point2(cx + float(rr * math.cos(a)), cy + float(rr * math.sin(a))) for a, rr in zip(angles, radii))
    return PolygonScene(verts, seed)


@dataclass(frozen=True)
class GripperModel:
    min_opening: float = 2.0
    max_opening: float = 70.0
    plate_halfwidth: float = 5.0
    mu: float = 0.4

    def __post_init__(self):
        if not 0 < self.min_opening < self.max_opening:
            raise SimError("need 0 < min_opening < max_opening")
        if not self.mu > 0:
            raise SimError("friction coefficient must be positive")
        if not self.plate_halfwidth > 0:
            raise SimError("plate half-width must be positive")

    @property
    def cone_half_angle(self) -> float:
        return math.atan(self.mu)


SUCCESS = "success"
COLLISION = "collision"
OPENING = "opening"
NO_CONTACT = "no_contact"
FRICTION = "friction_cone"


@dataclass(frozen=True)
class Contact:
    point: Point2
    normal: tuple[float, float]  # outward
    deviation: float  # angle between closing direction and inward normal


@dataclass(frozen=True)
class GraspOutcome:
    success: bool
    reason: str = SUCCESS
    contacts: tuple[Contact, ...] = ()

    def __bool__(self):
        return self.success


def _first_contact(scene: PolygonScene, start: Point2, end: Point2) -> tuple[Point2, tuple[float, float]] | None:
    """First boundary point on segment start->end with its outward normal."""
    dx, dy = end.x - start.x, end.y - start.y
    best = None
    n = len(scene.vertices)
    edges = scene.edges()
    for i, (a, b) in enumerate(edges):
        ex, ey = b.x - a.x, b.y - a.y
        den = dx * ey - dy * ex
        if den == 0:
            continue
        wx, wy = a.x - start.x, a.y - start.y
        t = (wx * ey - wy * ex) / den
        s = (wx * dy - wy * dx) / den
        if 0.0 <= t <= 1.0 and -BOUNDARY_TOL <= s <= 1.0 + BOUNDARY_TOL:
            if best is None or t < best[0]:
                best = (t, i, s)
    if best is None:
        return None
    t, i, s = best
    p = Point2(start.x + t * dx, start.y + t * dy)
    nx, ny = scene.outward_normal(i)
    if s <= BOUNDARY_TOL or s >= 1.0 - BOUNDARY_TOL:
        # vertex contact: bisect the normals of the two edges meeting there
        j = (i - 1) % n if s <= BOUNDARY_TOL else (i + 1) % n
        mx, my = scene.outward_normal(j)
        bx, by = nx + mx, ny + my
        L = math.hypot(bx, by)
        if L > 0:
            nx, ny = bx / L, by / L
    return p, (nx, ny)


def execute_grasp(scene: PolygonScene, grasp: DoubleDotGrasp, gripper: GripperModel = GripperModel()) -> GraspOutcome:
    c1, c2 = grasp.c1, grasp.c2
    if scene.contains(c1) or scene.contains(c2):
        return GraspOutcome(False, COLLISION)
    w = grasp.opening
    if not gripper.min_opening <= w <= gripper.max_opening:
        return GraspOutcome(False, OPENING)
    mid = midpoint(c1, c2)
    hits = []
    for tip in (c1, c2):
        hit = _first_contact(scene, tip, mid)
        if hit is None:
            return GraspOutcome(False, NO_CONTACT)
        hits.append((tip, hit))
    contacts = []
    for tip, (p, (nx, ny)) in hits:
        ux, uy = mid.x - tip.x, mid.y - tip.y
        L = math.hypot(ux, uy)
        cos_dev = max(-1.0, min(1.0, -(ux * nx + uy * ny) / L))
        contacts.append(Contact(p, (nx, ny), math.acos(cos_dev)))
    for c in contacts:
        if c.deviation > gripper.cone_half_angle:
            return GraspOutcome(False, FRICTION, tuple(contacts))
    return GraspOutcome(True, SUCCESS, tuple(contacts))


def gt_grasps(scene: PolygonScene, gripper: GripperModel = GripperModel(), clearance: float = 1.0,
              samples: Sequence[float] = (0.5, 0.25, 0.75), verify: bool = True) -> list[DoubleDotGrasp]:
    """Antipodal grasps from opposing edge pairs, best first.

    For each edge pair whose friction cones admit a common axis, the axis is
    the bisector of the two inward normals; contacts are placed where lines
    along that axis cross both edges (at the given fractions of the overlap),
    and fingertips sit ``clearance`` beyond the contacts along the axis. With
    ``verify`` only grasps that execute successfully are kept (non-convex
    outlines can block the closing path). Ranking: smaller normal
    deviation first, then closer to the centroid.
    """
    edges = scene.edges()
    n = len(edges)
    normals = [scene.outward_normal(i) for i in range(n)]
    cone = 2 * gripper.cone_half_angle
    centroid = scene.centroid()
    found = []
    for i in range(n):
        for j in range(i + 1, n):
            ni, nj = normals[i], normals[j]
            # angle between -n_i and n_j
            cosang = max(-1.0, min(1.0, -ni[0] * nj[0] - ni[1] * nj[1]))
            if math.acos(cosang) > cone:
                continue
            ux, uy = -ni[0] + nj[0], -ni[1] + nj[1]
            L = math.hypot(ux, uy)
            if L < 1e-12:
                continue
            ux, uy = ux / L, uy / L
            vx, vy = -uy, ux
            (a, b), (c, d) = edges[i], edges[j]
            pa, pb = a.x * vx + a.y * vy, b.x * vx + b.y * vy
            pc, pd = c.x * vx + c.y * vy, d.x * vx + d.y * vy
            lo = max(min(pa, pb), min(pc, pd))
            hi = min(max(pa, pb), max(pc, pd))
            if hi - lo <= 1e-6:
                continue
            dev = 0.5 * math.acos(cosang)
            for frac in samples:
                t = lo + frac * (hi - lo)
                p = _point_at_projection(a, b, pa, pb, t)
                q = _point_at_projection(c, d, pc, pd, t)
                # orient the axis from edge i to edge j
                if (q.x - p.x) * ux + (q.y - p.y) * uy <= 0:
                    continue
                g = DoubleDotGrasp(
                    Point2(p.x - clearance * ux, p.y - clearance * uy),
                    Point2(q.x + clearance * ux, q.y + clearance * uy),
                )
                if not gripper.min_opening <= g.opening <= gripper.max_opening:
                    continue
                if not verify or execute_grasp(scene, g, gripper).success:
                    found.append((round(dev, 9), g.center.dist(centroid), len(found), g))
    found.sort(key=lambda t: t[:3])
    return [t[3] for t in found]


def _point_at_projection(a: Point2, b: Point2, pa: float, pb: float, t: float) -> Point2:
    s = (t - pa) / (pb - pa)
    return Point2(a.x + s * (b.x - a.x), a.y + s * (b.y - a.y))


@dataclass
class TrialReport:
    seeds: list[int]
    outcomes: list[GraspOutcome | None] = field(default_factory=list)
    mu: float = GripperModel.mu

    @property
    def n_success(self) -> int:
        return sum(bool(o) for o in self.outcomes)

    @property
    def success_rate(self) -> float:
        return self.n_success / len(self.seeds) if self.seeds else 0.0

    def lines(self) -> list[str]:
        out = []
        for s, o in zip(self.seeds, self.outcomes):
            out.append(f"seed {s}: {'no_prediction' if o is None else o.reason}")
        out.append(f"mu={self.mu:g}")
        out.append(f"n_scenes={len(self.seeds)}")
        out.append(f"n_success={self.n_success}")
        out.append(f"success_rate={self.success_rate:.3f}")
        return out


Predictor = Callable[[PolygonScene], "DoubleDotGrasp | None"]


def run_trials(seeds: Iterable[int], predictor: Predictor, gripper: GripperModel = GripperModel(),
               params: SceneParams = SceneParams()) -> TrialReport:
    seeds = list(seeds)
    if not seeds:
        raise SimError("need at least one scene")
    report = TrialReport(seeds, mu=gripper.mu)
    for s in seeds:
        scene = generate_scene(s, params)
        g = predictor(scene)
        report.outcomes.append(None if g is None else execute_grasp(scene, g, gripper))
    return report


def oracle_predictor(gripper: GripperModel = GripperModel()) -> Predictor:
    def predict(scene: PolygonScene):
        found = gt_grasps(scene, gripper)
        return found[0] if found else None
    return predict
