import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ddgrasp.geometry import DoubleDotGrasp, Point2, midpoint, transform_grasp
from ddgrasp.sim import (COLLISION, FRICTION, NO_CONTACT, OPENING, SUCCESS, GripperModel, PolygonScene,
                         SceneParams, SimError, execute_grasp, generate_scene, gt_grasps, is_simple,
                         oracle_predictor, run_trials, segments_intersect, signed_area)


def square(side=10.0, cx=0.0, cy=0.0):
    h = side / 2
    return PolygonScene([Point2(cx - h, cy - h), Point2(cx + h, cy - h), Point2(cx + h, cy + h), Point2(cx - h, cy + h)])


def G(x1, y1, x2, y2):
    return DoubleDotGrasp(Point2(x1, y1), Point2(x2, y2))


def brute_simple(vs):
    """Independent simplicity check: every non-adjacent edge pair is disjoint."""
    n = len(vs)
    edges = [(vs[i], vs[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            if segments_intersect(*edges[i], *edges[j]):
                return False
    return True


def test_execute_examples():
    sq = square()
    mu3 = GripperModel(mu=0.3)
    res = execute_grasp(sq, G(-7, 0, 7, 0), mu3)
    assert res.success and res.reason == SUCCESS
    assert all(c.deviation == pytest.approx(0.0) for c in res.contacts)
    assert execute_grasp(sq, G(-7, 20, 7, 20), mu3).reason == NO_CONTACT

    s = 20.0
    tri = PolygonScene([Point2(0, 0), Point2(s, 0), Point2(s / 2, s * math.sqrt(3) / 2)])
    y = s * math.sqrt(3) / 4
    res = execute_grasp(tri, G(-2, y, s + 2, y), mu3)
    assert res.reason == FRICTION
    assert max(c.deviation for c in res.contacts) == pytest.approx(math.radians(30))


def test_execute_reason_order():
    sq = square()
    assert execute_grasp(sq, G(-2, 0, 2, 0)).reason == COLLISION
    assert execute_grasp(sq, G(-7, 0, 7, 0), GripperModel(max_opening=10)).reason == OPENING
    assert execute_grasp(sq, G(-7, -2, 7, 2), GripperModel(mu=0.2)).reason == FRICTION


def test_gt_grasps_square():
    sq = square()
    found = gt_grasps(sq, GripperModel(mu=0.3))
    horiz = [g for g in found
             if abs(g.c1.y - g.c2.y) < 1e-9 and abs(midpoint(g.c1, g.c2).y) < 1e-9]
    assert horiz
    assert any(g.opening == pytest.approx(12.0) and abs(midpoint(g.c1, g.c2).x) < 1e-9 for g in horiz)
    small = gt_grasps(sq, GripperModel(max_opening=5, mu=0.3))
    assert not any(g.opening == pytest.approx(12.0) for g in small)


def test_generate_determinism_and_square():
    assert generate_scene(17).vertices == generate_scene(17).vertices
    p = SceneParams(n_vertices=(4, 4), radius=(10, 10), irregularity=0.0, center=(0, 0))
    vs = generate_scene(5, p).vertices
    assert len(vs) == 4
    assert all(math.hypot(v.x, v.y) == pytest.approx(10) for v in vs)
    sides = [vs[i].dist(vs[(i + 1) % 4]) for i in range(4)]
    assert sides == pytest.approx([10 * math.sqrt(2)] * 4)
    assert signed_area(vs) == pytest.approx(200.0)


def test_generate_rejects_degenerate():
    with pytest.raises(SimError):
        SceneParams(n_vertices=(2, 5))
    with pytest.raises(SimError):
        SceneParams(radius=(0, 5))
    with pytest.raises(SimError):
        SceneParams(irregularity=1.0)
    with pytest.raises(SimError):
        PolygonScene([Point2(0, 0), Point2(0, 1), Point2(1, 0)])  # clockwise


@settings(max_examples=300)
@given(st.integers(0, 2**31 - 1))
def test_generated_scenes_simple_ccw(seed):
    vs = generate_scene(seed).vertices
    assert brute_simple(vs) and is_simple(vs)
    assert signed_area(vs) > 0


@settings(max_examples=100)
@given(st.integers(0, 2**31 - 1))
def test_gt_grasps_succeed(seed):
    scene = generate_scene(seed)
    for g in gt_grasps(scene):
        assert execute_grasp(scene, g).success


@settings(max_examples=100)
@given(st.integers(0, 10_000))
def test_convex_scenes_need_no_verification(seed):
    # with zero irregularity the polygon is convex and the raw construction is already valid
    scene = generate_scene(seed, SceneParams(irregularity=0.0))
    raw = gt_grasps(scene, verify=False)
    assert raw
    assert all(execute_grasp(scene, g).success for g in raw)


@settings(max_examples=200)
@given(st.integers(0, 10_000), st.floats(-1, 1), st.floats(-1, 1), st.floats(0.05, 0.95))
def test_inside_fingertips_collide(seed, u, v, t):
    scene = generate_scene(seed)
    c = scene.centroid()
    # both fingertips on segments from the centroid to vertices: star-shaped, so inside
    a = scene.vertices[0]
    b = scene.vertices[len(scene.vertices) // 2]
    p = Point2(c.x + t * (a.x - c.x), c.y + t * (a.y - c.y))
    q = Point2(c.x + t * 0.5 * (b.x - c.x), c.y + t * 0.5 * (b.y - c.y))
    if p.dist(q) > 1e-6:
        assert execute_grasp(scene, DoubleDotGrasp(p, q)).reason == COLLISION


def perturbed_grasps(scene, rng, k=5):
    out = list(gt_grasps(scene))[:k]
    c = scene.centroid()
    while len(out) < 2 * k:
        ang = rng.uniform(0, math.pi)
        half = rng.uniform(3, 40)
        dx, dy = half * math.cos(ang), half * math.sin(ang)
        ox, oy = rng.normal(0, 5, 2)
        out.append(G(c.x + ox - dx, c.y + oy - dy, c.x + ox + dx, c.y + oy + dy))
    return out


@settings(max_examples=100)
@given(st.integers(0, 10_000))
def test_swap_invariance(seed):
    scene = generate_scene(seed)
    rng = np.random.default_rng(seed)
    for g in perturbed_grasps(scene, rng):
        assert execute_grasp(scene, g).reason == execute_grasp(scene, g.swapped()).reason


@settings(max_examples=100)
@given(st.integers(0, 10_000), st.floats(-math.pi, math.pi), st.floats(-300, 300), st.floats(-300, 300))
def test_rigid_invariance(seed, theta, tx, ty):
    scene = generate_scene(seed)
    rng = np.random.default_rng(seed)
    moved = scene.transformed(theta, tx, ty)
    for g in perturbed_grasps(scene, rng):
        a = execute_grasp(scene, g)
        b = execute_grasp(moved, transform_grasp(g, theta, tx, ty))
        assert a.success == b.success


def test_run_trials_examples():
    seeds = range(40)
    rep = run_trials(seeds, oracle_predictor())
    assert rep.success_rate == 1.0
    far = run_trials(seeds, lambda s: G(-1000, -1000, -990, -1000))
    assert far.success_rate == 0.0
    assert run_trials(seeds, oracle_predictor()).lines() == rep.lines()
    with pytest.raises(SimError):
        run_trials([], oracle_predictor())
