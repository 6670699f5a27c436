import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ddgrasp.geometry import (DoubleDotGrasp, GeometryError, OrientedRect, Point2, Rotation2,
                              axis_angle_diff, fingertip_orientation, grasp_axis_angle, grasp_to_rect,
                              rect_to_grasp, transform_grasp, transform_rect, wrap_pi)


def close(p: Point2, xy, tol=1e-9):
    return abs(p.x - xy[0]) <= tol and abs(p.y - xy[1]) <= tol


coords = st.floats(-1e3, 1e3)
rects = st.builds(
    OrientedRect.make, coords, coords, st.floats(0.1, 200), st.floats(0.1, 200), st.floats(-10, 10)
)


def test_rect_to_grasp_examples():
    g = rect_to_grasp(OrientedRect(Point2(0, 0), 2, 1, 0))
    assert close(g.c1, (1, 0)) and close(g.c2, (-1, 0))
    g = rect_to_grasp(OrientedRect(Point2(5, 5), 4, 2, math.pi / 2))
    assert close(g.c1, (5, 7)) and close(g.c2, (5, 3))
    g = rect_to_grasp(OrientedRect(Point2(10, 10), 2.828427, 2, math.pi / 4))
    # 2.828427/2 * cos(pi/4) = 0.99999995...
    assert close(g.c1, (11, 11), 1e-6) and close(g.c2, (9, 9), 1e-6)


def test_grasp_to_rect_examples():
    r = grasp_to_rect(DoubleDotGrasp(Point2(1, 0), Point2(-1, 0)), 10)
    assert close(r.center, (0, 0)) and r.w == pytest.approx(2) and r.h == 10 and r.theta == 0
    r = grasp_to_rect(DoubleDotGrasp(Point2(5, 7), Point2(5, 3)), 10)
    assert close(r.center, (5, 5)) and r.w == pytest.approx(4) and r.theta == pytest.approx(math.pi / 2)
    r = grasp_to_rect(DoubleDotGrasp(Point2(9, 9), Point2(11, 11)), 35)
    assert close(r.center, (10, 10)) and r.w == pytest.approx(2.828427, abs=1e-6)
    assert r.h == 35 and r.theta == pytest.approx(math.pi / 4)


def test_zero_opening_rejected():
    with pytest.raises(GeometryError, match="zero opening"):
        DoubleDotGrasp(Point2(1, 1), Point2(1, 1))


def test_grasp_axis_angle_examples():
    assert grasp_axis_angle(DoubleDotGrasp(Point2(0, 0), Point2(4, 0))) == 0
    assert grasp_axis_angle(DoubleDotGrasp(Point2(0, 0), Point2(0, 4))) == pytest.approx(math.pi / 2)
    assert grasp_axis_angle(DoubleDotGrasp(Point2(0, 0), Point2(-1, -1))) == pytest.approx(math.pi / 4)


def test_fingertip_orientation_examples():
    assert fingertip_orientation(Point2(2, 5), Point2(6, 5)) == 0
    assert fingertip_orientation(Point2(10, 5), Point2(6, 5)) == pytest.approx(math.pi)
    assert fingertip_orientation(Point2(6, 9), Point2(6, 5)) == pytest.approx(-math.pi / 2)
    with pytest.raises(GeometryError):
        fingertip_orientation(Point2(1, 1), Point2(1, 1))


def test_rect_invariants():
    with pytest.raises(GeometryError):
        OrientedRect(Point2(0, 0), 0, 1, 0)
    with pytest.raises(GeometryError):
        OrientedRect(Point2(0, 0), 1, 1, math.pi)
    with pytest.raises(GeometryError):
        Point2(float("nan"), 0)


def test_roundtrip_10k_random_rects():
    rng = np.random.default_rng(0)
    for _ in range(10_000):
        x, y = rng.uniform(-500, 500, 2)
        w, h = rng.uniform(0.5, 100, 2)
        r = OrientedRect(Point2(x, y), w, h, rng.uniform(0, math.pi))
        back = grasp_to_rect(rect_to_grasp(r), r.h)
        assert back.center.dist(r.center) <= 1e-9
        assert abs(back.w - r.w) <= 1e-9
        assert axis_angle_diff(back.theta, r.theta) <= 1e-9


@given(rects)
def test_swap_symmetry(r):
    g = rect_to_grasp(r)
    a, b = grasp_to_rect(g, r.h), grasp_to_rect(g.swapped(), r.h)
    assert a.center == b.center and a.w == b.w
    assert axis_angle_diff(a.theta, b.theta) <= 1e-12


@given(rects, st.floats(-math.pi, math.pi), coords, coords)
def test_rigid_motion_equivariance(r, theta, tx, ty):
    g1 = rect_to_grasp(transform_rect(r, theta, tx, ty))
    g2 = transform_grasp(rect_to_grasp(r), theta, tx, ty)
    # the mod-pi reduction of theta may swap which point is c1
    d = min(max(g1.c1.dist(g2.c1), g1.c2.dist(g2.c2)), max(g1.c1.dist(g2.c2), g1.c2.dist(g2.c1)))
    assert d <= 1e-9 * max(1.0, abs(tx), abs(ty), r.center.norm())


@given(rects)
def test_fingertip_orientations_oppose(r):
    g = rect_to_grasp(r)
    a = fingertip_orientation(g.c1, r.center)
    b = fingertip_orientation(g.c2, r.center)
    assert abs(math.remainder(a - b - math.pi, 2 * math.pi)) <= 1e-9


@given(st.floats(-10, 10), coords, coords)
def test_rotation_inverse(theta, x, y):
    p = Point2(x, y)
    q = Rotation2(-theta).apply(Rotation2(theta).apply(p))
    assert q.dist(p) <= 1e-9 * max(1.0, p.norm())
    m = Rotation2(theta).matrix() @ Rotation2(theta).inverse().matrix()
    assert np.allclose(m, np.eye(2), atol=1e-12)


@given(st.floats(-100, 100))
def test_wrap_pi_range(a):
    w = wrap_pi(a)
    assert 0 <= w < math.pi
    assert abs(math.remainder(w - a, math.pi)) <= 1e-9
