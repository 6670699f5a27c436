"""Rectangle metric (oriented IoU + axis angle) and the fingertip-distance metric."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .geometry import DoubleDotGrasp, OrientedRect, axis_angle_diff, grasp_axis_angle


class MetricError(ValueError):
    pass


Poly = list[tuple[float, float]]


def shoelace(poly: Sequence[tuple[float, float]]) -> float:
    """Signed area; positive for counterclockwise vertices in x-right/y-up terms."""
    s = 0.0
    n = len(poly)
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return 0.5 * s


def clip_convex(subject: Sequence[tuple[float, float]], clip: Sequence[tuple[float, float]]) -> Poly:
    """Sutherland-Hodgman: ``subject`` clipped by convex ``clip`` (positive orientation)."""
    out = list(subject)
    m = len(clip)
    for i in range(m):
        if not out:
            break
        ax, ay = clip[i]
        bx, by = clip[(i + 1) % m]
        ex, ey = bx - ax, by - ay

        def side(p):
            return ex * (p[1] - ay) - ey * (p[0] - ax)

        inp, out = out, []
        prev = inp[-1]
        sp = side(prev)
        for cur in inp:
            sc = side(cur)
            if sc >= 0:
                if sp < 0:
                    out.append(_cross_point(prev, cur, sp, sc))
                out.append(cur)
            elif sp >= 0:
                out.append(_cross_point(prev, cur, sp, sc))
            prev, sp = cur, sc
    return out


def _cross_point(p, q, sp, sq):
    t = sp / (sp - sq)
    return (p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))


def rect_polygon(r: OrientedRect) -> Poly:
    return [(p.x, p.y) for p in r.corners()]


def oriented_iou(a: OrientedRect, b: OrientedRect) -> float:
    pa, pb = rect_polygon(a), rect_polygon(b)
    inter = clip_convex(pa, pb)
    ia = abs(shoelace(inter)) if len(inter) >= 3 else 0.0
    if ia <= 0.0:
        return 0.0
    union = a.area + b.area - ia
    return min(1.0, max(0.0, ia / union))


@dataclass(frozen=True)
class RectMetricConfig:
    iou_threshold: float = 0.25
    angle_threshold: float = math.pi / 6

    def __post_init__(self):
        if not 0 < self.iou_threshold <= 1:
            raise MetricError("iou_threshold must lie in (0, 1]")
        if not 0 < self.angle_threshold <= math.pi / 2:
            raise MetricError("angle_threshold must lie in (0, pi/2]")


def rect_agreement(pred: OrientedRect, gt: OrientedRect) -> tuple[float, float]:
    return oriented_iou(pred, gt), axis_angle_diff(pred.theta, gt.theta)


def rectangle_match(pred: OrientedRect, gts: Sequence[OrientedRect], cfg: RectMetricConfig = RectMetricConfig()) -> bool:
    if not gts:
        raise MetricError("no ground-truth rectangles")
    for gt in gts:
        iou, dth = rect_agreement(pred, gt)
        if iou > cfg.iou_threshold and dth <= cfg.angle_threshold:
            return True
    return False


def double_dot_error(pred: DoubleDotGrasp, gt: DoubleDotGrasp) -> tuple[float, float]:
    """(max fingertip distance under the better assignment, axis angle error in [0, pi/2])."""
    straight = max(pred.c1.dist(gt.c1), pred.c2.dist(gt.c2))
    crossed = max(pred.c1.dist(gt.c2), pred.c2.dist(gt.c1))
    return min(straight, crossed), axis_angle_diff(grasp_axis_angle(pred), grasp_axis_angle(gt))


@dataclass
class ImageResult:
    image_id: str
    success: bool
    best_iou: float | None
    angle_error: float | None
    missing: bool = False


@dataclass
class EvalReport:
    n_images: int
    n_success: int
    results: list[ImageResult] = field(default_factory=list)

    @property
    def accuracy(self) -> float:
        return self.n_success / self.n_images if self.n_images else 0.0

    @property
    def n_missing(self) -> int:
        return sum(r.missing for r in self.results)

    def lines(self) -> list[str]:
        out = []
        for r in self.results:
            if r.missing:
                out.append(f"{r.image_id}: no prediction -> fail")
            else:
                out.append(
                    f"{r.image_id}: best_iou={r.best_iou:.4f} angle_err_deg={math.degrees(r.angle_error):.2f} "
                    f"-> {'ok' if r.success else 'fail'}"
                )
        out.append(f"accuracy {self.n_success}/{self.n_images} = {self.accuracy:.3f}")
        out.append(f"n_images={self.n_images}")
        out.append(f"n_success={self.n_success}")
        out.append(f"n_missing={self.n_missing}")
        out.append(f"accuracy={self.accuracy:.3f}")
        return out


def evaluate(preds: Mapping[str, OrientedRect | None], gts: Mapping[str, Sequence[OrientedRect]],
             cfg: RectMetricConfig = RectMetricConfig()) -> EvalReport:
    """Top-prediction rectangle metric over every ground-truth image.

    ``preds`` maps image id to the single top rectangle (or None). Images with
    no prediction count as failures.
    """
    results = []
    for image_id in sorted(gts):
        gt = gts[image_id]
        if not gt:
            raise MetricError(f"image {image_id} has no ground-truth rectangles")
        pred = preds.get(image_id)
        if pred is None:
            results.append(ImageResult(image_id, False, None, None, missing=True))
            continue
        # report the agreement with the gt that has the best IoU
        best = max((rect_agreement(pred, g) for g in gt), key=lambda t: (t[0], -t[1]))
        ok = rectangle_match(pred, gt, cfg)
        results.append(ImageResult(image_id, ok, best[0], best[1]))
    return EvalReport(len(results), sum(r.success for r in results), results)
