"""Ground-truth target rendering on the down-sampled grid.

Map frame: the cell at ``(row, col)`` sits at map point ``(x=col, y=row)``;
an input-image point ``(x, y)`` maps to ``(x/n, y/n)``. Each Gaussian is
anchored on the integer cell ``floor(point/n)`` so that the cell receiving the
offset target is also the score peak, and decoding ``(cell + offset) * n``
restores the input-resolution point exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .geometry import DoubleDotGrasp, OrientedRect, Point2, fingertip_orientation, rect_to_grasp
from .maps import PredictionMaps


class LabelingError(ValueError):
    pass


@dataclass(frozen=True)
class LabelConfig:
    map_height: int = 128
    map_width: int = 128
    stride: int = 4
    sigma_x: float = 1.0
    sigma_y_factor: float = 0.75
    # drop the 1/(sigma_x*sigma_y) divisor so GT peaks are exactly 1
    peak_normalized: bool = True
    # use exp(-q/2) instead of the printed exp(-q)
    half_exponent: bool = False

    def __post_init__(self):
        if self.map_height <= 0 or self.map_width <= 0:
            raise LabelingError("map dimensions must be positive")
        if int(self.stride) != self.stride or self.stride < 1:
            raise LabelingError(f"stride must be a positive integer, got {self.stride}")
        if not self.sigma_x > 0:
            raise LabelingError("sigma_x must be positive")
        if not self.sigma_y_factor > 0:
            raise LabelingError("sigma_y_factor must be positive")

    @property
    def exponent_factor(self) -> float:
        return 0.5 if self.half_exponent else 1.0


@dataclass
class TargetMaps(PredictionMaps):
    """Rendered targets plus the masks of cells that carry regression targets.

    ``valid_mask`` marks fingertip cells (fingertip offsets, sin/cos);
    ``center_mask`` marks center cells (center offsets).
    """

    valid_mask: np.ndarray = field(default=None)
    center_mask: np.ndarray = field(default=None)

    def __post_init__(self):
        super().__post_init__()
        if self.valid_mask is None:
            self.valid_mask = np.zeros(self.shape, dtype=bool)
        if self.center_mask is None:
            self.center_mask = np.zeros(self.shape, dtype=bool)

    def as_prediction(self) -> PredictionMaps:
        """The perfect prediction for these targets (oracle decoding)."""
        return PredictionMaps.from_planes([np.array(p, copy=True) for p in self.planes()])


def _gaussian_field(xs, ys, anchors, thetas, sig_x, sig_y, amps, k) -> np.ndarray:
    """Sum of rotated Gaussians evaluated at the (broadcast) points ``xs, ys``."""
    total = np.zeros(np.broadcast(xs, ys).shape)
    for (ax, ay), th, sx, sy, a in zip(anchors, thetas, sig_x, sig_y, amps):
        dx = xs - ax
        dy = ys - ay
        c, s = math.cos(th), math.sin(th)
        # coordinates of Q in the grasp frame: along the axis, along the plate
        u = c * dx + s * dy
        v = -s * dx + c * dy
        total = total + a * np.exp(-k * ((u / sx) ** 2 + (v / sy) ** 2))
    return total


def _amplitude(cfg: LabelConfig, sx: float, sy: float) -> float:
    return 1.0 if cfg.peak_normalized else 1.0 / (sx * sy)


def _fingertip_terms(grasps, cfg: LabelConfig):
    anchors, thetas, sxs, sys_, amps = [], [], [], [], []
    for g, h in grasps:
        if not h > 0:
            raise LabelingError(f"jaw size must be positive, got {h}")
        th = math.atan2(g.c2.y - g.c1.y, g.c2.x - g.c1.x)
        sy = cfg.sigma_y_factor * h
        for c in (g.c1, g.c2):
            anchors.append((c.x, c.y))
            thetas.append(th)
            sxs.append(cfg.sigma_x)
            sys_.append(sy)
            amps.append(_amplitude(cfg, cfg.sigma_x, sy))
    return anchors, thetas, sxs, sys_, amps


def gaussian_score_at(p: Point2, grasps: Sequence[tuple[DoubleDotGrasp, float]], cfg: LabelConfig) -> float:
    """Fingertip score at ``p``; points, grasps and jaw sizes share one frame."""
    if not grasps:
        raise LabelingError("no grasps given")
    terms = _fingertip_terms(grasps, cfg)
    val = _gaussian_field(np.float64(p.x), np.float64(p.y), *terms, cfg.exponent_factor)
    return float(min(1.0, val))


def _check_inside(i: int, pts: Sequence[Point2], cfg: LabelConfig):
    n = cfg.stride
    for p in pts:
        mx, my = p.x / n, p.y / n
        if not (0.0 <= mx < cfg.map_width and 0.0 <= my < cfg.map_height):
            raise LabelingError(
                f"grasp {i}: point ({p.x:g}, {p.y:g}) falls outside the "
                f"{cfg.map_height}x{cfg.map_width} map at stride {n}"
            )


def render_targets(rects: Sequence[OrientedRect], cfg: LabelConfig) -> TargetMaps:
    H, W, n = cfg.map_height, cfg.map_width, cfg.stride
    k = cfg.exponent_factor
    out = TargetMaps.zeros(H, W)
    if not rects:
        return out

    # best (distance to cell anchor) seen so far for contested regression cells
    tip_owner: dict[tuple[int, int], float] = {}
    cen_owner: dict[tuple[int, int], float] = {}
    tip_anchors, tip_thetas, tip_sy = [], [], []
    cen_anchors = []

    for i, r in enumerate(rects):
        g = rect_to_grasp(r)
        _check_inside(i, [g.c1, g.c2, r.center], cfg)
        theta = math.atan2(g.c2.y - g.c1.y, g.c2.x - g.c1.x)
        sy = cfg.sigma_y_factor * r.h / n
        for c in (g.c1, g.c2):
            mx, my = c.x / n, c.y / n
            col, row = math.floor(mx), math.floor(my)
            tip_anchors.append((col, row))
            tip_thetas.append(theta)
            tip_sy.append(sy)
            d = math.hypot(mx - col, my - row)
            if (row, col) not in tip_owner or d < tip_owner[(row, col)]:
                tip_owner[(row, col)] = d
                ori = fingertip_orientation(c, r.center)
                out.fingertip_offset[row, col] = (mx - col, my - row)
                out.sin_map[row, col] = math.sin(ori)
                out.cos_map[row, col] = math.cos(ori)
                out.valid_mask[row, col] = True
        mx, my = r.center.x / n, r.center.y / n
        col, row = math.floor(mx), math.floor(my)
        cen_anchors.append((col, row))
        d = math.hypot(mx - col, my - row)
        if (row, col) not in cen_owner or d < cen_owner[(row, col)]:
            cen_owner[(row, col)] = d
            out.center_offset[row, col] = (mx - col, my - row)
            out.center_mask[row, col] = True

    ys, xs = np.mgrid[0:H, 0:W].astype(float)
    sx = cfg.sigma_x
    tip = _gaussian_field(
        xs, ys, tip_anchors, tip_thetas, [sx] * len(tip_anchors), tip_sy,
        [_amplitude(cfg, sx, s) for s in tip_sy], k,
    )
    cen = _gaussian_field(
        xs, ys, cen_anchors, [0.0] * len(cen_anchors), [sx] * len(cen_anchors),
        [sx] * len(cen_anchors), [_amplitude(cfg, sx, sx)] * len(cen_anchors), k,
    )
    out.fingertip_score = np.minimum(1.0, tip)
    out.center_score = np.minimum(1.0, cen)
    return out


def offset_target(x: float, y: float, n: int) -> tuple[tuple[int, int], tuple[float, float]]:
    """Cell ``(row, col)`` and sub-cell offset ``(dx, dy)`` of an input-image point."""
    mx, my = x / n, y / n
    col, row = math.floor(mx), math.floor(my)
    return (row, col), (mx - col, my - row)
