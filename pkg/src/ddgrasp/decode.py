"""Fingertip grouping inference: peaks, offset refinement, pair filters, ranking."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import DoubleDotGrasp, Point2, angle_diff, midpoint
from .maps import PredictionMaps


class DecodeError(ValueError):
    pass


@dataclass(frozen=True)
class DecodeConfig:
    top_k: int = 70
    stride: int = 4
    min_opening: float = 2.0
    max_opening: float = 70.0
    orientation_tolerance: float = math.pi / 6
    center_radius_factor: float = 1.0 / 3.0
    nms_window: int = 3
    orientation_matching: bool = True
    center_matching: bool = True

    def __post_init__(self):
        if self.top_k < 2:
            raise DecodeError("top_k must be at least 2")
        if int(self.stride) != self.stride or self.stride < 1:
            raise DecodeError("stride must be a positive integer")
        if not 0 < self.min_opening < self.max_opening:
            raise DecodeError("need 0 < min_opening < max_opening")
        if not 0 < self.orientation_tolerance < math.pi / 2:
            raise DecodeError("orientation tolerance must lie in (0, pi/2)")
        if not self.center_radius_factor > 0:
            raise DecodeError("center radius factor must be positive")
        if self.nms_window < 1 or self.nms_window % 2 == 0:
            raise DecodeError("nms_window must be an odd integer >= 1")


@dataclass(frozen=True)
class KeyPoint:
    cell: tuple[int, int]  # (row, col)
    refined: Point2
    score: float
    orientation: float | None = None


@dataclass(frozen=True)
class GraspCandidate:
    grasp: DoubleDotGrasp
    center_used: KeyPoint | None
    score: float
    tips: tuple[KeyPoint, KeyPoint] | None = None


def local_maxima(score_map: np.ndarray, window: int = 3) -> np.ndarray:
    """Boolean mask of cells that win their ``window`` x ``window`` neighbourhood.

    A cell wins if it is >= every neighbour and strictly greater than any
    neighbour that precedes it in row-major order, so a plateau keeps only its
    first cell. Non-positive cells never win.
    """
    s = np.asarray(score_map, dtype=float)
    r = window // 2
    H, W = s.shape
    padded = np.pad(s, r, mode="constant", constant_values=-np.inf)
    keep = s > 0
    for dr in range(-r, r + 1):
        for dc in range(-r, r + 1):
            if dr == 0 and dc == 0:
                continue
            nb = padded[r + dr:r + dr + H, r + dc:r + dc + W]
            if (dr, dc) < (0, 0):
                keep &= s > nb
            else:
                keep &= s >= nb
    return keep


def extract_peaks(score_map, offsets, k: int, n: int, nms_window: int = 3,
                  sin_map=None, cos_map=None) -> list[KeyPoint]:
    """Top-``k`` local maxima, refined to input coordinates as ``(cell + offset) * n``."""
    s = np.asarray(score_map, dtype=float)
    if s.ndim != 2 or s.size == 0:
        raise DecodeError("empty score map")
    if k < 1:
        raise DecodeError("k must be >= 1")
    H, W = s.shape
    mask = local_maxima(s, nms_window)
    idx = np.flatnonzero(mask)  # row-major
    order = np.argsort(-s.ravel()[idx], kind="stable")[:k]
    off = np.asarray(offsets, dtype=float)
    out = []
    for flat in idx[order]:
        row, col = divmod(int(flat), W)
        ox, oy = off[row, col]
        x = min(max((col + ox) * n, 0.0), float(W * n))
        y = min(max((row + oy) * n, 0.0), float(H * n))
        ori = None
        if sin_map is not None and cos_map is not None:
            ori = math.atan2(float(sin_map[row, col]), float(cos_map[row, col]))
        out.append(KeyPoint((row, col), Point2(x, y), float(s[row, col]), ori))
    return out


def orientation_match(pair: tuple[KeyPoint, KeyPoint], tolerance: float) -> bool:
    """Both fingertips must point at the pair midpoint within ``tolerance``."""
    a, b = pair
    mid = midpoint(a.refined, b.refined)
    for tip in (a, b):
        if tip.orientation is None:
            return False
        want = math.atan2(mid.y - tip.refined.y, mid.x - tip.refined.x)
        if angle_diff(tip.orientation, want) > tolerance:
            return False
    return True


def center_match(pair: tuple[KeyPoint, KeyPoint], centers: Sequence[KeyPoint],
                 radius_factor: float = 1.0 / 3.0) -> KeyPoint | None:
    """Highest-scoring center inside the circle of radius ``radius_factor * opening``."""
    a, b = pair
    mid = midpoint(a.refined, b.refined)
    radius = radius_factor * a.refined.dist(b.refined)
    best = None
    for c in centers:
        if c.refined.dist(mid) <= radius and (best is None or c.score > best.score):
            best = c
    return best


def fingertip_peaks(maps: PredictionMaps, cfg: DecodeConfig) -> list[KeyPoint]:
    return extract_peaks(maps.fingertip_score, maps.fingertip_offset, cfg.top_k, cfg.stride,
                         cfg.nms_window, maps.sin_map, maps.cos_map)


def center_peaks(maps: PredictionMaps, cfg: DecodeConfig) -> list[KeyPoint]:
    return extract_peaks(maps.center_score, maps.center_offset, cfg.top_k, cfg.stride, cfg.nms_window)


def group(tips: Sequence[KeyPoint], centers: Sequence[KeyPoint], cfg: DecodeConfig) -> list[GraspCandidate]:
    """Pair fingertips, filter, score and rank (best first)."""
    out = []
    for i in range(len(tips)):
        for j in range(i + 1, len(tips)):
            a, b = tips[i], tips[j]
            d = a.refined.dist(b.refined)
            if not cfg.min_opening <= d <= cfg.max_opening:
                continue
            if cfg.orientation_matching and not orientation_match((a, b), cfg.orientation_tolerance):
                continue
            score = a.score + b.score
            center = None
            if cfg.center_matching:
                center = center_match((a, b), centers, cfg.center_radius_factor)
                if center is None:
                    continue
                score += center.score
            out.append(GraspCandidate(DoubleDotGrasp(a.refined, b.refined), center, score, (a, b)))
    # stable: equal scores keep enumeration order
    out.sort(key=lambda c: -c.score)
    return out


def decode(maps: PredictionMaps, cfg: DecodeConfig = DecodeConfig()) -> list[GraspCandidate]:
    tips = fingertip_peaks(maps, cfg)
    centers = center_peaks(maps, cfg) if cfg.center_matching else []
    return group(tips, centers, cfg)
