"""Training objective as plain numpy oracles, with analytic gradients.

Sums are unnormalized over cells, as in the printed objective. Reductions
go through ``np.sum`` on contiguous arrays, which uses pairwise summation.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .labeling import TargetMaps
from .maps import PredictionMaps

EPS = 1e-7


class LossError(ValueError):
    pass


@dataclass(frozen=True)
class FocalParams:
    alpha: float = 2.0
    beta: float = 4.0
    # divide by max(1, number of positive cells)
    normalize_by_positives: bool = False

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise LossError("focal exponents must be non-negative")


@dataclass(frozen=True)
class LossBreakdown:
    l_det_con: float
    l_det_cen: float
    l_off_con: float
    l_off_cen: float
    l_ori_sin: float
    l_ori_cos: float
    total: float

    @classmethod
    def from_terms(cls, *terms: float) -> "LossBreakdown":
        return cls(*terms, total=float(np.sum(np.array(terms, dtype=float))))

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _check_same(a: np.ndarray, b: np.ndarray, what: str):
    if np.shape(a) != np.shape(b):
        raise LossError(f"{what}: shape mismatch {np.shape(a)} vs {np.shape(b)}")


def clamp_scores(q: np.ndarray) -> np.ndarray:
    return np.clip(q, EPS, 1.0 - EPS)


def _focal_cells(q, s, params: FocalParams):
    a, b = params.alpha, params.beta
    pos = s == 1.0
    loss = np.where(
        pos,
        -((1.0 - q) ** a) * np.log(q),
        -((1.0 - s) ** b) * (q ** a) * np.log1p(-q),
    )
    return loss, pos


def focal_loss(pred: np.ndarray, target: np.ndarray, params: FocalParams = FocalParams()) -> float:
    pred = np.asarray(pred, dtype=float)
    target = np.asarray(target, dtype=float)
    _check_same(pred, target, "focal_loss")
    if np.any((pred <= 0.0) | (pred >= 1.0)):
        raise LossError("focal_loss needs predictions strictly inside (0, 1); clamp first")
    loss, pos = _focal_cells(pred, target, params)
    total = float(np.sum(loss))
    if params.normalize_by_positives:
        total /= max(1, int(pos.sum()))
    return total


def focal_grad(pred: np.ndarray, target: np.ndarray, params: FocalParams = FocalParams()) -> np.ndarray:
    """d focal_loss / d pred, cellwise."""
    q = np.asarray(pred, dtype=float)
    s = np.asarray(target, dtype=float)
    _check_same(q, s, "focal_grad")
    a, b = params.alpha, params.beta
    pos = s == 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        # a * x**(a-1) is 0 for a == 0 regardless of x
        da_pos = a * (1.0 - q) ** (a - 1.0) if a != 0 else np.zeros_like(q)
        da_neg = a * q ** (a - 1.0) if a != 0 else np.zeros_like(q)
    g_pos = da_pos * np.log(q) - (1.0 - q) ** a / q
    g_neg = -((1.0 - s) ** b) * (da_neg * np.log1p(-q) - q ** a / (1.0 - q))
    g = np.where(pos, g_pos, g_neg)
    if params.normalize_by_positives:
        g = g / max(1, int(pos.sum()))
    return g


def smooth_l1(d: np.ndarray) -> np.ndarray:
    ad = np.abs(d)
    return np.where(ad < 1.0, 0.5 * d * d, ad - 0.5)


def smooth_l1_grad(d: np.ndarray) -> np.ndarray:
    return np.where(np.abs(d) < 1.0, d, np.sign(d))


def _masked(mask, shape):
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != shape:
        raise LossError(f"mask shape {mask.shape} does not match raster {shape}")
    return mask


def offset_loss(pred_offsets, target_offsets, valid_mask) -> float:
    pred_offsets = np.asarray(pred_offsets, dtype=float)
    target_offsets = np.asarray(target_offsets, dtype=float)
    _check_same(pred_offsets, target_offsets, "offset_loss")
    mask = _masked(valid_mask, pred_offsets.shape[:2])
    d = pred_offsets[mask] - target_offsets[mask]
    return float(np.sum(smooth_l1(d)))


def orientation_loss(pred_sin, pred_cos, target_sin, target_cos, valid_mask) -> tuple[float, float]:
    pred_sin, pred_cos = np.asarray(pred_sin, dtype=float), np.asarray(pred_cos, dtype=float)
    target_sin, target_cos = np.asarray(target_sin, dtype=float), np.asarray(target_cos, dtype=float)
    _check_same(pred_sin, target_sin, "orientation_loss(sin)")
    _check_same(pred_cos, target_cos, "orientation_loss(cos)")
    _check_same(pred_sin, pred_cos, "orientation_loss")
    mask = _masked(valid_mask, pred_sin.shape)
    l_sin = float(np.sum(smooth_l1(pred_sin[mask] - target_sin[mask])))
    l_cos = float(np.sum(smooth_l1(pred_cos[mask] - target_cos[mask])))
    return l_sin, l_cos


def _check_maps(pred: PredictionMaps, target: TargetMaps):
    if pred.shape != target.shape:
        raise LossError(f"prediction raster {pred.shape} vs target raster {target.shape}")


def total_loss(pred: PredictionMaps, target: TargetMaps, params: FocalParams = FocalParams()) -> LossBreakdown:
    """All six terms; score channels are clamped to [EPS, 1 - EPS] first."""
    _check_maps(pred, target)
    l_sin, l_cos = orientation_loss(pred.sin_map, pred.cos_map, target.sin_map, target.cos_map, target.valid_mask)
    return LossBreakdown.from_terms(
        focal_loss(clamp_scores(pred.fingertip_score), target.fingertip_score, params),
        focal_loss(clamp_scores(pred.center_score), target.center_score, params),
        offset_loss(pred.fingertip_offset, target.fingertip_offset, target.valid_mask),
        offset_loss(pred.center_offset, target.center_offset, target.center_mask),
        l_sin,
        l_cos,
    )


def loss_gradients(pred: PredictionMaps, target: TargetMaps, params: FocalParams = FocalParams()) -> PredictionMaps:
    """Gradient of ``total_loss(...).total`` w.r.t. every prediction value.

    Returned in the same layout as the predictions. Score predictions must
    already lie inside the clamp range; the clamp has zero slope outside it.
    """
    _check_maps(pred, target)
    vm = np.asarray(target.valid_mask, dtype=bool)
    cm = np.asarray(target.center_mask, dtype=bool)

    def reg(p, t, mask):
        g = smooth_l1_grad(np.asarray(p, dtype=float) - np.asarray(t, dtype=float))
        m = mask if g.ndim == mask.ndim else mask[..., None]
        return np.where(m, g, 0.0)

    def det(q, s):
        q = np.asarray(q, dtype=float)
        inside = (q >= EPS) & (q <= 1.0 - EPS)
        return np.where(inside, focal_grad(clamp_scores(q), s, params), 0.0)

    return PredictionMaps(
        fingertip_score=det(pred.fingertip_score, target.fingertip_score),
        center_score=det(pred.center_score, target.center_score),
        fingertip_offset=reg(pred.fingertip_offset, target.fingertip_offset, vm),
        center_offset=reg(pred.center_offset, target.center_offset, cm),
        sin_map=reg(pred.sin_map, target.sin_map, vm),
        cos_map=reg(pred.cos_map, target.cos_map, vm),
    )
