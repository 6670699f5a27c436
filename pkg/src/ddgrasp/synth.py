"""Synthetic prediction maps for filter ablations.

Each scene holds two polygon objects. The "network output" is the oracle
rendering of one gt grasp per object, scaled by a per-object confidence, plus
distractor fingertip peaks with random score, orientation and offset scattered
around the objects' silhouettes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .decode import DecodeConfig, decode
from .geometry import DoubleDotGrasp, Point2, grasp_to_rect
from .labeling import LabelConfig, render_targets
from .maps import PredictionMaps
from .sim import COLLISION, GraspOutcome, GripperModel, PolygonScene, SceneParams, execute_grasp, generate_scene, gt_grasps


@dataclass(frozen=True)
class DistractorParams:
    n_objects: int = 2
    n_distractors: int = 10
    # true and false peaks share one score distribution
    gt_confidence: tuple[float, float] = (0.5, 1.0)
    distractor_score: tuple[float, float] = (0.5, 1.0)
    # distance from object center, in units of the object's mean radius
    ring: tuple[float, float] = (0.6, 1.8)
    min_separation_cells: int = 3
    object_radius: tuple[float, float] = (14.0, 26.0)
    plate_h: float = 10.0


@dataclass
class SyntheticScene:
    seed: int
    objects: list[PolygonScene]
    gt: list[DoubleDotGrasp]
    maps: PredictionMaps
    distractor_cells: list[tuple[int, int]] = field(default_factory=list)


def _object_centers(rng, k: int, lo: float, hi: float, min_dist: float) -> list[tuple[float, float]]:
    out = []
    while len(out) < k:
        c = tuple(rng.uniform(lo, hi, 2))
        if all(math.dist(c, o) >= min_dist for o in out):
            out.append(c)
    return out


def make_scene(seed: int, params: DistractorParams = DistractorParams(),
               label: LabelConfig = LabelConfig(), gripper: GripperModel = GripperModel()) -> SyntheticScene:
    rng = np.random.default_rng([seed, 7919])
    n = label.stride
    img = min(label.map_height, label.map_width) * n
    margin = 2.5 * params.object_radius[1]
    objects, gts = [], []
    centers = _object_centers(rng, params.n_objects, margin, img - margin, 4.5 * params.object_radius[1])
    for k, c in enumerate(centers):
        sp = SceneParams(radius=params.object_radius, center=c)
        # retry seeds until the object admits an antipodal grasp
        sub = int(rng.integers(2**31))
        while True:
            obj = generate_scene(sub, sp)
            found = gt_grasps(obj, gripper)
            if found:
                break
            sub += 1
        objects.append(obj)
        gts.append(found[0])

    H, W = label.map_height, label.map_width
    maps = PredictionMaps.zeros(H, W)
    taken = []
    for g in gts:
        conf = rng.uniform(*params.gt_confidence)
        t = render_targets([grasp_to_rect(g, params.plate_h)], label)
        maps.fingertip_score = np.maximum(maps.fingertip_score, conf * t.fingertip_score)
        maps.center_score = np.maximum(maps.center_score, conf * t.center_score)
        maps.fingertip_offset = np.where(t.valid_mask[..., None], t.fingertip_offset, maps.fingertip_offset)
        maps.center_offset = np.where(t.center_mask[..., None], t.center_offset, maps.center_offset)
        maps.sin_map = np.where(t.valid_mask, t.sin_map, maps.sin_map)
        maps.cos_map = np.where(t.valid_mask, t.cos_map, maps.cos_map)
        taken += [tuple(x) for x in np.argwhere(t.valid_mask)]

    ys, xs = np.mgrid[0:H, 0:W].astype(float)
    cells = []
    while len(cells) < params.n_distractors:
        k = int(rng.integers(len(objects)))
        cx, cy = centers[k]
        rad = float(np.mean([math.dist((p.x, p.y), (cx, cy)) for p in objects[k].vertices]))
        rho = rng.uniform(*params.ring) * rad
        phi = rng.uniform(0, 2 * math.pi)
        x, y = cx + rho * math.cos(phi), cy + rho * math.sin(phi)
        row, col = int(y // n), int(x // n)
        if not (0 <= row < H and 0 <= col < W):
            continue
        if any(max(abs(row - r), abs(col - c)) < params.min_separation_cells for r, c in taken + cells):
            continue
        if any(o.contains(Point2(x, y)) for o in objects):
            continue
        score = rng.uniform(*params.distractor_score)
        ori = rng.uniform(-math.pi, math.pi)
        bump = score * np.exp(-((xs - col) ** 2 + (ys - row) ** 2))
        maps.fingertip_score = np.maximum(maps.fingertip_score, bump)
        maps.fingertip_offset[row, col] = rng.uniform(0, 1, 2)
        maps.sin_map[row, col] = math.sin(ori)
        maps.cos_map[row, col] = math.cos(ori)
        cells.append((row, col))
    return SyntheticScene(seed, objects, gts, maps, cells)


def execute_multi(objects: list[PolygonScene], grasp: DoubleDotGrasp, gripper: GripperModel) -> GraspOutcome:
    """Success if the grasp lifts one object without starting inside any other."""
    for o in objects:
        if o.contains(grasp.c1) or o.contains(grasp.c2):
            return GraspOutcome(False, COLLISION)
    first = None
    for o in objects:
        res = execute_grasp(o, grasp, gripper)
        if res.success:
            return res
        if first is None or (first.reason == "no_contact" and res.reason != "no_contact"):
            first = res
    return first


ABLATIONS = {
    "none": (False, False),
    "center": (False, True),
    "orientation": (True, False),
    "both": (True, True),
}


def run_ablation(seeds, params: DistractorParams = DistractorParams(), base: DecodeConfig = DecodeConfig(),
                 label: LabelConfig = LabelConfig(), gripper: GripperModel = GripperModel()) -> dict[str, float]:
    """Sim success rate of the top decoded grasp under each filter setting."""
    wins = {k: 0 for k in ABLATIONS}
    seeds = list(seeds)
    for s in seeds:
        sc = make_scene(s, params, label, gripper)
        for name, (ori, cen) in ABLATIONS.items():
            cands = decode(sc.maps, replace(base, orientation_matching=ori, center_matching=cen, stride=label.stride))
            if cands and execute_multi(sc.objects, cands[0].grasp, gripper).success:
                wins[name] += 1
    return {k: v / len(seeds) for k, v in wins.items()}
