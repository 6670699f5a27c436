"""End-to-end self-check: scene -> gt grasps -> labels -> DDHM -> decode -> sim."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .decode import DecodeConfig, GraspCandidate, decode
from .geometry import DoubleDotGrasp, grasp_to_rect
from .io import read_ddhm, write_ddhm
from .labeling import LabelConfig, render_targets
from .metrics import RectMetricConfig, double_dot_error, rectangle_match
from .sim import GripperModel, SceneParams, execute_grasp, generate_scene, gt_grasps


@dataclass(frozen=True)
class RoundtripConfig:
    label: LabelConfig = LabelConfig()
    decode: DecodeConfig = DecodeConfig()
    gripper: GripperModel = GripperModel()
    scene: SceneParams = SceneParams()
    metric: RectMetricConfig = RectMetricConfig()
    plate_h: float = 10.0
    num_gt: int = 1
    tolerance_px: float = 1.0


@dataclass
class SceneResult:
    seed: int
    n_gt: int
    top: GraspCandidate | None
    fingertip_error: float | None
    recovered: bool
    rect_match: bool
    sim_reason: str


@dataclass
class RoundtripReport:
    results: list[SceneResult] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.results)

    @property
    def recovery_rate(self) -> float:
        return sum(r.recovered for r in self.results) / self.n if self.n else 0.0

    @property
    def rect_match_rate(self) -> float:
        rec = [r for r in self.results if r.recovered]
        return sum(r.rect_match for r in rec) / len(rec) if rec else 0.0

    @property
    def sim_success_rate(self) -> float:
        return sum(r.sim_reason == "success" for r in self.results) / self.n if self.n else 0.0

    def lines(self, verbose: bool = False) -> list[str]:
        out = []
        if verbose:
            for r in self.results:
                err = "-" if r.fingertip_error is None else f"{r.fingertip_error:.4f}"
                out.append(f"seed {r.seed}: gt={r.n_gt} err_px={err} recovered={int(r.recovered)} "
                           f"rect={int(r.rect_match)} sim={r.sim_reason}")
        out.append(f"n_scenes={self.n}")
        out.append(f"recovery_rate={self.recovery_rate:.4f}")
        out.append(f"rect_match_rate={self.rect_match_rate:.4f}")
        out.append(f"sim_success_rate={self.sim_success_rate:.4f}")
        return out


def roundtrip_scene(seed: int, cfg: RoundtripConfig = RoundtripConfig()) -> SceneResult:
    scene = generate_scene(seed, cfg.scene)
    gts = gt_grasps(scene, cfg.gripper)[:cfg.num_gt]
    if not gts:
        return SceneResult(seed, 0, None, None, False, False, "no_gt")
    rects = [grasp_to_rect(g, cfg.plate_h) for g in gts]
    targets = render_targets(rects, cfg.label)
    maps, n = read_ddhm(write_ddhm(targets, cfg.label.stride))
    dcfg = cfg.decode
    if dcfg.stride != n:
        dcfg = DecodeConfig(**{**dcfg.__dict__, "stride": n})
    cands = decode(maps, dcfg)
    if not cands:
        return SceneResult(seed, len(gts), None, None, False, False, "no_prediction")
    top = cands[0]
    errs = [double_dot_error(top.grasp, g)[0] for g in gts]
    k = min(range(len(gts)), key=errs.__getitem__)
    recovered = errs[k] <= cfg.tolerance_px
    rect_ok = rectangle_match(grasp_to_rect(top.grasp, cfg.plate_h), [rects[k]], cfg.metric)
    outcome = execute_grasp(scene, top.grasp, cfg.gripper)
    return SceneResult(seed, len(gts), top, errs[k], recovered, rect_ok, outcome.reason)


def roundtrip(seeds: Iterable[int], cfg: RoundtripConfig = RoundtripConfig()) -> RoundtripReport:
    return RoundtripReport([roundtrip_scene(s, cfg) for s in seeds])


def top_grasp(cands: list[GraspCandidate]) -> DoubleDotGrasp | None:
    return cands[0].grasp if cands else None
