"""``ddgrasp`` command line.

Exit codes: 0 success, 2 usage or input error, 3 processing error.
Angles cross this boundary in degrees.
"""

from __future__ import annotations

import argparse
import math
import re
import sys
from pathlib import Path

from . import __version__
from .decode import DecodeConfig, DecodeError, center_peaks, decode, fingertip_peaks
from .geometry import GeometryError, grasp_to_rect
from .io import (AnnotationSet, FormatError, format_scene, parse_cornell, parse_jacquard, parse_scene, read_ddhm,
                 read_predictions, write_ddhm, write_predictions)
from .labeling import LabelConfig, LabelingError, render_targets
from .metrics import MetricError, RectMetricConfig, evaluate
from .pipeline import RoundtripConfig, roundtrip
from .render import render_svg
from .sim import GripperModel, SceneParams, SimError, generate_scene, oracle_predictor, run_trials


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class ProcessingError(Exception):
    pass


def _seed_range(text: str) -> range:
    m = re.fullmatch(r"\s*(-?\d+)\.\.(-?\d+)\s*", text)
    if not m:
        raise argparse.ArgumentTypeError(f"expected a..b, got {text!r}")
    a, b = int(m.group(1)), int(m.group(2))
    if b <= a:
        raise argparse.ArgumentTypeError(f"empty seed range {text!r} (b is exclusive)")
    return range(a, b)


def _size(text: str) -> tuple[int, int]:
    m = re.fullmatch(r"(\d+)x(\d+)", text.strip())
    if not m or int(m.group(1)) == 0 or int(m.group(2)) == 0:
        raise argparse.ArgumentTypeError(f"expected HxW with positive sizes, got {text!r}")
    return int(m.group(1)), int(m.group(2))


def _read_bytes(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror or e}") from None


def _write(path: str, data: bytes | str):
    p = Path(path)
    try:
        if isinstance(data, str):
            p.write_text(data, encoding="utf-8")
        else:
            p.write_bytes(data)
    except OSError as e:
        raise ProcessingError(f"cannot write {path}: {e.strerror or e}") from None


def _parse_annotations(path: str, fmt: str, args) -> AnnotationSet:
    data = _read_bytes(path)
    image_id = Path(path).stem
    try:
        if fmt == "cornell":
            return parse_cornell(data, image_id, plate_edge=args.plate_edge)
        return parse_jacquard(data, image_id, theta_flip=args.theta_flip)
    except (FormatError, GeometryError, UnicodeDecodeError) as e:
        raise InputError(f"{path}: {e}") from None


# --- argument groups ----------------------------------------------------------

def _add_annotation_flags(p):
    p.add_argument("--format", choices=("cornell", "jacquard"), required=True, help="annotation grammar")
    p.add_argument("--plate-edge", choices=("12", "23"), default="12",
                   help="Cornell: which vertex pair spans a jaw plate")
    p.add_argument("--theta-flip", action=argparse.BooleanOptionalAction, default=True,
                   help="Jacquard: negate theta into the y-down image frame")


def _add_label_flags(p):
    p.add_argument("--size", type=_size, default=(128, 128), metavar="HxW", help="output map size in cells")
    p.add_argument("--stride", type=int, default=4, help="down-sampling factor n")
    p.add_argument("--sigma-x", type=float, default=1.0, help="Gaussian spread along the grasp axis (cells)")
    p.add_argument("--sigma-y-factor", type=float, default=0.75, help="plate-direction spread as a fraction of h")
    p.add_argument("--literal-gaussian", action="store_true",
                   help="keep the 1/(sigma_x*sigma_y) amplitude (peaks below 1)")
    p.add_argument("--half-exponent", action="store_true", help="use exp(-q/2) instead of exp(-q)")


def _add_decode_flags(p):
    p.add_argument("--topk", type=int, default=70, help="fingertip and center candidates kept")
    p.add_argument("--ori-tol-deg", type=float, default=30.0, help="orientation matching tolerance (degrees)")
    p.add_argument("--min-open", type=float, default=2.0, help="minimum opening (input pixels)")
    p.add_argument("--max-open", type=float, default=70.0, help="maximum opening (input pixels)")
    p.add_argument("--center-radius", type=float, default=1.0 / 3.0,
                   help="center region radius as a fraction of the opening")
    p.add_argument("--nms-window", type=int, default=3, help="local-maximum window (odd)")
    p.add_argument("--no-orientation-matching", action="store_true", help="disable orientation matching")
    p.add_argument("--no-center-matching", action="store_true", help="disable center matching")


def _add_metric_flags(p):
    p.add_argument("--iou", type=float, default=0.25, help="IoU threshold (strictly exceeded)")
    p.add_argument("--angle-deg", type=float, default=30.0, help="axis angle threshold (degrees)")
    p.add_argument("--plate-h", type=float, default=10.0, help="jaw size h used to turn fingertip pairs into rectangles")


def _add_gripper_flags(p):
    p.add_argument("--mu", type=float, default=0.4, help="friction coefficient")
    p.add_argument("--grip-min-open", type=float, default=2.0, help="gripper minimum opening (pixels)")
    p.add_argument("--grip-max-open", type=float, default=70.0, help="gripper maximum opening (pixels)")
    p.add_argument("--plate-halfwidth", type=float, default=5.0, help="gripper plate half-width (pixels)")


def _add_scene_flags(p):
    p.add_argument("--vertices", type=_seed_range, default=range(5, 10), metavar="a..b",
                   help="vertex-count range (b exclusive)")
    p.add_argument("--radius-min", type=float, default=14.0, help="smallest base radius (pixels)")
    p.add_argument("--radius-max", type=float, default=26.0, help="largest base radius (pixels)")
    p.add_argument("--irregularity", type=float, default=0.3, help="angle and radius jitter in [0, 1)")


def _label_cfg(args) -> LabelConfig:
    h, w = args.size
    try:
        return LabelConfig(map_height=h, map_width=w, stride=args.stride, sigma_x=args.sigma_x,
                           sigma_y_factor=args.sigma_y_factor, peak_normalized=not args.literal_gaussian,
                           half_exponent=args.half_exponent)
    except LabelingError as e:
        raise UsageError(str(e)) from None


def _decode_cfg(args, stride: int) -> DecodeConfig:
    try:
        return DecodeConfig(
            top_k=args.topk, stride=stride, min_opening=args.min_open, max_opening=args.max_open,
            orientation_tolerance=math.radians(args.ori_tol_deg), center_radius_factor=args.center_radius,
            nms_window=args.nms_window, orientation_matching=not args.no_orientation_matching,
            center_matching=not args.no_center_matching,
        )
    except DecodeError as e:
        raise UsageError(str(e)) from None


def _metric_cfg(args) -> RectMetricConfig:
    try:
        return RectMetricConfig(iou_threshold=args.iou, angle_threshold=math.radians(args.angle_deg))
    except MetricError as e:
        raise UsageError(str(e)) from None


def _gripper(args) -> GripperModel:
    try:
        return GripperModel(min_opening=args.grip_min_open, max_opening=args.grip_max_open,
                            plate_halfwidth=args.plate_halfwidth, mu=args.mu)
    except SimError as e:
        raise UsageError(str(e)) from None


def _scene_params(args) -> SceneParams:
    try:
        return SceneParams(n_vertices=(args.vertices.start, args.vertices.stop - 1),
                           radius=(args.radius_min, args.radius_max), irregularity=args.irregularity)
    except SimError as e:
        raise UsageError(str(e)) from None


# --- subcommands ---------------------------------------------------------------

def cmd_label(args) -> int:
    cfg = _label_cfg(args)
    ann = _parse_annotations(args.annotations, args.format, args)
    try:
        targets = render_targets(ann.grasps, cfg)
    except LabelingError as e:
        raise ProcessingError(str(e)) from None
    _write(args.out, write_ddhm(targets, cfg.stride))
    note = f" ({ann.skipped} skipped)" if ann.skipped else ""
    print(f"rendered {len(ann.grasps)} grasps{note} -> {args.out}")
    return 0


def _load_maps(path: str):
    try:
        return read_ddhm(_read_bytes(path))
    except FormatError as e:
        raise InputError(f"{path}: {e}") from None


def cmd_decode(args) -> int:
    maps, n = _load_maps(args.maps)
    cfg = _decode_cfg(args, n)
    cands = decode(maps, cfg)
    image_id = args.image_id or Path(args.maps).stem
    if args.out:
        _write(args.out, write_predictions({image_id: [(c.grasp, c.score) for c in cands]}))
    if cands:
        g = cands[0]
        print(f"best {image_id}: ({g.grasp.c1.x:.3f}, {g.grasp.c1.y:.3f}) - "
              f"({g.grasp.c2.x:.3f}, {g.grasp.c2.y:.3f}) score {g.score:.4f}")
    else:
        print(f"best {image_id}: none")
    print(f"n_candidates={len(cands)}")
    return 0


def _load_predictions(path: str):
    try:
        return read_predictions(_read_bytes(path))
    except (FormatError, UnicodeDecodeError) as e:
        raise InputError(f"{path}: {e}") from None


def cmd_eval(args) -> int:
    cfg = _metric_cfg(args)
    if not args.plate_h > 0:
        raise UsageError("--plate-h must be positive")
    preds = _load_predictions(args.pred)
    gts = {}
    for path in args.gt:
        ann = _parse_annotations(path, args.format, args)
        if ann.image_id in gts:
            raise InputError(f"duplicate ground-truth image id {ann.image_id}")
        if not ann.grasps:
            raise InputError(f"{path}: no usable ground-truth rectangles")
        gts[ann.image_id] = ann.grasps
    unknown = sorted(set(preds) - set(gts))
    if unknown:
        raise InputError(f"prediction ids without ground truth: {', '.join(unknown)}")
    top = {k: grasp_to_rect(v[0][0], args.plate_h) for k, v in preds.items() if v}
    report = evaluate(top, gts, cfg)
    print("\n".join(report.lines()))
    return 0


def scene_id(seed: int) -> str:
    return f"scene{seed}"


def cmd_sim(args) -> int:
    gripper = _gripper(args)
    params = _scene_params(args)
    if args.oracle:
        predictor = oracle_predictor(gripper)
    else:
        preds = _load_predictions(args.preds)

        def predictor(scene):
            items = preds.get(scene_id(scene.seed))
            return items[0][0] if items else None
    try:
        report = run_trials(args.seeds, predictor, gripper, params)
    except SimError as e:
        raise ProcessingError(str(e)) from None
    if args.export_dir:
        out = Path(args.export_dir)
        if not out.is_dir():
            raise InputError(f"--export-dir {out} is not a directory")
        for s in args.seeds:
            sc = generate_scene(s, params)
            _write(str(out / f"{scene_id(s)}.txt"), format_scene(sc.vertices, f"seed {s}"))
    print("\n".join(report.lines()))
    return 0


def cmd_roundtrip(args) -> int:
    label = _label_cfg(args)
    cfg = RoundtripConfig(label=label, decode=_decode_cfg(args, label.stride), gripper=_gripper(args),
                          scene=_scene_params(args), metric=_metric_cfg(args), plate_h=args.plate_h,
                          num_gt=args.num_gt, tolerance_px=args.tolerance_px)
    if args.num_gt < 1:
        raise UsageError("--num-gt must be >= 1")
    try:
        report = roundtrip(args.seeds, cfg)
    except (LabelingError, SimError, GeometryError) as e:
        raise ProcessingError(str(e)) from None
    print("\n".join(report.lines(verbose=args.verbose)))
    return 0


def cmd_render(args) -> int:
    if not (args.maps or args.preds or args.scene):
        raise UsageError("render needs at least one of --maps, --preds, --scene")
    width, height = args.canvas[1], args.canvas[0]
    heatmap, stride, tips, centers, grasps, polys = None, 1, [], [], [], []
    if args.maps:
        maps, stride = _load_maps(args.maps)
        H, W = maps.shape
        height, width = H * stride, W * stride
        heatmap = maps.fingertip_score
        cfg = DecodeConfig(top_k=max(2, args.topk), stride=stride)
        tips = fingertip_peaks(maps, cfg)
        centers = center_peaks(maps, cfg)
    if args.preds:
        preds = _load_predictions(args.preds)
        keys = [args.image_id] if args.image_id else sorted(preds)
        for k in keys:
            items = preds.get(k)
            if items is None:
                raise InputError(f"image id {k} not in {args.preds}")
            grasps += [g for g, _ in (items if args.all else items[:1])]
    if args.scene:
        try:
            verts = parse_scene(_read_bytes(args.scene))
        except FormatError as e:
            raise InputError(f"{args.scene}: {e}") from None
        if len(verts) < 3:
            raise InputError(f"{args.scene}: need at least 3 vertices")
        polys.append(verts)
    svg = render_svg(width, height, heatmap, stride, tips, centers, grasps, polys)
    _write(args.svg, svg)
    return 0


# --- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(prog="ddgrasp", description="Double-dot antipodal grasp toolkit.",
                                     formatter_class=fmt)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("label", help="render target maps from annotations", formatter_class=fmt)
    p.add_argument("annotations", help="annotation file")
    _add_annotation_flags(p)
    _add_label_flags(p)
    p.add_argument("--out", required=True, help="output DDHM file")
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("decode", help="group fingertips from a DDHM map file", formatter_class=fmt)
    p.add_argument("--maps", required=True, help="input DDHM file")
    _add_decode_flags(p)
    p.add_argument("--image-id", default=None, help="id written to the prediction file; the maps file stem if omitted")
    p.add_argument("--out", default=None, help="prediction file to write")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("eval", help="rectangle metric of top predictions", formatter_class=fmt)
    p.add_argument("--pred", required=True, help="prediction file")
    p.add_argument("--gt", required=True, nargs="+", help="annotation files; image id = file stem")
    _add_annotation_flags(p)
    _add_metric_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sim", help="simulated grasp trials on generated polygons", formatter_class=fmt)
    p.add_argument("--seeds", type=_seed_range, required=True, metavar="a..b", help="scene seeds, b exclusive")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preds", help="prediction file with image ids scene<seed>")
    src.add_argument("--oracle", action="store_true", help="use the top analytic gt grasp")
    _add_gripper_flags(p)
    _add_scene_flags(p)
    p.add_argument("--export-dir", default=None, help="also write scene<seed>.txt vertex lists here")
    p.set_defaults(func=cmd_sim)

    p = sub.add_parser("roundtrip", help="scenes -> labels -> decode -> sim self-check", formatter_class=fmt)
    p.add_argument("--seeds", type=_seed_range, required=True, metavar="a..b", help="scene seeds, b exclusive")
    p.add_argument("--num-gt", type=int, default=1, help="gt grasps rendered per scene")
    p.add_argument("--tolerance-px", type=float, default=1.0, help="fingertip error counted as recovered")
    p.add_argument("--verbose", action="store_true", help="one line per seed")
    _add_label_flags(p)
    _add_decode_flags(p)
    _add_metric_flags(p)
    _add_gripper_flags(p)
    _add_scene_flags(p)
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("render", help="write an SVG of maps, predictions and/or a scene", formatter_class=fmt)
    p.add_argument("--maps", default=None, help="DDHM file: fingertip heatmap and top-k peaks")
    p.add_argument("--preds", default=None, help="prediction file: grasp segments")
    p.add_argument("--scene", default=None, help="vertex-list file: object outline")
    p.add_argument("--svg", required=True, help="output SVG path")
    p.add_argument("--image-id", default=None, help="only draw predictions for this id")
    p.add_argument("--all", action="store_true", help="draw every prediction, not just the top one")
    p.add_argument("--topk", type=int, default=70, help="peaks drawn from --maps")
    p.add_argument("--canvas", type=_size, default=(512, 512), metavar="HxW", help="canvas size without --maps")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"ddgrasp {args.command}: error: {e}", file=sys.stderr)
        return 2
    except InputError as e:
        print(f"ddgrasp {args.command}: error: {e}", file=sys.stderr)
        return 2
    except ProcessingError as e:
        print(f"ddgrasp {args.command}: error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
