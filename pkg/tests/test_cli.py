import math
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pytest

from ddgrasp.cli import main
from ddgrasp.geometry import DoubleDotGrasp, OrientedRect, Point2, rect_to_grasp
from ddgrasp.io import read_ddhm, read_predictions, write_ddhm, write_predictions
from ddgrasp.labeling import LabelConfig, render_targets
from ddgrasp.maps import PredictionMaps
from ddgrasp.metrics import double_dot_error

DATA = Path(__file__).parent / "data"
SVG = "{http://www.w3.org/2000/svg}"


def run(capsys, *argv):
    try:
        code = main([str(a) for a in argv])
    except SystemExit as e:
        code = e.code
    out = capsys.readouterr()
    return code, out.out, out.err


def jacquard_line(r: OrientedRect) -> str:
    # the importer negates theta by default
    return f"{r.center.x};{r.center.y};{-math.degrees(r.theta)};{r.w};{r.h}\n"


def test_help_and_unknown_flag(capsys):
    assert run(capsys, "--help")[0] == 0
    for sub in ("label", "decode", "eval", "sim", "roundtrip", "render"):
        assert run(capsys, sub, "--help")[0] == 0
    assert run(capsys, "decode", "--maps", "x", "--bogus")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2


def test_label_jacquard(tmp_path, capsys):
    r = OrientedRect.make(200.0, 180.0, 40.0, 10.0, 0.5)
    ann = tmp_path / "g.txt"
    ann.write_text(jacquard_line(r))
    out = tmp_path / "m.ddhm"
    code, stdout, _ = run(capsys, "label", ann, "--format", "jacquard", "--out", out)
    assert code == 0 and "rendered 1 grasps" in stdout
    maps, n = read_ddhm(out.read_bytes())
    assert n == 4 and maps.fingertip_score.shape == (128, 128)
    g = rect_to_grasp(r)
    for p in (g.c1, g.c2):
        assert maps.fingertip_score[int(p.y // 4), int(p.x // 4)] == 1.0


def test_label_errors(tmp_path, capsys):
    ann = tmp_path / "g.txt"
    ann.write_text("1000;1000;0;20;10\n")
    code, _, err = run(capsys, "label", ann, "--format", "jacquard", "--out", tmp_path / "m.ddhm")
    assert code == 3 and "grasp 0" in err
    assert run(capsys, "label", ann, "--format", "xml", "--out", tmp_path / "m.ddhm")[0] == 2
    ann.write_text("1;2;x;4;5\n")
    assert run(capsys, "label", ann, "--format", "jacquard", "--out", tmp_path / "m.ddhm")[0] == 2


def write_maps(path, rects):
    path.write_bytes(write_ddhm(render_targets(rects, LabelConfig()), 4))


def test_decode_examples(tmp_path, capsys):
    r = OrientedRect.make(201.3, 187.9, 37.7, 10.0, 0.61)
    write_maps(tmp_path / "one.ddhm", [r])
    code, stdout, _ = run(capsys, "decode", "--maps", tmp_path / "one.ddhm", "--out", tmp_path / "p.txt")
    assert code == 0 and stdout.startswith("best one:")
    preds = read_predictions((tmp_path / "p.txt").read_bytes())
    assert double_dot_error(preds["one"][0][0], rect_to_grasp(r))[0] <= 0.5

    a = OrientedRect.make(150, 150, 40, 10, 0.3)
    b = OrientedRect.make(190, 200, 30, 10, 2.0)
    write_maps(tmp_path / "two.ddhm", [a, b])
    assert run(capsys, "decode", "--maps", tmp_path / "two.ddhm", "--out", tmp_path / "p2.txt")[0] == 0
    got = [g for g, _ in read_predictions((tmp_path / "p2.txt").read_bytes())["two"]]
    gts = [rect_to_grasp(a), rect_to_grasp(b)]
    assert all(min(double_dot_error(c, g)[0] for c in got) <= 0.5 for g in gts)
    assert all(min(double_dot_error(c, g)[0] for g in gts) <= 0.5 for c in got)

    (tmp_path / "zero.ddhm").write_bytes(write_ddhm(PredictionMaps.zeros(8, 8), 4))
    code, stdout, _ = run(capsys, "decode", "--maps", tmp_path / "zero.ddhm", "--out", tmp_path / "p3.txt")
    assert code == 0 and "n_candidates=0" in stdout
    assert (tmp_path / "p3.txt").read_text() == "zero\n"
    assert read_predictions((tmp_path / "p3.txt").read_text()) == {"zero": []}


def test_decode_corrupted_magic(tmp_path, capsys):
    data = bytearray(write_ddhm(PredictionMaps.zeros(4, 4), 4))
    data[0:4] = b"XXXX"
    (tmp_path / "bad.ddhm").write_bytes(bytes(data))
    code, _, err = run(capsys, "decode", "--maps", tmp_path / "bad.ddhm")
    assert code == 2 and "magic" in err


def eval_fixture(tmp_path, n_ok):
    rng = np.random.default_rng(5)
    preds, gt_files = {}, []
    for i in range(10):
        r = OrientedRect.make(*rng.uniform(50, 400, 2), 30, 10, rng.uniform(0, math.pi))
        f = tmp_path / f"img{i}.txt"
        f.write_text(jacquard_line(r))
        gt_files.append(f)
        theta = r.theta if i < n_ok else r.theta + math.pi / 2
        preds[f"img{i}"] = [(rect_to_grasp(OrientedRect.make(r.center.x, r.center.y, r.w, r.h, theta)), 1.0)]
    (tmp_path / "p.txt").write_bytes(write_predictions(preds))
    return gt_files


def test_eval_examples(tmp_path, capsys):
    gts = eval_fixture(tmp_path, 10)
    code, stdout, _ = run(capsys, "eval", "--pred", tmp_path / "p.txt", "--format", "jacquard", "--gt", *gts)
    assert code == 0 and "accuracy=1.000" in stdout
    gts = eval_fixture(tmp_path, 7)
    code, stdout, _ = run(capsys, "eval", "--pred", tmp_path / "p.txt", "--format", "jacquard", "--gt", *gts)
    assert code == 0 and "accuracy=0.700" in stdout
    code, _, err = run(capsys, "eval", "--pred", tmp_path / "p.txt", "--format", "jacquard", "--gt", *gts[:9])
    assert code == 2 and "img9" in err


def test_sim_examples(tmp_path, capsys):
    code, first, _ = run(capsys, "sim", "--seeds", "0..20", "--oracle")
    assert code == 0 and "success_rate=1.000" in first
    assert run(capsys, "sim", "--seeds", "0..20", "--oracle")[1] == first
    (tmp_path / "empty.txt").write_text("")
    code, stdout, _ = run(capsys, "sim", "--seeds", "0..20", "--preds", tmp_path / "empty.txt")
    assert code == 0 and "success_rate=0.000" in stdout
    assert run(capsys, "sim", "--seeds", "5..5", "--oracle")[0] == 2
    assert run(capsys, "sim", "--seeds", "abc", "--oracle")[0] == 2
    assert run(capsys, "sim", "--seeds", "0..3", "--oracle", "--export-dir", tmp_path)[0] == 0
    assert (tmp_path / "scene2.txt").exists()


def test_roundtrip_examples(capsys):
    code, stdout, _ = run(capsys, "roundtrip", "--seeds", "0..100")
    assert code == 0
    vals = dict(line.split("=") for line in stdout.split() if "=" in line)
    assert float(vals["recovery_rate"]) >= 0.99
    assert float(vals["sim_success_rate"]) >= 0.95
    assert run(capsys, "roundtrip", "--seeds", "0..0")[0] == 2
    assert run(capsys, "roundtrip", "--seeds", "3..5", "--verbose")[1] == \
        run(capsys, "roundtrip", "--seeds", "3..5", "--verbose")[1]


def test_render_examples(tmp_path, capsys):
    (tmp_path / "zero.ddhm").write_bytes(write_ddhm(PredictionMaps.zeros(16, 16), 4))
    svg = tmp_path / "blank.svg"
    assert run(capsys, "render", "--maps", tmp_path / "zero.ddhm", "--svg", svg)[0] == 0
    root = ET.parse(svg).getroot()
    assert root.tag == SVG + "svg"
    assert len(root.findall(f".//{SVG}rect")) == 1  # background only
    assert not root.findall(f".//{SVG}circle")

    g = DoubleDotGrasp(Point2(10, 20), Point2(40, 25))
    (tmp_path / "p.txt").write_bytes(write_predictions({"img": [(g, 2.0)]}))
    one = tmp_path / "one.svg"
    assert run(capsys, "render", "--preds", tmp_path / "p.txt", "--svg", one)[0] == 0
    assert len(ET.parse(one).getroot().findall(f".//{SVG}line")) == 1
    again = tmp_path / "again.svg"
    run(capsys, "render", "--preds", tmp_path / "p.txt", "--svg", again)
    assert one.read_bytes() == again.read_bytes()

    assert run(capsys, "render", "--svg", tmp_path / "x.svg")[0] == 2
    assert run(capsys, "render", "--maps", tmp_path / "missing.ddhm", "--svg", tmp_path / "x.svg")[0] == 2
