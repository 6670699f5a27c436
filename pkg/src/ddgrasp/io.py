"""File formats: Cornell/Jacquard annotations, DDHM map container, predictions, scene vertex lists.

DDHM layout (all integers u32 little-endian)::

    "DDHM" | version=1 | height | width | channels=8 | stride | 8 planes of
    height*width float32 LE, row-major, in ``maps.CHANNELS`` order

Predictions: one line per grasp ``image_id x1 y1 x2 y2 score`` with six
decimals, descending score within an image; a bare ``image_id`` line records
an image with no grasp.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .geometry import DoubleDotGrasp, OrientedRect, Point2, wrap_pi
from .maps import CHANNELS, PredictionMaps


class FormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass
class AnnotationSet:
    image_id: str
    grasps: list[OrientedRect] = field(default_factory=list)
    source: str = ""
    skipped: int = 0


def _text_lines(data: bytes | str) -> list[str]:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return data.splitlines()


def _float(tok: str, lineno: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise FormatError(f"malformed number {tok!r}", lineno) from None


def parse_cornell(data: bytes | str, image_id: str = "", plate_edge: str = "12") -> AnnotationSet:
    """Four ``x y`` lines per rectangle.

    With ``plate_edge="12"`` vertices 1-2 span a jaw plate (length ``h``) and
    edge 2-3 is the opening axis (length ``w``, angle ``theta``); ``"23"``
    swaps the roles. Groups containing NaN are skipped and counted.
    """
    if plate_edge not in ("12", "23"):
        raise FormatError(f"plate edge must be '12' or '23', got {plate_edge!r}")
    rows = []
    for lineno, raw in enumerate(_text_lines(data), start=1):
        line = raw.strip()
        if not line:
            continue
        toks = line.split()
        if len(toks) != 2:
            raise FormatError(f"expected 'x y', got {line!r}", lineno)
        rows.append((lineno, _float(toks[0], lineno), _float(toks[1], lineno)))
    if len(rows) % 4:
        raise FormatError(f"vertex count {len(rows)} is not a multiple of 4")
    out = AnnotationSet(image_id, source="cornell")
    for k in range(0, len(rows), 4):
        grp = rows[k:k + 4]
        pts = [(x, y) for _, x, y in grp]
        if any(math.isnan(v) for p in pts for v in p):
            out.skipped += 1
            continue
        if any(math.isinf(v) for p in pts for v in p):
            raise FormatError("infinite coordinate", grp[0][0])
        (x1, y1), (x2, y2), (x3, y3), _ = pts
        e12 = (x2 - x1, y2 - y1)
        e23 = (x3 - x2, y3 - y2)
        plate, opening = (e12, e23) if plate_edge == "12" else (e23, e12)
        h = math.hypot(*plate)
        w = math.hypot(*opening)
        if w <= 0 or h <= 0:
            raise FormatError("degenerate rectangle", grp[0][0])
        cx = sum(p[0] for p in pts) / 4
        cy = sum(p[1] for p in pts) / 4
        theta = wrap_pi(math.atan2(opening[1], opening[0]))
        out.grasps.append(OrientedRect(Point2(cx, cy), w, h, theta))
    return out


def parse_jacquard(data: bytes | str, image_id: str = "", theta_flip: bool = True) -> AnnotationSet:
    """``x;y;theta_deg;opening;jaw`` per line; blank and ``#`` lines ignored.

    The public files measure theta counterclockwise with y up; ``theta_flip``
    negates it into the y-down raster frame.
    """
    out = AnnotationSet(image_id, source="jacquard")
    for lineno, raw in enumerate(_text_lines(data), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split(";")
        if len(toks) != 5:
            raise FormatError(f"expected 5 ';'-separated fields, got {len(toks)}", lineno)
        x, y, deg, w, h = (_float(t.strip(), lineno) for t in toks)
        if not all(math.isfinite(v) for v in (x, y, deg, w, h)):
            raise FormatError("non-finite field", lineno)
        if w <= 0 or h <= 0:
            raise FormatError("opening and jaw size must be positive", lineno)
        theta = math.radians(-deg if theta_flip else deg)
        out.grasps.append(OrientedRect(Point2(x, y), w, h, wrap_pi(theta)))
    return out


# --- DDHM -----------------------------------------------------------------

MAGIC = b"DDHM"
VERSION = 1
_HEADER = struct.Struct("<4sIIIII")
HEADER_SIZE = _HEADER.size  # 24


def write_ddhm(maps: PredictionMaps, n: int) -> bytes:
    H, W = maps.shape
    header = _HEADER.pack(MAGIC, VERSION, H, W, len(CHANNELS), int(n))
    payload = b"".join(np.ascontiguousarray(p, dtype="<f4").tobytes() for p in maps.planes())
    return header + payload


def read_ddhm(data: bytes) -> tuple[PredictionMaps, int]:
    if len(data) < HEADER_SIZE:
        raise FormatError(f"header: need {HEADER_SIZE} bytes, got {len(data)}")
    magic, version, H, W, C, n = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"magic: expected {MAGIC!r}, got {magic!r}")
    if version != VERSION:
        raise FormatError(f"version: expected {VERSION}, got {version}")
    if C != len(CHANNELS):
        raise FormatError(f"channel_count: expected {len(CHANNELS)}, got {C}")
    if n < 1:
        raise FormatError("stride: must be >= 1")
    expected = HEADER_SIZE + C * H * W * 4
    if len(data) != expected:
        raise FormatError(f"payload length: expected {expected} bytes, got {len(data)}")
    flat = np.frombuffer(data, dtype="<f4", offset=HEADER_SIZE).reshape(C, H, W)
    maps = PredictionMaps.from_planes([flat[i].astype(np.float32) for i in range(C)])
    return maps, n


# --- predictions ------------------------------------------------------------

Prediction = tuple[DoubleDotGrasp, float]


def format_predictions(preds: Mapping[str, Sequence[Prediction]]) -> str:
    lines = []
    for image_id, items in preds.items():
        if any(c.isspace() for c in image_id) or not image_id:
            raise FormatError(f"image id {image_id!r} must be a non-empty token")
        if not items:
            lines.append(image_id)
            continue
        for g, score in sorted(items, key=lambda t: -t[1]):
            lines.append(
                f"{image_id} {g.c1.x:.6f} {g.c1.y:.6f} {g.c2.x:.6f} {g.c2.y:.6f} {score:.6f}"
            )
    return "".join(line + "\n" for line in lines)


def write_predictions(preds: Mapping[str, Sequence[Prediction]]) -> bytes:
    return format_predictions(preds).encode("utf-8")


def read_predictions(data: bytes | str) -> dict[str, list[Prediction]]:
    out: dict[str, list[Prediction]] = {}
    for lineno, raw in enumerate(_text_lines(data), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        image_id = toks[0]
        items = out.setdefault(image_id, [])
        if len(toks) == 1:
            continue
        if len(toks) != 6:
            raise FormatError(f"expected 'image_id x1 y1 x2 y2 score', got {len(toks)} fields", lineno)
        x1, y1, x2, y2, score = (_float(t, lineno) for t in toks[1:])
        try:
            g = DoubleDotGrasp(Point2(x1, y1), Point2(x2, y2))
        except ValueError as e:
            raise FormatError(str(e), lineno) from None
        if items and score > items[-1][1]:
            raise FormatError(f"scores for {image_id} not sorted in descending order", lineno)
        items.append((g, score))
    return out


# --- scenes -------------------------------------------------------------------

def format_scene(vertices: Iterable[Point2], comment: str | None = None) -> str:
    lines = [f"# {comment}"] if comment else []
    lines += [f"{p.x!r} {p.y!r}" for p in vertices]
    return "".join(line + "\n" for line in lines)


def parse_scene(data: bytes | str) -> list[Point2]:
    pts = []
    for lineno, raw in enumerate(_text_lines(data), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if len(toks) != 2:
            raise FormatError(f"expected 'x y', got {line!r}", lineno)
        x, y = _float(toks[0], lineno), _float(toks[1], lineno)
        if not (math.isfinite(x) and math.isfinite(y)):
            raise FormatError("non-finite vertex", lineno)
        pts.append(Point2(x, y))
    return pts
