"""Static SVG figures: heatmap grid, keypoints, grasp segments, object outlines."""

from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import quoteattr

import numpy as np

from .decode import KeyPoint
from .geometry import DoubleDotGrasp, Point2


def _f(v: float) -> str:
    return f"{v:.3f}"


def render_svg(width: float, height: float, heatmap: np.ndarray | None = None, stride: int = 1,
               tips: Sequence[KeyPoint] = (), centers: Sequence[KeyPoint] = (),
               grasps: Sequence[DoubleDotGrasp] = (), polygons: Sequence[Sequence[Point2]] = (),
               title: str | None = None) -> str:
    """Coordinates are input-image pixels; heatmap cells are drawn ``stride`` wide."""
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(width)}" height="{_f(height)}" '
        f'viewBox="0 0 {_f(width)} {_f(height)}">',
    ]
    if title:
        out.append(f"<title>{title}</title>".replace("&", "&amp;"))
    out.append(f'<rect x="0" y="0" width="{_f(width)}" height="{_f(height)}" fill="black"/>')
    if heatmap is not None:
        hm = np.clip(np.asarray(heatmap, dtype=float), 0.0, 1.0)
        levels = np.rint(hm * 255).astype(int)
        out.append('<g id="heatmap">')
        for row, col in np.argwhere(levels > 0):
            g = levels[row, col]
            out.append(f'<rect x="{col * stride}" y="{row * stride}" width="{stride}" height="{stride}" '
                       f'fill="rgb({g},{g},{g})"/>')
        out.append("</g>")
    if polygons:
        out.append('<g id="objects" fill="none" stroke="orange" stroke-width="1">')
        for poly in polygons:
            d = " ".join(f"{'M' if i == 0 else 'L'}{_f(p.x)},{_f(p.y)}" for i, p in enumerate(poly)) + " Z"
            out.append(f"<path d={quoteattr(d)}/>")
        out.append("</g>")
    if grasps:
        out.append('<g id="grasps" stroke="deepskyblue" stroke-width="2">')
        for g in grasps:
            out.append(f'<line x1="{_f(g.c1.x)}" y1="{_f(g.c1.y)}" x2="{_f(g.c2.x)}" y2="{_f(g.c2.y)}"/>')
        out.append("</g>")
    if tips:
        out.append('<g id="fingertips" fill="red">')
        for k in tips:
            out.append(f'<circle cx="{_f(k.refined.x)}" cy="{_f(k.refined.y)}" r="2"/>')
        out.append("</g>")
    if centers:
        out.append('<g id="centers" fill="lime">')
        for k in centers:
            out.append(f'<circle cx="{_f(k.refined.x)}" cy="{_f(k.refined.y)}" r="2"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
