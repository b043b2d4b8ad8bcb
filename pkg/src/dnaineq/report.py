"""Polygon documents in, JSON reports and SVG drawings out."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Optional, Sequence

from .decision import DecisionReport
from .geometry import ClosedCurve, Polygon, signed_area


class BadInputError(ValueError):
    """The polygon document could not be read or does not describe a cell."""


def _fmt(x: float) -> str:
    return f"{x:.9g}"


# --- input -----------------------------------------------------------------

def parse_polygon_document(doc: Any) -> tuple[Polygon, Optional[str], bool]:
    """(polygon, name, reversed) from a decoded ``{"vertices": [[x, y], ...]}``.

    ``reversed`` tells whether the input was clockwise and had to be flipped.
    """
    if not isinstance(doc, dict) or "vertices" not in doc:
        raise BadInputError("document must be an object with a 'vertices' array")
    raw = doc["vertices"]
    name = doc.get("name")
    if name is not None and not isinstance(name, str):
        raise BadInputError("'name' must be a string")
    try:
        pts = [(float(x), float(y)) for x, y in raw]
    except (TypeError, ValueError) as exc:
        raise BadInputError("vertices must be [x, y] number pairs") from exc
    if not all(math.isfinite(c) for p in pts for c in p):
        raise BadInputError("vertex coordinates must be finite")
    if len(pts) >= 2 and pts[0] == pts[-1]:
        pts = pts[:-1]
    flipped = len(pts) >= 3 and signed_area(pts) < 0
    try:
        poly = Polygon.from_points(pts)
    except ValueError as exc:
        raise BadInputError(str(exc)) from exc
    return poly, name, flipped


def load_polygon(path: str | Path) -> tuple[Polygon, Optional[str], bool]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise BadInputError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BadInputError(f"{path} is not valid JSON: {exc.msg}") from exc
    return parse_polygon_document(doc)


def map_edge_index(k: int, n: int, flipped: bool) -> int:
    """Edge index in the stored (counterclockwise) order for input edge ``k``."""
    if not 0 <= k < n:
        raise ValueError(f"edge index must be in [0, {n})")
    return (n - 2 - k) % n if flipped else k


# --- JSON ------------------------------------------------------------------

def _num(x: Optional[float]) -> Optional[float]:
    if x is None or not math.isfinite(x):
        return None
    return float(x)


def _pts(curve: Optional[ClosedCurve | Polygon]) -> Optional[list[list[float]]]:
    if curve is None:
        return None
    return [[float(x), float(y)] for x, y in curve.vertices]


def decision_document(report: DecisionReport, poly: Polygon, name: Optional[str] = None,
                      tolerance: Optional[float] = None, timing: bool = False) -> dict:
    doc = {
        "name": name,
        "vertices": _pts(poly),
        "status": report.status,
        "min_f": _num(report.min_f),
        "alpha": _num(report.alpha),
        "counts": {
            "n": report.n_vertices,
            "critical": report.n_critical,
            "edges": report.n_edges,
            "K": report.K,
        },
        "dp_min": _num(report.dp_min),
        "scan_min": _num(report.scan_min),
        "witness": _pts(report.witness),
        "simple_witness": _pts(report.simple_witness),
        "notes": list(report.notes),
        "tolerance": tolerance,
    }
    if timing:
        doc["timing"] = {k: float(v) for k, v in sorted(report.timing.items())}
    return doc


def dumps(doc: dict) -> str:
    """Deterministic JSON text (sorted keys, full float precision)."""
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def witness_from_document(doc: dict) -> Optional[ClosedCurve]:
    pts = doc.get("witness")
    return None if pts is None else ClosedCurve(tuple(map(tuple, pts)))


# --- SVG -------------------------------------------------------------------

SVG_SIZE = 480.0
SVG_PAD = 24.0


def render_svg(poly: Polygon, witness: Optional[ClosedCurve] = None,
               critical: Sequence = (), title: Optional[str] = None) -> str:
    """Cell outline, critical-point markers and an optional witness curve
    whose vertices carry their visiting order."""
    lo_x, lo_y = poly.array.min(axis=0)
    hi_x, hi_y = poly.array.max(axis=0)
    s = SVG_SIZE / max(hi_x - lo_x, hi_y - lo_y)
    width = (hi_x - lo_x) * s + 2 * SVG_PAD
    height = (hi_y - lo_y) * s + 2 * SVG_PAD

    def xy(p) -> tuple[str, str]:
        return _fmt((p[0] - lo_x) * s + SVG_PAD), _fmt((hi_y - p[1]) * s + SVG_PAD)

    def path(points) -> str:
        cmds = [("M" if i == 0 else "L") + " ".join(xy(p)) for i, p in enumerate(points)]
        return " ".join(cmds) + " Z"

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" '
        f'height="{_fmt(height)}" viewBox="0 0 {_fmt(width)} {_fmt(height)}">'
    ]
    if title:
        out.append(f"<title>{_escape(title)}</title>")
    out.append(f'<path class="cell" d="{path(poly.vertices)}" fill="#f4f4f4" stroke="#222" stroke-width="2"/>')
    if witness is not None:
        out.append(f'<path class="witness" d="{path(witness.vertices)}" fill="none" '
                   'stroke="#c0392b" stroke-width="1.5" stroke-linejoin="round"/>')
    for p in critical:
        cx, cy = xy(p)
        out.append(f'<circle class="critical" cx="{cx}" cy="{cy}" r="4" fill="#2471a3"/>')
    if witness is not None:
        # one label per location listing every visit
        order: dict[tuple[float, float], list[int]] = {}
        for i, p in enumerate(witness.vertices):
            order.setdefault((p[0], p[1]), []).append(i + 1)
        for p, idx in order.items():
            tx, ty = xy(p)
            out.append(f'<text class="order" x="{tx}" y="{ty}" dx="6" dy="-6" '
                       f'font-size="12" fill="#c0392b">{",".join(map(str, idx))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
