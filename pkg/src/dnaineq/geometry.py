"""Planar primitives, polygon curvature/perimeter and the cell functional.

All tolerances are relative to the cell's bounding-box diagonal: a predicate
evaluated against a polygon uses ``TAU_GEOM * poly.scale`` as its distance
tolerance, which is the same as normalizing the diagonal to 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np

TAU_GEOM = 1e-9


class InvalidPolygonError(ValueError):
    pass


class DegenerateGeometryError(InvalidPolygonError):
    """Input whose classification depends on a sub-tolerance perturbation."""


class Point(NamedTuple):
    x: float
    y: float


def as_point(p) -> Point:
    x, y = float(p[0]), float(p[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"non-finite coordinates: {p!r}")
    return Point(x, y)


def cross(o, a, b) -> float:
    """Twice the signed area of triangle o, a, b (positive for a left turn)."""
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def dist(a, b) -> float:
    return math.hypot(b[0] - a[0], b[1] - a[1])


def signed_area(points: Sequence) -> float:
    n = len(points)
    s = 0.0
    for i in range(n):
        x0, y0 = points[i]
        x1, y1 = points[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return 0.5 * s


def _segments_cross(a, b, c, d, tol: float) -> bool:
    """True if closed segments ab and cd meet (within ``tol``)."""
    if _point_segment_distance(c, a, b) <= tol or _point_segment_distance(d, a, b) <= tol:
        return True
    if _point_segment_distance(a, c, d) <= tol or _point_segment_distance(b, c, d) <= tol:
        return True
    d1 = cross(a, b, c)
    d2 = cross(a, b, d)
    d3 = cross(c, d, a)
    d4 = cross(c, d, b)
    return d1 * d2 < 0 and d3 * d4 < 0


def _point_segment_distance(p, a, b) -> float:
    ax, ay = a
    dx, dy = b[0] - ax, b[1] - ay
    ll = dx * dx + dy * dy
    if ll == 0.0:
        return dist(p, a)
    t = ((p[0] - ax) * dx + (p[1] - ay) * dy) / ll
    t = min(1.0, max(0.0, t))
    return math.hypot(p[0] - (ax + t * dx), p[1] - (ay + t * dy))


@dataclass(frozen=True)
class Polygon:
    """Simple polygon with counterclockwise vertices (the cell)."""

    vertices: tuple[Point, ...]

    def __post_init__(self):
        verts = tuple(as_point(v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        n = len(verts)
        if n < 3:
            raise InvalidPolygonError("a polygon needs at least 3 vertices")
        tol = self.tol
        for i in range(n):
            for j in range(i + 1, n):
                if dist(verts[i], verts[j]) <= tol:
                    raise DegenerateGeometryError(f"vertices {i} and {j} coincide")
        for i in range(n):
            a, b, c = verts[i - 1], verts[i], verts[(i + 1) % n]
            sin_turn = abs(cross(a, b, c)) / (dist(a, b) * dist(b, c))
            if sin_turn <= TAU_GEOM:
                # exact reversals (spikes) are self-overlaps, straight runs are redundant vertices
                raise DegenerateGeometryError(f"vertex {i} is collinear with its neighbours")
        for i in range(n):
            a, b = verts[i], verts[(i + 1) % n]
            for j in range(i + 2, n):
                if i == 0 and j == n - 1:
                    continue
                c, d = verts[j], verts[(j + 1) % n]
                if _segments_cross(a, b, c, d, tol):
                    raise InvalidPolygonError(f"edges {i} and {j} intersect; polygon is not simple")
        if signed_area(verts) <= 0:
            raise InvalidPolygonError("vertices must be counterclockwise")

    @classmethod
    def from_points(cls, points: Iterable) -> "Polygon":
        """Build a polygon, reorienting clockwise input to counterclockwise."""
        pts = [as_point(p) for p in points]
        if len(pts) >= 2 and pts[0] == pts[-1]:
            pts = pts[:-1]
        if signed_area(pts) < 0:
            pts.reverse()
        return cls(tuple(pts))

    def __len__(self) -> int:
        return len(self.vertices)

    @cached_property
    def array(self) -> np.ndarray:
        arr = np.array(self.vertices, dtype=float)
        arr.flags.writeable = False
        return arr

    @cached_property
    def scale(self) -> float:
        lo = self.array.min(axis=0)
        hi = self.array.max(axis=0)
        return float(np.hypot(*(hi - lo)))

    @property
    def tol(self) -> float:
        return TAU_GEOM * self.scale

    def edge(self, i: int) -> tuple[Point, Point]:
        n = len(self.vertices)
        return self.vertices[i % n], self.vertices[(i + 1) % n]

    @property
    def perimeter(self) -> float:
        return sum(dist(*self.edge(i)) for i in range(len(self)))

    @property
    def area(self) -> float:
        return signed_area(self.vertices)

    def interior_angle(self, i: int) -> float:
        """Interior angle at vertex ``i`` in (0, 2π)."""
        n = len(self)
        a, b, c = self.vertices[i - 1], self.vertices[i % n], self.vertices[(i + 1) % n]
        turn = math.atan2(cross(a, b, c), (b[0] - a[0]) * (c[0] - b[0]) + (b[1] - a[1]) * (c[1] - b[1]))
        return math.pi - turn

    @cached_property
    def convex(self) -> bool:
        n = len(self)
        return all(
            cross(self.vertices[i - 1], self.vertices[i], self.vertices[(i + 1) % n]) > 0
            for i in range(n)
        )

    def boundary(self) -> "ClosedCurve":
        return ClosedCurve(self.vertices)


@dataclass(frozen=True)
class ClosedCurve:
    """Closed polygonal curve; the last vertex connects back to the first.

    Self-intersections and repeated (non-consecutive) vertices are allowed.
    """

    vertices: tuple[Point, ...]

    def __post_init__(self):
        verts = tuple(as_point(v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if len(verts) < 2:
            raise ValueError("a closed curve needs at least 2 vertices")
        for i in range(len(verts)):
            if verts[i] == verts[(i + 1) % len(verts)]:
                raise ValueError(f"consecutive vertices {i} and {i + 1} coincide")

    @classmethod
    def from_points(cls, points: Iterable, tol: float = 0.0) -> "ClosedCurve":
        """Build a curve, dropping consecutive duplicates (cyclically)."""
        out: list[Point] = []
        for p in map(as_point, points):
            if not out or dist(out[-1], p) > tol:
                out.append(p)
        while len(out) > 1 and dist(out[0], out[-1]) <= tol:
            out.pop()
        return cls(tuple(out))

    def __len__(self) -> int:
        return len(self.vertices)

    def reversed(self) -> "ClosedCurve":
        return ClosedCurve(self.vertices[::-1])


@dataclass(frozen=True)
class CellContext:
    cell: Polygon
    alpha: float
    perimeter: float
    curvature: float

    @classmethod
    def of(cls, cell: Polygon) -> "CellContext":
        perim = cell.perimeter
        curv = _closed_turning(cell.vertices)
        # absolute turning: 2π for convex cells, more for any reflex vertex
        return cls(cell, perim / curv, perim, curv)


@dataclass(frozen=True)
class CurveMetrics:
    perimeter: float
    curvature: float
    f_value: float


def exterior_angle(a, b, c) -> float:
    """Turning angle at ``b`` along a -> b -> c, in [0, π].

    0 for straight-through collinear points and π for an exact reversal.
    """
    ux, uy = b[0] - a[0], b[1] - a[1]
    vx, vy = c[0] - b[0], c[1] - b[1]
    if (ux == 0 and uy == 0) or (vx == 0 and vy == 0):
        raise ValueError("exterior angle undefined for coincident points")
    return math.atan2(abs(ux * vy - uy * vx), ux * vx + uy * vy)


def _closed_turning(verts: Sequence) -> float:
    n = len(verts)
    return sum(exterior_angle(verts[i - 1], verts[i], verts[(i + 1) % n]) for i in range(n))


def curve_metrics(ctx: CellContext, curve: ClosedCurve) -> CurveMetrics:
    verts = curve.vertices
    n = len(verts)
    perim = sum(dist(verts[i], verts[(i + 1) % n]) for i in range(n))
    curv = _closed_turning(verts)
    return CurveMetrics(perim, curv, ctx.alpha * curv - perim)


def f_value(ctx: CellContext, curve: ClosedCurve) -> float:
    return curve_metrics(ctx, curve).f_value


def closed_metrics_batch(curves: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Perimeter, turning and minimal edge length of closed curves of shape (m, L, 2)."""
    edges = np.roll(curves, -1, axis=-2) - curves
    lengths = np.hypot(edges[..., 0], edges[..., 1])
    prev = np.roll(edges, 1, axis=-2)
    crs = prev[..., 0] * edges[..., 1] - prev[..., 1] * edges[..., 0]
    dot = prev[..., 0] * edges[..., 0] + prev[..., 1] * edges[..., 1]
    turning = np.arctan2(np.abs(crs), dot).sum(axis=-1)
    return lengths.sum(axis=-1), turning, lengths.min(axis=-1)


def convex_hull(points) -> Polygon:
    """Counterclockwise hull without collinear hull vertices (monotone chain).

    The chain uses the exact sign of the cross product; hull vertices whose turn
    is below the collinearity tolerance are then dropped one at a time.
    """
    pts = sorted({as_point(p) for p in points})
    if len(pts) < 3:
        raise ValueError("convex hull needs at least 3 distinct points")

    def half(seq):
        out: list[Point] = []
        for p in seq:
            while len(out) > 1 and cross(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    hull = half(pts)[:-1] + half(reversed(pts))[:-1]
    while len(hull) >= 3:
        m = len(hull)
        sines = [
            cross(hull[i - 1], hull[i], hull[(i + 1) % m])
            / (dist(hull[i - 1], hull[i]) * dist(hull[i], hull[(i + 1) % m]))
            for i in range(m)
        ]
        i = min(range(m), key=lambda k: sines[k])
        if sines[i] > TAU_GEOM:
            break
        hull.pop(i)
    if len(hull) < 3:
        raise ValueError("all points are collinear")
    return Polygon(tuple(hull))


# --- point / segment / line predicates against a polygon -------------------

def points_in_polygon(pts: np.ndarray, poly: Polygon) -> np.ndarray:
    """Closed-region membership for an (m, 2) array: inside or on the boundary."""
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    v = poly.array
    a = v
    b = np.roll(v, -1, axis=0)
    px = pts[:, 0:1]
    py = pts[:, 1:2]
    ax, ay, bx, by = a[:, 0], a[:, 1], b[:, 0], b[:, 1]
    dx, dy = bx - ax, by - ay
    ll = dx * dx + dy * dy
    t = np.clip(((px - ax) * dx + (py - ay) * dy) / ll, 0.0, 1.0)
    d = np.hypot(px - (ax + t * dx), py - (ay + t * dy))
    on_boundary = (d <= poly.tol).any(axis=1)
    straddle = (ay > py) != (by > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = ax + (py - ay) * dx / dy
    crossings = (straddle & (px < xint)).sum(axis=1)
    return on_boundary | (crossings % 2 == 1)


def point_location(p, poly: Polygon) -> str:
    """'boundary', 'inside' or 'outside'."""
    for i in range(len(poly)):
        if _point_segment_distance(p, *poly.edge(i)) <= poly.tol:
            return "boundary"
    return "inside" if bool(points_in_polygon(np.array([p]), poly)[0]) else "outside"


def _touch_params(P: np.ndarray, Q: np.ndarray, poly: Polygon) -> np.ndarray:
    """Parameters s in [0, 1] at which segments P+s(Q-P) meet the boundary.

    Returns an (m, 2n + 2) array padded with NaN; 0 and 1 are always present.
    """
    v = poly.array
    a = v[None, :, :]
    b = np.roll(v, -1, axis=0)[None, :, :]
    p = P[:, None, :]
    d = (Q - P)[:, None, :]
    e = b - a
    tol = poly.tol
    dd = (d**2).sum(-1)
    dlen = np.sqrt(dd)
    elen = np.hypot(e[..., 0], e[..., 1])
    denom = d[..., 0] * e[..., 1] - d[..., 1] * e[..., 0]
    ap = a - p
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (ap[..., 0] * e[..., 1] - ap[..., 1] * e[..., 0]) / denom
        t = (ap[..., 0] * d[..., 1] - ap[..., 1] * d[..., 0]) / denom
        transversal = np.abs(denom) > TAU_GEOM * dlen * elen
        ok = (
            transversal
            & (s >= -tol / dlen) & (s <= 1 + tol / dlen)
            & (t >= -tol / elen) & (t <= 1 + tol / elen)
        )
        s_cross = np.where(ok, np.clip(s, 0.0, 1.0), np.nan)
        # polygon vertices lying on the segment (touches and collinear overlaps)
        s_vert = (ap[..., 0] * d[..., 0] + ap[..., 1] * d[..., 1]) / dd
        foot = p + np.clip(s_vert, 0, 1)[..., None] * d
        near = np.hypot(*(a - foot).transpose(2, 0, 1)) <= tol
        s_vert = np.where(near, np.clip(s_vert, 0.0, 1.0), np.nan)
    m = P.shape[0]
    ends = np.tile(np.array([0.0, 1.0]), (m, 1))
    return np.concatenate([ends, s_cross, s_vert], axis=1)


def segments_within(P, Q, poly: Polygon) -> np.ndarray:
    """Vectorized closed-region containment for segments P[k]Q[k]."""
    P = np.asarray(P, dtype=float).reshape(-1, 2)
    Q = np.asarray(Q, dtype=float).reshape(-1, 2)
    m = P.shape[0]
    if m == 0:
        return np.zeros(0, dtype=bool)
    if poly.convex:
        return points_in_polygon(P, poly) & points_in_polygon(Q, poly)
    s = np.sort(_touch_params(P, Q, poly), axis=1)
    mid = 0.5 * (s[:, :-1] + s[:, 1:])
    valid = ~np.isnan(mid) & ((s[:, 1:] - s[:, :-1]) > 0)
    mid = np.where(valid, mid, 0.0)
    probe = P[:, None, :] + mid[..., None] * (Q - P)[:, None, :]
    inside = points_in_polygon(probe.reshape(-1, 2), poly).reshape(mid.shape)
    ends_in = points_in_polygon(P, poly) & points_in_polygon(Q, poly)
    return ends_in & (inside | ~valid).all(axis=1)


def segment_within(p, q, poly: Polygon) -> bool:
    """True iff every point of segment pq lies in the closed region of ``poly``."""
    return bool(segments_within(np.array([p]), np.array([q]), poly)[0])


def line_boundary_intersections(p, q, poly: Polygon) -> int:
    """Number of connected components of (line pq) ∩ boundary(poly)."""
    if p == q or dist(p, q) == 0:
        raise ValueError("line needs two distinct points")
    L = dist(p, q)
    ux, uy = (q[0] - p[0]) / L, (q[1] - p[1]) / L
    tol = poly.tol

    def along(pt):
        return (pt[0] - p[0]) * ux + (pt[1] - p[1]) * uy

    def off(pt):
        return (pt[0] - p[0]) * uy - (pt[1] - p[1]) * ux

    intervals: list[tuple[float, float]] = []
    for i in range(len(poly)):
        a, b = poly.edge(i)
        da, db = off(a), off(b)
        a_on, b_on = abs(da) <= tol, abs(db) <= tol
        if a_on and b_on:
            sa, sb = along(a), along(b)
            intervals.append((min(sa, sb), max(sa, sb)))
            continue
        if a_on:
            intervals.append((along(a),) * 2)
        if b_on:
            intervals.append((along(b),) * 2)
        if not a_on and not b_on and da * db < 0:
            t = da / (da - db)
            x = a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])
            intervals.append((along(x),) * 2)
    intervals.sort()
    count = 0
    end = -math.inf
    for lo, hi in intervals:
        if lo > end + tol:
            count += 1
            end = hi
        else:
            end = max(end, hi)
    return count
