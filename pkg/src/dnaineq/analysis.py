"""Interior vertices, separability, critical points and the vertex-move step."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .geometry import (
    TAU_GEOM,
    CellContext,
    ClosedCurve,
    Point,
    Polygon,
    _point_segment_distance,
    convex_hull,
    dist,
    f_value,
    line_boundary_intersections,
    point_location,
    segment_within,
    segments_within,
)

# angular cells narrower than this are merged with a neighbour
MIN_WEDGE = 1e-12


def interior_vertices(poly: Polygon) -> list[int]:
    """Indices of vertices strictly inside the convex hull of ``poly``."""
    hull = convex_hull(poly.vertices)
    return [i for i, v in enumerate(poly.vertices) if point_location(v, hull) == "inside"]


# --- separability ----------------------------------------------------------

@dataclass(frozen=True)
class SeparabilityResult:
    separable: bool
    interior: tuple[int, ...]
    witness: Optional[Point] = None
    vertices: Optional[tuple[int, int]] = None

    def __bool__(self) -> bool:
        return self.separable


def _direction(theta: float) -> tuple[float, float]:
    return math.cos(theta), math.sin(theta)


def bad_wedges(poly: Polygon, vi: int) -> list[tuple[float, float]]:
    """Direction intervals (a, b) of lines through vertex ``vi`` that meet the
    boundary in more than two components.

    Directions are taken mod π with 0 <= a < π; the last interval may run past π.
    """
    v = poly.vertices[vi]
    angles = sorted(
        math.atan2(u[1] - v[1], u[0] - v[0]) % math.pi
        for j, u in enumerate(poly.vertices)
        if j != vi
    )
    crit: list[float] = []
    for a in angles:
        if not crit or a - crit[-1] > MIN_WEDGE:
            crit.append(a)
    if len(crit) > 1 and crit[0] + math.pi - crit[-1] <= MIN_WEDGE:
        crit.pop()
    bounds = crit + [crit[0] + math.pi]
    bad = []
    for a, b in zip(bounds, bounds[1:]):
        dx, dy = _direction(0.5 * (a + b))
        if line_boundary_intersections(v, (v[0] + dx, v[1] + dy), poly) > 2:
            bad.append((a, b))
    return bad


def _wedge_polygon(apex, a: float, b: float, reach: float) -> list[tuple[float, float]]:
    """Convex polygon covering the wedge apex + r·dir(θ), θ ∈ [a, b], out to ``reach``."""
    width = b - a
    r = reach / math.cos(width / 4)
    pts = [tuple(apex)]
    for th in (a, 0.5 * (a + b), b):
        dx, dy = _direction(th)
        pts.append((apex[0] + r * dx, apex[1] + r * dy))
    return pts


def clip_polygon(subject, window) -> list[tuple[float, float]]:
    """Sutherland-Hodgman clip of ``subject`` against a convex ccw ``window``."""
    out = list(subject)
    m = len(window)
    for i in range(m):
        if not out:
            break
        a, b = window[i], window[(i + 1) % m]

        def side(p):
            return (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])

        src, out = out, []
        for j in range(len(src)):
            p, q = src[j - 1], src[j]
            sp, sq = side(p), side(q)
            if sq >= 0:
                if sp < 0:
                    out.append(_lerp(p, q, sp / (sp - sq)))
                out.append(q)
            elif sp >= 0:
                out.append(_lerp(p, q, sp / (sp - sq)))
    return out


def _lerp(p, q, t):
    return (p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))


def _area(pts) -> float:
    n = len(pts)
    return 0.5 * sum(
        pts[i][0] * pts[(i + 1) % n][1] - pts[(i + 1) % n][0] * pts[i][1] for i in range(n)
    )


def _find_witness(region, poly: Polygon, v, w) -> Optional[Point]:
    """A point of ``region`` strictly inside ``poly`` that sees bad lines to v and w."""
    arr = np.array(region)
    candidates = [arr.mean(axis=0)]
    lo, hi = arr.min(axis=0), arr.max(axis=0)
    grid = np.linspace(0.02, 0.98, 25)
    candidates += [lo + (hi - lo) * np.array([gx, gy]) for gx in grid for gy in grid]
    for c in candidates:
        p = Point(float(c[0]), float(c[1]))
        if point_location(p, poly) != "inside":
            continue
        if not _inside_convex(p, region):
            continue
        if dist(p, v) <= poly.tol or dist(p, w) <= poly.tol:
            continue
        if line_boundary_intersections(p, v, poly) > 2 and line_boundary_intersections(p, w, poly) > 2:
            return p
    return None


def _inside_convex(p, region) -> bool:
    n = len(region)
    return all(
        (region[(i + 1) % n][0] - region[i][0]) * (p[1] - region[i][1])
        - (region[(i + 1) % n][1] - region[i][1]) * (p[0] - region[i][0]) >= 0
        for i in range(n)
    )


def is_separable(poly: Polygon) -> SeparabilityResult:
    """Decide separability by intersecting the bad double wedges of every pair
    of interior vertices inside the cell."""
    interior = tuple(interior_vertices(poly))
    if len(interior) < 2:
        return SeparabilityResult(True, interior)
    reach = 3.0 * poly.scale
    min_area = TAU_GEOM * poly.scale**2
    cell = list(poly.vertices)
    wedges = {}
    for vi in interior:
        v = poly.vertices[vi]
        wedges[vi] = [
            _wedge_polygon(v, a + off, b + off, reach)
            for a, b in bad_wedges(poly, vi)
            for off in (0.0, math.pi)
        ]
    for k, vi in enumerate(interior):
        for wi in interior[k + 1:]:
            for wv in wedges[vi]:
                for ww in wedges[wi]:
                    window = clip_polygon(wv, ww)
                    if len(window) < 3 or _area(window) <= min_area:
                        continue
                    region = clip_polygon(cell, window)
                    if len(region) < 3 or _area(region) <= min_area:
                        continue
                    p = _find_witness(window, poly, poly.vertices[vi], poly.vertices[wi])
                    if p is not None:
                        return SeparabilityResult(False, interior, p, (vi, wi))
    return SeparabilityResult(True, interior)


# --- critical points -------------------------------------------------------

@dataclass(frozen=True)
class CriticalPoint:
    location: Point
    kind: str  # "vertex" or "non-vertex"
    witnesses: Optional[tuple[int, int]] = None
    host_edge: Optional[int] = None
    vertex_index: Optional[int] = None


@dataclass(frozen=True)
class CriticalSet:
    points: tuple[CriticalPoint, ...]
    notes: tuple[str, ...] = field(default=())

    def __len__(self) -> int:
        return len(self.points)

    def locations(self) -> list[Point]:
        return [c.location for c in self.points]

    def non_vertex(self) -> list[CriticalPoint]:
        return [c for c in self.points if c.kind == "non-vertex"]


def ray_exit(v, w, poly: Polygon) -> float:
    """Largest s >= 1 such that segment v -> v + s(w - v) stays in the cell.

    Assumes segment vw itself lies within the cell.
    """
    d = (w[0] - v[0], w[1] - v[1])
    dd = d[0] ** 2 + d[1] ** 2
    dl = math.sqrt(dd)
    tol = poly.tol
    params = {1.0}
    for i in range(len(poly)):
        a, b = poly.edge(i)
        e = (b[0] - a[0], b[1] - a[1])
        el = math.hypot(*e)
        ap = (a[0] - v[0], a[1] - v[1])
        den = d[0] * e[1] - d[1] * e[0]
        if abs(den) > TAU_GEOM * dl * el:
            s = (ap[0] * e[1] - ap[1] * e[0]) / den
            t = (ap[0] * d[1] - ap[1] * d[0]) / den
            if s > 1 and -tol / el <= t <= 1 + tol / el:
                params.add(s)
        for u in (a, b):
            s = ((u[0] - v[0]) * d[0] + (u[1] - v[1]) * d[1]) / dd
            foot = (v[0] + s * d[0], v[1] + s * d[1])
            if s > 1 and dist(u, foot) <= tol:
                params.add(s)
    ordered = sorted(params)
    for s0, s1 in zip(ordered, ordered[1:]):
        if (s1 - s0) * dl <= tol:
            continue
        sm = 0.5 * (s0 + s1)
        mid = (v[0] + sm * d[0], v[1] + sm * d[1])
        if point_location(mid, poly) == "outside":
            return s0
    return ordered[-1]


def critical_points(poly: Polygon) -> CriticalSet:
    """All vertices plus the exit points of rays v -> w beyond w that land strictly
    inside an edge not incident to v or w."""
    verts = poly.vertices
    n = len(verts)
    tol = poly.tol
    pts = [CriticalPoint(v, "vertex", vertex_index=i) for i, v in enumerate(verts)]
    notes: list[str] = []
    for vi in range(n):
        for wi in range(n):
            if vi == wi:
                continue
            v, w = verts[vi], verts[wi]
            if not segment_within(v, w, poly):
                continue
            s = ray_exit(v, w, poly)
            if (s - 1.0) * dist(v, w) <= tol:
                continue
            p = Point(v[0] + s * (w[0] - v[0]), v[1] + s * (w[1] - v[1]))
            if any(dist(p, u) <= tol for u in verts):
                continue
            hosts = [i for i in range(n) if _point_segment_distance(p, *poly.edge(i)) <= tol]
            if len(hosts) != 1:
                notes.append(f"exit of ray {vi}->{wi} is not on a unique edge")
                continue
            h = hosts[0]
            if {h, (h + 1) % n} & {vi, wi}:
                notes.append(f"exit of ray {vi}->{wi} lies on edge {h} incident to a witness")
                continue
            if any(dist(p, c.location) <= tol for c in pts):
                continue
            pts.append(CriticalPoint(p, "non-vertex", witnesses=(vi, wi), host_edge=h))
    return CriticalSet(tuple(pts), tuple(notes))


# --- vertex improvement ----------------------------------------------------

def _replace(curve: ClosedCurve, i: int, p) -> list:
    verts = list(curve.vertices)
    verts[i] = p
    return verts


def _curve_inside(verts, poly: Polygon, i: int) -> bool:
    n = len(verts)
    P = np.array([verts[i - 1], verts[i]])
    Q = np.array([verts[i], verts[(i + 1) % n]])
    return bool(segments_within(P, Q, poly).all())


def is_free_to_move(ctx: CellContext, curve: ClosedCurve, i: int, step: Optional[float] = None) -> bool:
    """Whether vertex ``i`` can slide both ways along line γ_{i-1}γ_i while the
    curve stays inside the cell."""
    poly = ctx.cell
    n = len(curve)
    i %= n
    a, b = curve.vertices[i - 1], curve.vertices[i]
    L = dist(a, b)
    h = step if step is not None else 1e-6 * poly.scale
    h = min(h, 0.5 * L)
    ux, uy = (b[0] - a[0]) / L, (b[1] - a[1]) / L
    for sgn in (1.0, -1.0):
        p = (b[0] + sgn * h * ux, b[1] + sgn * h * uy)
        if not _curve_inside(_replace(curve, i, p), poly, i):
            return False
    return True


def improve_vertex(ctx: CellContext, curve: ClosedCurve, i: int, step: Optional[float] = None) -> ClosedCurve:
    """Slide vertex ``i`` along line γ_{i-1}γ_i in whichever direction lowers f.

    The step grows geometrically while f keeps dropping and the curve stays in
    the cell. Returns ``curve`` itself if the vertex is blocked or no move lowers
    f by more than the geometric tolerance.
    """
    poly = ctx.cell
    n = len(curve)
    i %= n
    if n < 3 or not is_free_to_move(ctx, curve, i):
        return curve
    a, b = curve.vertices[i - 1], curve.vertices[i]
    L = dist(a, b)
    ux, uy = (b[0] - a[0]) / L, (b[1] - a[1]) / L
    f0 = f_value(ctx, curve)
    h0 = step if step is not None else 1e-3 * poly.scale
    best, best_f = curve, f0
    for sgn in (1.0, -1.0):
        h = min(h0, 0.5 * L) if sgn < 0 else h0
        while True:
            p = Point(b[0] + sgn * h * ux, b[1] + sgn * h * uy)
            verts = _replace(curve, i, p)
            if sgn < 0 and h >= L:
                break
            if dist(p, verts[(i + 1) % n]) <= poly.tol or not _curve_inside(verts, poly, i):
                break
            cand = ClosedCurve(tuple(verts))
            fc = f_value(ctx, cand)
            if fc >= best_f:
                break
            best, best_f = cand, fc
            h *= 2.0
    if best_f < f0 - poly.tol:
        return best
    return curve
