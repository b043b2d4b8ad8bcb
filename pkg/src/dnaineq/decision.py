"""Polynomial decision procedure for the DNA inequality on separable cells.

Open paths are scored with the cell functional restricted to paths: alpha times
the turning at internal vertices minus the total length. Tables indexed by pairs
of directed visible edges hold the best score of a path with a bounded number of
vertices; they combine in the (min, +) semiring and are powered by
double-and-add up to the vertex bound for closed curves on critical points.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .analysis import CriticalSet, critical_points, interior_vertices, is_separable
from .geometry import (
    CellContext,
    ClosedCurve,
    DegenerateGeometryError,
    Point,
    Polygon,
    closed_metrics_batch,
    curve_metrics,
    f_value,
    segments_within,
)

TAU_DECIDE = 1e-7
SCAN_SAMPLES = 1024
BISECT_TOL = 1e-10
# rows of the (e1, e, e2) cube materialized at once by combine_tables
_CHUNK_ELEMS = 4_000_000


@dataclass(frozen=True)
class EdgeSet:
    """Directed visible pairs of critical points, as index pairs into ``points``."""

    points: tuple[Point, ...]
    tails: np.ndarray
    heads: np.ndarray
    lengths: np.ndarray

    def __len__(self) -> int:
        return len(self.tails)

    def pairs(self) -> list[tuple[int, int]]:
        return list(zip(self.tails.tolist(), self.heads.tolist()))

    def index(self) -> dict[tuple[int, int], int]:
        return {e: k for k, e in enumerate(self.pairs())}


@dataclass
class CostTable:
    """Best path scores between directed edges with at most k + 2 vertices.

    ``argmin``/``children`` are filled only when the table was built with
    recording on, and allow path reconstruction.
    """

    k: int
    values: np.ndarray
    argmin: Optional[np.ndarray] = None
    children: Optional[tuple["CostTable", "CostTable"]] = None


@dataclass
class DecisionReport:
    status: str  # satisfies | fails | inapplicable | degenerate
    min_f: float = math.nan
    witness: Optional[ClosedCurve] = None
    # shortest negative sub-walk of the witness
    simple_witness: Optional[ClosedCurve] = None
    alpha: float = math.nan
    n_vertices: int = 0
    n_critical: int = 0
    n_edges: int = 0
    K: int = 0
    dp_min: float = math.nan
    scan_min: float = math.nan
    notes: list[str] = field(default_factory=list)
    timing: dict[str, float] = field(default_factory=dict)


def build_edge_set(poly: Polygon, C: CriticalSet) -> EdgeSet:
    pts = tuple(C.locations())
    m = len(pts)
    ii, jj = np.where(~np.eye(m, dtype=bool))
    arr = np.array(pts)
    P, Q = arr[ii], arr[jj]
    lengths = np.hypot(*(Q - P).T)
    keep = (lengths > poly.tol) & segments_within(P, Q, poly)
    return EdgeSet(pts, ii[keep], jj[keep], lengths[keep])


def _exterior_angles(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    u = b - a
    v = c - b
    crs = u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]
    dot = u[:, 0] * v[:, 0] + u[:, 1] * v[:, 1]
    return np.arctan2(np.abs(crs), dot)


def base_table(S: EdgeSet, ctx: CellContext) -> CostTable:
    """Scores of the 2-vertex path (e1 == e2) and 3-vertex paths (e1 then e2)."""
    if len(S) == 0:
        raise ValueError("edge set is empty")
    m = len(S)
    vals = np.full((m, m), np.inf)
    vals[np.arange(m), np.arange(m)] = -S.lengths
    e1, e2 = np.nonzero(S.heads[:, None] == S.tails[None, :])
    pts = np.array(S.points)
    turn = _exterior_angles(pts[S.tails[e1]], pts[S.heads[e1]], pts[S.heads[e2]])
    vals[e1, e2] = -S.lengths[e1] - S.lengths[e2] + ctx.alpha * turn
    return CostTable(1, vals)


def combine_tables(T1: CostTable, T2: CostTable, S: EdgeSet, record: bool = False) -> CostTable:
    """T(e1, e2) = min over shared middle edges e of T1(e1, e) + T2(e, e2) + |e|.

    The middle edge is counted by both halves, so its (negative) single-edge
    score -|e| is removed once.
    """
    m = len(S)
    right = T2.values + S.lengths[:, None]
    out = np.empty((m, m))
    arg = np.empty((m, m), dtype=np.int32) if record else None
    rows = max(1, _CHUNK_ELEMS // max(1, m * m))
    for r0 in range(0, m, rows):
        cube = T1.values[r0:r0 + rows, :, None] + right[None, :, :]
        if record:
            idx = cube.argmin(axis=1)
            arg[r0:r0 + rows] = idx
            out[r0:r0 + rows] = np.take_along_axis(cube, idx[:, None, :], axis=1)[:, 0, :]
        else:
            out[r0:r0 + rows] = cube.min(axis=1)
    return CostTable(
        T1.k + T2.k, out, arg, (T1, T2) if record else None
    )


def power_table(S: EdgeSet, ctx: CellContext, K: int, record: bool = False,
                base: Optional[CostTable] = None) -> CostTable:
    """Table for budget K by double-and-add over the base table."""
    if K < 1:
        raise ValueError("K must be positive")
    base = base if base is not None else base_table(S, ctx)
    T = base
    for bit in bin(K)[3:]:
        T = combine_tables(T, T, S, record)
        if bit == "1":
            T = combine_tables(T, base, S, record)
    return T


def sequential_table(S: EdgeSet, ctx: CellContext, K: int) -> CostTable:
    """K - 1 successive combines with the base table (reference for powering)."""
    base = base_table(S, ctx)
    T = base
    for _ in range(K - 1):
        T = combine_tables(T, base, S)
    return T


def expand_path(T: CostTable, S: EdgeSet, e1: int, e2: int) -> list[int]:
    """Point indices of an optimal path from edge e1 to edge e2 in a recorded table."""
    if T.children is None:
        a, b = int(S.tails[e1]), int(S.heads[e1])
        if e1 == e2:
            return [a, b]
        return [a, b, int(S.heads[e2])]
    e = int(T.argmin[e1, e2])
    left = expand_path(T.children[0], S, e1, e)
    right = expand_path(T.children[1], S, e, e2)
    return left + right[2:]


def _closing_pairs(S: EdgeSet):
    """Pairs (e1, e2) = ((v2, v1), (v3, v2)) that close a walk at v2."""
    e1, e2 = np.nonzero(S.tails[:, None] == S.heads[None, :])
    pts = np.array(S.points)
    turn = _exterior_angles(pts[S.tails[e2]], pts[S.tails[e1]], pts[S.heads[e1]])
    return e1, e2, turn


def min_closed_value(T: CostTable, S: EdgeSet, ctx: CellContext,
                     witness: bool = True) -> tuple[float, Optional[ClosedCurve]]:
    """Minimum of f over closed walks on critical points within the table budget."""
    e1, e2, turn = _closing_pairs(S)
    if len(e1) == 0:
        return math.inf, None
    vals = T.values[e1, e2] + ctx.alpha * turn
    k = int(np.argmin(vals))
    best = float(vals[k])
    if not witness or not math.isfinite(best):
        return best, None
    if T.children is None and T.k > 1:
        raise ValueError("table was built without argmin recording")
    path = expand_path(T, S, int(e1[k]), int(e2[k]))
    return best, ClosedCurve(tuple(S.points[i] for i in path[:-1]))


def split_at_repeat(curve: ClosedCurve) -> Optional[tuple[ClosedCurve, ClosedCurve]]:
    """Split a closed walk at a repeated directed edge into two closed walks.

    If the edge γ_i γ_{i+1} occurs again as γ_j γ_{j+1}, the pieces
    γ_0 … γ_i γ_{j+1} … and γ_{i+1} … γ_j keep every turning angle and every
    edge, so their f values add up to that of the whole walk.
    """
    v = curve.vertices
    n = len(v)
    seen: dict[tuple, int] = {}
    for j in range(n):
        e = (v[j], v[(j + 1) % n])
        if e in seen:
            i = seen[e]
            outer = v[: i + 1] + v[j + 1:]
            inner = v[i + 1: j + 1]
            if len(outer) >= 2 and len(inner) >= 2:
                return ClosedCurve(outer), ClosedCurve(inner)
        else:
            seen[e] = j
    return None


def simplify_witness(ctx: CellContext, curve: ClosedCurve) -> ClosedCurve:
    """Shrink a negative walk by splitting at repeated directed edges.

    Keeps the piece with the smaller f, which is negative whenever the whole
    walk is, until no directed edge repeats.
    """
    while True:
        parts = split_at_repeat(curve)
        if parts is None:
            return curve
        curve = min(parts, key=lambda c: f_value(ctx, c))


# --- special-form curves ---------------------------------------------------

def _kept_arc(poly: Polygon, i: int, j: int) -> np.ndarray:
    """Boundary vertices from j forward to i (a full loop when i == j)."""
    n = len(poly)
    count = (i - j) % n + 1 if i != j else n + 1
    idx = [(j + s) % n for s in range(count)]
    return poly.array[idx]


def _edge_points(poly: Polygon, h: int, t: np.ndarray) -> np.ndarray:
    a, b = (np.array(p) for p in poly.edge(h))
    return a[None, :] + t[:, None] * (b - a)[None, :]


class _Family:
    """One-parameter family of closed curves: fixed arc followed by moving points."""

    def __init__(self, ctx: CellContext, arc: np.ndarray, host: int,
                 pivot: Optional[np.ndarray] = None, y_edge: Optional[int] = None):
        self.ctx = ctx
        self.poly = ctx.cell
        self.arc = arc
        self.host = host
        self.pivot = pivot
        self.y_edge = y_edge

    def points(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Moving vertices for parameters t and a validity mask."""
        X = _edge_points(self.poly, self.host, t)
        if self.pivot is None:
            return X[:, None, :], np.ones(len(t), dtype=bool)
        a, b = (np.array(p) for p in self.poly.edge(self.y_edge))
        e = b - a
        d = self.pivot[None, :] - X
        den = d[:, 0] * e[1] - d[:, 1] * e[0]
        ax = a[None, :] - X
        ok = np.abs(den) > 1e-15 * np.hypot(*d.T) * np.hypot(*e)
        with np.errstate(divide="ignore", invalid="ignore"):
            lam = (ax[:, 0] * e[1] - ax[:, 1] * e[0]) / den
            u = (ax[:, 0] * d[:, 1] - ax[:, 1] * d[:, 0]) / den
        tol = self.poly.tol
        ok &= (lam > 1 + tol) & (u >= 0) & (u <= 1)
        ok &= np.hypot(*d.T) > tol
        Y = X + np.where(ok, lam, 1.0)[:, None] * d
        return np.stack([X, Y], axis=1), ok

    def evaluate(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        moving, ok = self.points(t)
        m = len(t)
        curves = np.concatenate([np.broadcast_to(self.arc, (m,) + self.arc.shape), moving], axis=1)
        perim, turn, min_edge = closed_metrics_batch(curves)
        f = self.ctx.alpha * turn - perim
        ok &= min_edge > self.poly.tol
        out = np.full(m, np.inf)
        idx = np.flatnonzero(ok)
        if idx.size == 0:
            return out, curves
        # only the edges touching moving vertices can leave the cell
        k0 = self.arc.shape[0] - 1
        sub = curves[idx]
        P = sub[:, k0:, :].reshape(-1, 2)
        Q = np.roll(sub, -1, axis=1)[:, k0:, :].reshape(-1, 2)
        inside = segments_within(P, Q, self.poly).reshape(idx.size, -1).all(axis=1)
        out[idx[inside]] = f[idx[inside]]
        return out, curves

    def curve_at(self, t: float) -> Optional[ClosedCurve]:
        moving, ok = self.points(np.array([t]))
        if not ok[0]:
            return None
        pts = list(map(tuple, self.arc)) + list(map(tuple, moving[0]))
        try:
            curve = ClosedCurve.from_points(pts, tol=self.poly.tol)
        except ValueError:
            return None
        P = np.array(curve.vertices)
        if not segments_within(P, np.roll(P, -1, axis=0), self.poly).all():
            return None
        return curve


def _scan_family(fam: _Family, samples: int, incumbent: float,
                 margin: float) -> tuple[float, Optional[ClosedCurve]]:
    best, best_curve = math.inf, None

    def consider(c: Optional[ClosedCurve]):
        nonlocal best, best_curve
        if c is None or len(c) < 2:
            return
        val = curve_metrics(fam.ctx, c).f_value
        if val < best:
            best, best_curve = val, c

    for t_end in (0.0, 1.0):
        consider(fam.curve_at(t_end))
    ts = np.linspace(0.0, 1.0, samples + 2)[1:-1]
    f, _ = fam.evaluate(ts)
    finite = np.isfinite(f)
    if not finite.any():
        return best, best_curve
    k_min = int(np.argmin(f))
    consider(fam.curve_at(float(ts[k_min])))
    threshold = min(incumbent, best) + margin
    flat = 1e-12 * fam.poly.scale
    for k in range(1, samples - 1):
        if not (finite[k - 1] and finite[k + 1]) or f[k] > threshold:
            continue
        # plateaus (e.g. X sliding along a boundary edge) need no refinement
        if f[k - 1] - f[k] <= flat or f[k + 1] - f[k] <= flat:
            continue
        lo, hi = float(ts[k - 1]), float(ts[k + 1])
        ok = True
        while hi - lo > BISECT_TOL:
            mid = 0.5 * (lo + hi)
            off = 1e-3 * (hi - lo)
            pair, _ = fam.evaluate(np.array([mid - off, mid + off]))
            if not np.isfinite(pair).all():
                ok = False
                break
            if pair[1] < pair[0]:
                lo = mid
            else:
                hi = mid
        if ok:
            consider(fam.curve_at(0.5 * (lo + hi)))
    return best, best_curve


def special_form_scan(poly: Polygon, ctx: CellContext, samples: int = SCAN_SAMPLES,
                      incumbent: float = math.inf) -> tuple[float, Optional[ClosedCurve]]:
    """Minimize f over the boundary-with-detour families.

    Form 1: Γ_j … Γ_i, X with X on any edge. Form 2: Γ_j … Γ_i, X, Y where line XY
    passes through an interior vertex and Y lies on an edge incident to Γ_j.
    """
    sep = is_separable(poly)
    if not sep:
        raise ValueError("special-form scan needs a separable cell")
    n = len(poly)
    margin = 1e-3 * poly.scale
    best, best_curve = math.inf, None
    interior = interior_vertices(poly)
    for i in range(n):
        for j in range(n):
            arc = _kept_arc(poly, i, j)
            families = [_Family(ctx, arc, h) for h in range(n)]
            if i != j:
                for v in interior:
                    for y_edge in ((j - 1) % n, j):
                        families += [
                            _Family(ctx, arc, h, pivot=poly.array[v], y_edge=y_edge)
                            for h in range(n)
                        ]
            for fam in families:
                val, curve = _scan_family(fam, samples, min(best, incumbent), margin)
                if val < best:
                    best, best_curve = val, curve
    return best, best_curve


# --- verdict ---------------------------------------------------------------

def decide(poly: Polygon, tau: float = TAU_DECIDE, samples: int = SCAN_SAMPLES,
           exhaustive: bool = False) -> DecisionReport:
    """Decide whether the cell satisfies the DNA inequality.

    When the walk search already finds a negative closed walk the verdict is
    settled, so the special-form scan is skipped unless ``exhaustive`` is set.
    """
    timing: dict[str, float] = {}
    t0 = time.perf_counter()
    report = DecisionReport("satisfies", n_vertices=len(poly))
    try:
        ctx = CellContext.of(poly)
        report.alpha = ctx.alpha
        sep = is_separable(poly)
        timing["separable"] = time.perf_counter() - t0
        if not sep:
            report.status = "inapplicable"
            report.notes.append(
                f"not separable: point {tuple(sep.witness)} sees interior vertices "
                f"{sep.vertices[0]} and {sep.vertices[1]} along lines meeting the boundary "
                "more than twice"
            )
            return report
        t = time.perf_counter()
        C = critical_points(poly)
        S = build_edge_set(poly, C)
        report.notes.extend(C.notes)
        report.n_critical, report.n_edges = len(C), len(S)
        report.K = K = len(C) ** 2 - len(C) - 1
        timing["critical"] = time.perf_counter() - t
        t = time.perf_counter()
        base = base_table(S, ctx)
        T = power_table(S, ctx, K, base=base)
        dp_min, _ = min_closed_value(T, S, ctx, witness=False)
        dp_witness = None
        if dp_min < -tau * poly.scale:
            # second pass with argmin recording for traceback
            T = power_table(S, ctx, K, record=True, base=base)
            dp_min, dp_witness = min_closed_value(T, S, ctx)
        report.dp_min = dp_min
        timing["dp"] = time.perf_counter() - t
        scan_min, scan_witness = math.inf, None
        if exhaustive or dp_witness is None:
            t = time.perf_counter()
            scan_min, scan_witness = special_form_scan(poly, ctx, samples, incumbent=dp_min)
            report.scan_min = scan_min
            timing["scan"] = time.perf_counter() - t
        else:
            report.notes.append("special-form scan skipped: walk search already found a negative curve")
    except DegenerateGeometryError as exc:
        report.status = "degenerate"
        report.notes.append(str(exc))
        return report
    finally:
        timing["total"] = time.perf_counter() - t0
        report.timing = timing

    if scan_min < dp_min:
        min_f, witness = scan_min, scan_witness
    else:
        min_f, witness = dp_min, dp_witness
    if min_f < -tau * poly.scale:
        report.status = "fails"
        report.witness = witness
        report.min_f = curve_metrics(ctx, witness).f_value
        report.simple_witness = simplify_witness(ctx, witness)
    else:
        report.min_f = min_f
    return report
