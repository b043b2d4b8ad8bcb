"""Random closed curves inside a cell, used to audit a 'satisfies' verdict."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .analysis import critical_points
from .geometry import (
    CellContext,
    ClosedCurve,
    Polygon,
    closed_metrics_batch,
    points_in_polygon,
    segments_within,
)

MIN_VERTICES = 3
MAX_VERTICES = 10


@dataclass(frozen=True)
class AuditResult:
    n_curves: int
    min_f: float
    worst: Optional[ClosedCurve]
    seed: int

    def passed(self, tol: float) -> bool:
        return self.min_f >= -tol


def _boundary_samples(poly: Polygon, k: int, rng: np.random.Generator) -> np.ndarray:
    V = poly.array
    E = np.roll(V, -1, axis=0) - V
    lengths = np.hypot(*E.T)
    edge = rng.choice(len(V), size=k, p=lengths / lengths.sum())
    t = rng.random(k)[:, None]
    return V[edge] + t * E[edge]


def _interior_samples(poly: Polygon, k: int, rng: np.random.Generator) -> np.ndarray:
    lo, hi = poly.array.min(axis=0), poly.array.max(axis=0)
    out = []
    got = 0
    while got < k:
        cand = lo + rng.random((2 * k, 2)) * (hi - lo)
        cand = cand[points_in_polygon(cand, poly)]
        out.append(cand)
        got += len(cand)
    return np.concatenate(out)[:k]


def point_pool(poly: Polygon, rng: np.random.Generator, n_boundary: int = 120,
               n_interior: int = 120, fixed: Optional[np.ndarray] = None) -> np.ndarray:
    """Vertices and critical points plus fresh random boundary and interior points."""
    parts = [poly.array if fixed is None else fixed,
             _boundary_samples(poly, n_boundary, rng),
             _interior_samples(poly, n_interior, rng)]
    return np.concatenate(parts)


def visibility(pool: np.ndarray, poly: Polygon) -> np.ndarray:
    m = len(pool)
    ii, jj = np.triu_indices(m, 1)
    ok = segments_within(pool[ii], pool[jj], poly)
    ok &= np.hypot(*(pool[jj] - pool[ii]).T) > poly.tol
    vis = np.zeros((m, m), dtype=bool)
    vis[ii, jj] = ok
    vis[jj, ii] = ok
    return vis


def random_walks(vis: np.ndarray, length: int, count: int,
                 rng: np.random.Generator) -> np.ndarray:
    """Closed walks of ``length`` pool indices along visible pairs.

    The last vertex is drawn among points seen by both its predecessor and the
    start, so every walk closes; walks with no such point are dropped.
    """
    deg = vis.sum(axis=1)
    starts = rng.choice(np.flatnonzero(deg > 0), size=count)
    walks = np.empty((count, length), dtype=np.int64)
    walks[:, 0] = starts
    alive = np.ones(count, dtype=bool)
    for k in range(1, length):
        prev = walks[:, k - 1]
        allowed = vis[prev]
        if k == length - 1:
            allowed = allowed & vis[starts]
        n_allowed = allowed.sum(axis=1)
        alive &= n_allowed > 0
        # pick the r-th allowed neighbour uniformly
        r = np.floor(rng.random(count) * np.maximum(n_allowed, 1)).astype(np.int64)
        cum = np.cumsum(allowed, axis=1)
        walks[:, k] = np.argmax(cum > r[:, None], axis=1)
    return walks[alive]


def audit_curves(poly: Polygon, n_curves: int = 10_000, seed: int = 0,
                 batch: int = 1000) -> AuditResult:
    """Minimum of f over ``n_curves`` seeded random closed curves inside ``poly``."""
    ctx = CellContext.of(poly)
    rng = np.random.default_rng(seed)
    crit = np.array(critical_points(poly).locations(), dtype=float)
    best, worst, done = np.inf, None, 0
    while done < n_curves:
        pool = point_pool(poly, rng, fixed=crit)
        vis = visibility(pool, poly)
        want = min(batch, n_curves - done)
        lengths = rng.integers(MIN_VERTICES, MAX_VERTICES + 1, size=want)
        for L in np.unique(lengths):
            walks = random_walks(vis, int(L), int((lengths == L).sum()), rng)
            if len(walks) == 0:
                continue
            curves = pool[walks]
            perim, turn, _ = closed_metrics_batch(curves)
            f = ctx.alpha * turn - perim
            k = int(np.argmin(f))
            if f[k] < best:
                best = float(f[k])
                worst = ClosedCurve(tuple(map(tuple, curves[k])))
            done += len(walks)
        if done == 0:
            raise ValueError("no closed curve could be drawn in this cell")
    return AuditResult(done, best, worst, seed)
