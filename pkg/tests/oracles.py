"""Slow, independent reference implementations for the walk search.

Plain Python over dicts and tuples, sharing no code with the table machinery
beyond the cell's own containment test.
"""

import itertools
import math
from functools import lru_cache

from dnaineq.geometry import segment_within


def turn(a, b, c):
    ux, uy = b[0] - a[0], b[1] - a[1]
    vx, vy = c[0] - b[0], c[1] - b[1]
    return math.atan2(abs(ux * vy - uy * vx), ux * vx + uy * vy)


def visible_pairs(points, poly):
    return {
        (i, j)
        for i, j in itertools.permutations(range(len(points)), 2)
        if math.dist(points[i], points[j]) > poly.tol and segment_within(points[i], points[j], poly)
    }


def open_path_minima(points, poly, alpha, max_vertices):
    """min over open walks with 2..max_vertices vertices, keyed by (first edge, last edge)."""
    vis = visible_pairs(points, poly)
    nbr = {i: [j for j in range(len(points)) if (i, j) in vis] for i in range(len(points))}
    best = {}

    def rec(path, score):
        e1 = (path[0], path[1])
        e2 = (path[-2], path[-1])
        key = (e1, e2)
        if score < best.get(key, math.inf):
            best[key] = score
        if len(path) == max_vertices:
            return
        for k in nbr[path[-1]]:
            step = alpha * turn(points[path[-2]], points[path[-1]], points[k]) - math.dist(points[path[-1]], points[k])
            rec(path + [k], score + step)

    for i, j in vis:
        rec([i, j], -math.dist(points[i], points[j]))
    return best


def closed_walk_min_bruteforce(points, poly, alpha, max_vertices):
    """Literal enumeration of closed walks (first vertex fixed to the smallest index)."""
    vis = visible_pairs(points, poly)
    n = len(points)
    best = math.inf
    for L in range(2, max_vertices + 1):
        for walk in itertools.product(range(n), repeat=L):
            if any((walk[i], walk[(i + 1) % L]) not in vis for i in range(L)):
                continue
            per = sum(math.dist(points[walk[i]], points[walk[(i + 1) % L]]) for i in range(L))
            cur = sum(turn(points[walk[i - 1]], points[walk[i]], points[walk[(i + 1) % L]]) for i in range(L))
            best = min(best, alpha * cur - per)
    return best


def closed_walk_min_memo(points, poly, alpha, max_vertices):
    """Exhaustive minimum over closed walks with at most ``max_vertices`` vertices.

    Memoized over (first edge, current edge, vertices left); each closed walk is
    scored once per rotation, which does not change the minimum.
    """
    vis = sorted(visible_pairs(points, poly))
    out = {i: [e for e in vis if e[0] == i] for i in range(len(points))}

    def length(e):
        return math.dist(points[e[0]], points[e[1]])

    @lru_cache(maxsize=None)
    def go(first, cur, left):
        # best completion from edge ``cur`` back to ``first``; the completion
        # pays for every edge after ``cur`` and every turn from ``cur`` onward
        a, b = cur
        best = math.inf
        if b == first[0]:
            best = alpha * (turn(points[a], points[b], points[first[1]]))
        if left > 0:
            for e in out[b]:
                step = alpha * turn(points[a], points[b], points[e[1]]) - length(e)
                best = min(best, step + go(first, e, left - 1))
        return best

    res = math.inf
    for first in vis:
        # walk uses ``max_vertices`` edges at most; the first is already placed
        tail = go(first, first, max_vertices - 1)
        res = min(res, -length(first) + tail)
    return res
