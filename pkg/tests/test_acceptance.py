"""Acceptance criteria. Each test prints one PASS/FAIL line for its criterion;
the lines are repeated in the terminal summary."""

import math
import time

import numpy as np
import pytest

from conftest import (
    HEX_NONSEP_A,
    HEX_NONSEP_B,
    HEX_SEPARABLE,
    LSHAPE,
    PENTAGON,
    PENTAGON_SEPARABLE,
    TRIANGLE,
)
from dnaineq.analysis import critical_points, is_separable
from dnaineq.audit import audit_curves
from dnaineq.decision import TAU_DECIDE, build_edge_set, decide, min_closed_value, power_table
from dnaineq.dents import (
    LShape,
    DentSpec,
    build_P_delta,
    corollary_bounds,
    ddna_classify,
    dent_threshold,
    lshape_counterexample,
)
from dnaineq.geometry import CellContext, InvalidPolygonError, Polygon, curve_metrics, segment_within
from oracles import closed_walk_min_memo
from polygens import convex_polygon, star_polygon


class Criterion:
    """Collects named sub-checks; ``finish`` prints the verdict line and fails
    the test if any sub-check failed."""

    def __init__(self, request):
        self.request = request
        self.checks = []

    def __call__(self, name, ok, detail=""):
        self.checks.append((name, bool(ok), detail))

    def finish(self):
        number, title = self.request.node.get_closest_marker("criterion").args
        bad = [n for n, ok, _ in self.checks if not ok]
        parts = "; ".join(f"{n}: {'ok' if ok else 'FAILED'}{f' ({d})' if d else ''}"
                          for n, ok, d in self.checks)
        line = f"criterion {number} ({title}): {'FAIL' if bad else 'PASS'} [{parts}]"
        print(line)
        config = self.request.config
        config._acceptance_lines = getattr(config, "_acceptance_lines", []) + [line]
        assert not bad, "failed sub-checks: " + ", ".join(bad)


@pytest.fixture
def criterion(request):
    return Criterion(request)


def timed(fn, *args, **kw):
    t = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t


def inside(curve, poly):
    v = curve.vertices
    return all(segment_within(v[i], v[(i + 1) % len(v)], poly) for i in range(len(v)))


@pytest.mark.criterion(1, "L-shape disproof")
def test_lshape_disproof(criterion):
    t0 = time.perf_counter()
    L = LShape(60, 60, 20, 20)
    poly = Polygon.from_points(LSHAPE)
    report = decide(poly)
    curve, m = lshape_counterexample(L, 0.1)
    elapsed = time.perf_counter() - t0
    curv = 3 * math.pi + 0.4
    perim = 120 * (1 + 1 / math.cos(0.1) + math.tan(0.1))
    criterion("check fails", report.status == "fails", report.status)
    criterion("curvature", abs(m.curvature - curv) <= 1e-9, f"{m.curvature:.12g}")
    criterion("perimeter", abs(m.perimeter - perim) <= 1e-9, f"{m.perimeter:.12g}")
    criterion("f < 0", m.f_value < 0, f"{m.f_value:.6g}")
    criterion("curve in cell", inside(curve, poly))
    criterion("runtime < 5 s", elapsed < 5, f"{elapsed:.2f} s")
    criterion.finish()


@pytest.mark.criterion(2, "critical-point count")
def test_critical_point_count(criterion):
    C, elapsed = timed(critical_points, Polygon.from_points(PENTAGON))
    criterion("9 points", len(C) == 9, str(len(C)))
    got = [c.location for c in C.non_vertex()]
    want = [(7.5, 0), (22.5, 0), (30, 20), (0, 20)]
    criterion("4 non-vertex", len(got) == 4, str(len(got)))
    err = max(min(math.dist(w, g) for g in got) for w in want) if got else math.inf
    criterion("locations within 1e-6", err <= 1e-6, f"max err {err:.2g}")
    criterion("runtime < 1 s", elapsed < 1, f"{elapsed:.3f} s")
    criterion.finish()


@pytest.mark.criterion(3, "separability")
def test_separability(criterion):
    for label, pts, expected in (
        ("separable hexagon", HEX_SEPARABLE, True),
        ("separable pentagon", PENTAGON_SEPARABLE, True),
        ("non-separable hexagon A", HEX_NONSEP_A, False),
        ("non-separable hexagon B", HEX_NONSEP_B, False),
    ):
        res, elapsed = timed(is_separable, Polygon.from_points(pts))
        criterion(label, bool(res) is expected and elapsed < 1, f"{bool(res)}, {elapsed:.3f} s")
    criterion.finish()


@pytest.mark.criterion(4, "dent threshold")
def test_dent_threshold(criterion):
    t0 = time.perf_counter()
    tri = Polygon.from_points(TRIANGLE)
    res = dent_threshold(tri, 2, method="both")
    at_small = decide(build_P_delta(DentSpec(tri, 2, 0.25))).status
    at_large = decide(build_P_delta(DentSpec(tri, 2, 0.35))).status
    elapsed = time.perf_counter() - t0
    root, bis = res.equation_root, res.bisection
    criterion("equation root 0.297142593 +- 1e-6", abs(root - 0.297142593) <= 1e-6, f"{root:.10f}")
    criterion("bisection agrees within 1e-4", abs(bis - root) <= 1e-4, f"bisection {bis:.7f}")
    criterion("satisfies at 0.25", at_small == "satisfies", at_small)
    criterion("fails at 0.35", at_large == "fails", at_large)
    criterion("runtime < 60 s", elapsed < 60, f"{elapsed:.1f} s")
    criterion.finish()


@pytest.mark.criterion(5, "DDNA classification")
def test_ddna_classification(criterion):
    t0 = time.perf_counter()
    tri = Polygon.from_points(TRIANGLE)
    criterion("hypotenuse DDNA", ddna_classify(tri, 2).verdict == "DDNA")
    criterion("leg not-DDNA", ddna_classify(tri, 0).verdict == "not-DDNA")
    iso = ddna_classify(Polygon.from_points([(0, 0), (4, 0), (2, math.pi)]), 0)
    criterion("base 4 / height pi equality DDNA",
              iso.verdict == "DDNA" and abs(iso.lhs - iso.rhs) <= 1e-9 * iso.rhs,
              f"lhs - rhs = {iso.lhs - iso.rhs:.2g}")
    lo, hi = math.atan(math.pi / 2), math.acos((16 - math.pi ** 2) / (16 + math.pi ** 2))
    eps = 1e-9
    criterion("sufficient bound", corollary_bounds(lo) == "sufficient"
              and corollary_bounds(lo + eps) == "inconclusive")
    criterion("impossible bound", corollary_bounds(hi) == "impossible"
              and corollary_bounds(hi - eps) == "inconclusive")
    elapsed = time.perf_counter() - t0
    criterion("runtime < 1 s", elapsed < 1, f"{elapsed:.3f} s")
    criterion.finish()


@pytest.mark.criterion(6, "convex soundness")
def test_convex_soundness(criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst, statuses = 0.0, []
    for k in range(50):
        poly = convex_polygon(rng, 5 + k % 5)
        r = decide(poly)
        statuses.append(r.status)
        ctx = CellContext.of(poly)
        C = critical_points(poly)
        S = build_edge_set(poly, C)
        v, _ = min_closed_value(power_table(S, ctx, len(C) ** 2 - len(C) - 1), S, ctx, witness=False)
        worst = max(worst, abs(v), abs(r.min_f))
    elapsed = time.perf_counter() - t0
    n_ok = statuses.count("satisfies")
    criterion("all satisfy", n_ok == 50, f"{n_ok}/50")
    criterion("min value 0 +- 1e-7", worst <= 1e-7, f"max |min| {worst:.2g}")
    criterion("runtime < 5 min", elapsed < 300, f"{elapsed:.1f} s")
    criterion.finish()



def _random_cells(rng, count):
    """Separable cells with at most six critical points, about half non-convex."""
    cells = []
    while len(cells) < count:
        nonconvex = len(cells) % 2 == 0
        n = int(rng.integers(4, 6)) if nonconvex else int(rng.integers(3, 7))
        radii = rng.uniform(0.15, 1.0, n) if nonconvex else np.ones(n)
        try:
            poly = star_polygon(radii, rng.uniform(0.3, 1.0, n))
        except InvalidPolygonError:
            continue
        if poly.convex == nonconvex or not is_separable(poly):
            continue
        if len(critical_points(poly)) <= 6:
            cells.append(poly)
    return cells


@pytest.mark.criterion(7, "oracle equivalence")
def test_oracle_equivalence(criterion):
    rng = np.random.default_rng(77)
    cells = _random_cells(rng, 20)
    worst, negative = 0.0, 0
    for poly in cells:
        ctx = CellContext.of(poly)
        C = critical_points(poly)
        S = build_edge_set(poly, C)
        K = len(C) ** 2 - len(C) - 1
        dp, _ = min_closed_value(power_table(S, ctx, K), S, ctx, witness=False)
        ref = closed_walk_min_memo(list(S.points), poly, ctx.alpha, K + 1)
        worst = max(worst, abs(dp - ref))
        negative += ref < -1e-7
    criterion("20 cells with |C| <= 6", len(cells) == 20)
    criterion("DP equals enumeration within 1e-7", worst <= 1e-7,
              f"max diff {worst:.2g}, {negative} cells with negative minimum")
    criterion.finish()


@pytest.mark.criterion(8, "Monte-Carlo soundness")
def test_monte_carlo_soundness(criterion):
    tri = Polygon.from_points(TRIANGLE)
    cells = {
        "square": Polygon.from_points([(0, 0), (1, 0), (1, 1), (0, 1)]),
        "triangle": tri,
        "separable hexagon": Polygon.from_points(HEX_SEPARABLE),
        "separable pentagon": Polygon.from_points(PENTAGON_SEPARABLE),
        "dent 0.25": build_P_delta(DentSpec(tri, 2, 0.25)),
        "dent 0.35": build_P_delta(DentSpec(tri, 2, 0.35)),
        "dart": Polygon.from_points([(0, 0), (4, 0), (2, 0.6), (2, 3)]),
        "L-shape": Polygon.from_points(LSHAPE),
        "deep-dent pentagon": Polygon.from_points(PENTAGON),
    }
    for seed, (name, poly) in enumerate(cells.items()):
        r = decide(poly)
        ctx = CellContext.of(poly)
        if r.status == "satisfies":
            audit = audit_curves(poly, 10_000, seed=seed)
            criterion(f"{name} satisfies, audit", audit.n_curves == 10_000 and audit.passed(TAU_DECIDE * poly.scale),
                      f"min f {audit.min_f:.3g}")
        elif r.status == "fails":
            f = curve_metrics(ctx, r.witness).f_value
            criterion(f"{name} fails, witness", f < 0 and inside(r.witness, poly), f"f {f:.4g}")
        else:
            criterion(f"{name} verdict", False, r.status)
    criterion.finish()
