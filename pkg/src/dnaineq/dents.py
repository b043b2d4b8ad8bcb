"""L-shaped cells, isosceles dents of convex polygons and the DDNA test."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from scipy.optimize import brentq

from .analysis import ray_exit
from .decision import decide
from .geometry import (
    TAU_GEOM,
    CellContext,
    ClosedCurve,
    CurveMetrics,
    InvalidPolygonError,
    Point,
    Polygon,
    _point_segment_distance,
    curve_metrics,
    dist,
    point_location,
)

# largest base angle that guarantees DDNA, and the smallest that rules it out
ALPHA_SUFFICIENT = math.atan(math.pi / 2)
ALPHA_IMPOSSIBLE = math.acos((16 - math.pi ** 2) / (16 + math.pi ** 2))

BISECT_DELTA_TOL = 1e-6
BISECT_MAX_ITER = 40


# --- L-shapes --------------------------------------------------------------

@dataclass(frozen=True)
class LShape:
    """Rectangle [0,w]x[0,h] with the corner block [bx,w]x[cy,h] removed."""

    outer_width: float
    outer_height: float
    notch_x: float
    notch_y: float

    def __post_init__(self):
        w, h, bx, cy = self.outer_width, self.outer_height, self.notch_x, self.notch_y
        if not (0 < bx < w and 0 < cy < h):
            raise InvalidPolygonError("L-shape needs 0 < notch_x < width and 0 < notch_y < height")

    @property
    def labels(self) -> dict[str, Point]:
        w, h, bx, cy = self.outer_width, self.outer_height, self.notch_x, self.notch_y
        return {
            "Y": Point(0.0, 0.0), "A": Point(0.0, h), "B": Point(bx, h),
            "X": Point(bx, cy), "C": Point(w, cy), "D": Point(w, 0.0),
        }

    def polygon(self) -> Polygon:
        lab = self.labels
        # Y A B X C D runs clockwise
        return Polygon(tuple(lab[k] for k in "YDCXBA"))

    def max_theta(self) -> float:
        """Supremum of admissible θ (P inside AB and Q inside DC)."""
        return math.atan(min(self.notch_x / self.outer_height, self.notch_y / self.outer_width))

    def default_theta(self) -> float:
        return min(0.1, 0.5 * self.max_theta())


def lshape_counterexample(L: LShape, theta: float = 0.1, perturbed: bool = False,
                          nudge: float = 1e-3) -> tuple[ClosedCurve, CurveMetrics]:
    """The closed curve A, P, Y, Q, D, Y with ∠AYP = ∠DYQ = θ and its metrics.

    Curvature is 3π + 4θ and perimeter (h + w)(1 + sec θ + tan θ). With
    ``perturbed`` the second visit of Y is pushed toward X by ``nudge`` times the
    cell diameter, so the curve no longer revisits a vertex.
    """
    if not 0 < theta < L.max_theta():
        raise ValueError(f"theta must lie in (0, {L.max_theta():.9g}) for this L-shape")
    lab = L.labels
    h, w = L.outer_height, L.outer_width
    P = Point(h * math.tan(theta), h)
    Q = Point(w, w * math.tan(theta))
    Y, Y2 = lab["Y"], lab["Y"]
    poly = L.polygon()
    if perturbed:
        X = lab["X"]
        d = nudge * poly.scale / dist(Y, X)
        Y2 = Point(Y[0] + d * X[0], Y[1] + d * X[1])
    curve = ClosedCurve((lab["A"], P, Y, Q, lab["D"], Y2))
    return curve, curve_metrics(CellContext.of(poly), curve)


def lshape_closed_forms(L: LShape, theta: float) -> tuple[float, float]:
    """(curvature, perimeter) of the unperturbed counterexample."""
    h, w = L.outer_height, L.outer_width
    return 3 * math.pi + 4 * theta, (h + w) * (1 + 1 / math.cos(theta) + math.tan(theta))


# --- isosceles dents -------------------------------------------------------

def _require_convex(P: Polygon) -> None:
    if not P.convex:
        raise InvalidPolygonError("base polygon must be convex")


@dataclass(frozen=True)
class DentSpec:
    """Dent of edge ``edge_index`` (A = vertex k, B = vertex k+1) with half-angle δ."""

    base: Polygon
    edge_index: int
    delta: float

    def __post_init__(self):
        _require_convex(self.base)
        n = len(self.base)
        if not 0 <= self.edge_index < n:
            raise ValueError(f"edge index must be in [0, {n})")
        if not 0 < self.delta < self.max_delta:
            raise InvalidPolygonError(
                f"delta must lie in (0, {self.max_delta:.9g}), the smaller angle at the dented edge")

    @property
    def max_delta(self) -> float:
        k = self.edge_index
        return min(self.base.interior_angle(k), self.base.interior_angle(k + 1))

    @property
    def endpoints(self) -> tuple[Point, Point]:
        return self.base.edge(self.edge_index)

    @property
    def apex(self) -> Point:
        (ax, ay), (bx, by) = self.endpoints
        l = math.hypot(bx - ax, by - ay)
        depth = 0.5 * l * math.tan(self.delta)
        # left of A -> B is the inside of a counterclockwise polygon
        nx, ny = -(by - ay) / l, (bx - ax) / l
        return Point(0.5 * (ax + bx) + depth * nx, 0.5 * (ay + by) + depth * ny)


def build_P_delta(spec: DentSpec) -> Polygon:
    """The base polygon with edge AB replaced by AX, XB."""
    X = spec.apex
    if point_location(X, spec.base) != "inside":
        raise InvalidPolygonError("dent apex is not strictly inside the base polygon")
    k = spec.edge_index
    verts = list(spec.base.vertices)
    verts.insert(k + 1, X)
    return Polygon(tuple(verts))


@dataclass(frozen=True)
class GammaCurve:
    vertex: str  # "A" or "B"
    curve: ClosedCurve
    f_direct: float
    f_closed: float
    counterexample: bool


def gamma_kv_curves(spec: DentSpec) -> tuple[GammaCurve, GammaCurve]:
    """Dented boundary with A (resp. B) replaced by the exit point of the ray
    from the opposite endpoint through the apex.

    ``f_closed`` comes from the perimeter formula for the cut-off triangle and
    ``counterexample`` from comparing average curvatures.
    """
    P = spec.base
    n = len(P)
    k = spec.edge_index
    cell = build_P_delta(spec)
    ctx = CellContext.of(cell)
    A, B = spec.endpoints
    X = spec.apex
    p, l, d = P.perimeter, dist(A, B), spec.delta
    cell_avg = (2 * math.pi + 4 * d) / (p + l * (1 / math.cos(d) - 1))
    out = []
    for label, far, near_edge, angle in (
        ("A", B, (k - 1) % n, P.interior_angle(k)),
        ("B", A, (k + 1) % n, P.interior_angle(k + 1)),
    ):
        s = ray_exit(far, X, cell)
        hit = Point(far[0] + s * (X[0] - far[0]), far[1] + s * (X[1] - far[1]))
        if _point_segment_distance(hit, *P.edge(near_edge)) > cell.tol:
            raise ValueError(f"replacement point for {label} is not on its adjacent edge")
        verts = list(cell.vertices)
        # cell vertices: ... A(k), X(k+1), B(k+2) ...
        idx = k if label == "A" else (k + 2) % (n + 1)
        verts[idx] = hit
        verts.pop(k + 1)  # X is a straight-through point on the new boundary
        curve = ClosedCurve(tuple(verts))
        f_direct = curve_metrics(ctx, curve).f_value
        new_perim = p + l * math.sin(angle) / math.sin(angle + d) - l - l * math.sin(d) / math.sin(angle + d)
        f_closed = ctx.alpha * 2 * math.pi - new_perim
        out.append(GammaCurve(label, curve, f_direct, f_closed, 2 * math.pi / new_perim < cell_avg))
    return out[0], out[1]


# --- DDNA classification ---------------------------------------------------

@dataclass(frozen=True)
class DdnaVerdict:
    p: float
    l: float
    alpha_max: float
    lhs: float
    rhs: float
    verdict: str  # "DDNA" or "not-DDNA"

    @property
    def is_ddna(self) -> bool:
        return self.verdict == "DDNA"


def ddna_classify(P: Polygon, edge_index: int) -> DdnaVerdict:
    """Whether small isosceles dents of this edge keep the inequality true.

    Holds iff 2p <= πl(1 + cos α)/sin α with α the larger angle at the edge;
    equality counts as DDNA.
    """
    _require_convex(P)
    A, B = P.edge(edge_index)
    p, l = P.perimeter, dist(A, B)
    a = max(P.interior_angle(edge_index), P.interior_angle(edge_index + 1))
    lhs = 2 * p
    rhs = math.pi * l * (1 + math.cos(a)) / math.sin(a)
    verdict = "DDNA" if lhs <= rhs + TAU_GEOM * P.scale else "not-DDNA"
    return DdnaVerdict(p, l, a, lhs, rhs, verdict)


def corollary_bounds(alpha: float) -> str:
    """Angle-only test: 'sufficient', 'impossible' or 'inconclusive'."""
    if not 0 < alpha < math.pi:
        raise ValueError("alpha must lie in (0, π)")
    if alpha <= ALPHA_SUFFICIENT:
        return "sufficient"
    if alpha >= ALPHA_IMPOSSIBLE:
        return "impossible"
    return "inconclusive"


# --- dent threshold --------------------------------------------------------

def _triangle_equation(d: float) -> float:
    sec = lambda x: 1 / math.cos(x)  # noqa: E731
    q = math.pi / 4 - d
    lhs = (2 * math.pi + 4 * d) / (2 + math.sqrt(2) * sec(d))
    rhs = (4 * math.pi + 6 * d) / (4 - 2 * math.tan(q) + 2 * sec(q) + math.sqrt(2) * sec(d))
    return lhs - rhs


def right_triangle_root(lo: float = 0.05, hi: float = 0.7) -> float:
    """Dent threshold for the hypotenuse of an isosceles right triangle.

    Root of the balance between the dented cell's average curvature and that of
    the walk through the dent apex and both cut points.
    """
    if _triangle_equation(lo) * _triangle_equation(hi) > 0:
        raise ValueError("no sign change in bracket")
    return brentq(_triangle_equation, lo, hi, xtol=1e-15, maxiter=200)


def is_right_isosceles_hypotenuse(P: Polygon, edge_index: int) -> bool:
    if len(P) != 3:
        return False
    q = math.pi / 4
    tol = 1e-9
    return (abs(P.interior_angle(edge_index) - q) <= tol
            and abs(P.interior_angle(edge_index + 1) - q) <= tol)


@dataclass(frozen=True)
class DentThreshold:
    delta: float
    equation_root: Optional[float]
    bisection: Optional[float]
    ddna: DdnaVerdict
    iterations: int = 0


def bisect_threshold(P: Polygon, edge_index: int, tol: float = BISECT_DELTA_TOL,
                     max_iter: int = BISECT_MAX_ITER, **decide_kw) -> tuple[float, int]:
    """Largest δ for which the dented cell still satisfies the inequality.

    Bisects over δ on the verdict of ``decide``, from the trivially safe δ = 0
    up to just below the smaller adjacent angle.
    """
    probe = DentSpec(P, edge_index, 1e-3)
    lo, hi = 0.0, (1 - 1e-6) * probe.max_delta

    def fails(d: float) -> bool:
        rep = decide(build_P_delta(DentSpec(P, edge_index, d)), **decide_kw)
        if rep.status not in ("satisfies", "fails"):
            raise ValueError(f"decide returned {rep.status} at delta={d}")
        return rep.status == "fails"

    if not fails(hi):
        raise ValueError("no sign change: every admissible dent satisfies the inequality")
    it = 0
    while hi - lo > tol and it < max_iter:
        mid = 0.5 * (lo + hi)
        if fails(mid):
            hi = mid
        else:
            lo = mid
        it += 1
    return 0.5 * (lo + hi), it


def dent_threshold(P: Polygon, edge_index: int, method: str = "auto", **kw) -> DentThreshold:
    """Dent threshold δ* of a convex polygon edge.

    ``method`` is 'equation' (isosceles right triangle hypotenuse only),
    'bisection', 'both' or 'auto' (equation when it applies, else bisection).
    Edges that are not DDNA have δ* = 0.
    """
    verdict = ddna_classify(P, edge_index)
    if not verdict.is_ddna:
        return DentThreshold(0.0, None, None, verdict)
    root = bis = None
    it = 0
    special = is_right_isosceles_hypotenuse(P, edge_index)
    if method in ("equation", "both") and not special:
        raise ValueError("the closed-form equation only covers an isosceles right triangle's hypotenuse")
    if method in ("equation", "both") or (method == "auto" and special):
        root = right_triangle_root()
    if method in ("bisection", "both") or (method == "auto" and not special):
        bis, it = bisect_threshold(P, edge_index, **kw)
    return DentThreshold(root if root is not None else bis, root, bis, verdict, it)
