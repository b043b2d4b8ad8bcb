"""Deciding the DNA inequality (average curvature of enclosed closed curves)
for simple polygonal cells."""

from .analysis import critical_points, interior_vertices, is_separable
from .decision import DecisionReport, decide
from .dents import (
    DentSpec,
    LShape,
    build_P_delta,
    corollary_bounds,
    ddna_classify,
    dent_threshold,
    gamma_kv_curves,
    lshape_counterexample,
)
from .geometry import CellContext, ClosedCurve, Polygon, curve_metrics, exterior_angle

__all__ = [
    "CellContext", "ClosedCurve", "DecisionReport", "DentSpec", "LShape", "Polygon",
    "build_P_delta", "corollary_bounds", "critical_points", "curve_metrics", "ddna_classify",
    "decide", "dent_threshold", "exterior_angle", "gamma_kv_curves", "interior_vertices",
    "is_separable", "lshape_counterexample",
]
