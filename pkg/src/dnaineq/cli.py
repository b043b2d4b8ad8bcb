"""Command-line front end: dnaineq <command> ..."""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

from .analysis import critical_points, interior_vertices, is_separable
from .audit import audit_curves
from .decision import TAU_DECIDE, DecisionReport, decide
from .dents import (
    DentSpec,
    LShape,
    build_P_delta,
    dent_threshold,
    ddna_classify,
    gamma_kv_curves,
    lshape_closed_forms,
    lshape_counterexample,
)
from .geometry import ClosedCurve, InvalidPolygonError, Polygon
from .report import (
    BadInputError,
    _fmt,
    decision_document,
    dumps,
    load_polygon,
    map_edge_index,
    render_svg,
)

EXIT_SATISFIES = 0
EXIT_FAILS = 1
EXIT_INAPPLICABLE = 2
EXIT_USAGE = 64
EXIT_BAD_INPUT = 65

_STATUS_EXIT = {"satisfies": EXIT_SATISFIES, "fails": EXIT_FAILS,
                "inapplicable": EXIT_INAPPLICABLE, "degenerate": EXIT_INAPPLICABLE}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _pts(points) -> list[list[float]]:
    return [[float(x), float(y)] for x, y in points]


def _write(path: Optional[str], text: str) -> None:
    if path is None:
        return
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _print_curve(label: str, curve: Optional[ClosedCurve]) -> None:
    if curve is None:
        return
    pts = " ".join(f"({_fmt(x)}, {_fmt(y)})" for x, y in curve.vertices)
    print(f"{label} ({len(curve)} vertices): {pts}")


def _audit(report: DecisionReport, poly: Polygon, args) -> Optional[dict]:
    if not args.audit:
        return None
    res = audit_curves(poly, args.audit, seed=args.seed)
    tol = args.tolerance * poly.scale
    doc = {"curves": res.n_curves, "seed": res.seed, "min_f": res.min_f, "passed": res.passed(tol)}
    print(f"audit: {res.n_curves} random curves, min f = {_fmt(res.min_f)}")
    if report.status == "satisfies" and not res.passed(tol):
        # a random curve is a genuine counterexample
        report.status = "fails"
        report.witness = report.simple_witness = res.worst
        report.min_f = res.min_f
        report.notes.append("audit found a negative curve missed by the search")
    return doc


def _run_decide(poly: Polygon, name: Optional[str], args, extra: Optional[dict] = None) -> int:
    report = decide(poly, tau=args.tolerance, exhaustive=getattr(args, "exhaustive", False))
    audit = _audit(report, poly, args)
    print(f"status: {report.status}")
    print(f"min f: {_fmt(report.min_f)}")
    print(f"alpha: {_fmt(report.alpha)}")
    print(f"|C| = {report.n_critical}, |S| = {report.n_edges}, K = {report.K}")
    _print_curve("witness", report.simple_witness)
    for note in report.notes:
        print(f"note: {note}")
    if args.timing:
        for k, v in sorted(report.timing.items()):
            print(f"time {k}: {v:.3f} s")
    doc = decision_document(report, poly, name, args.tolerance, timing=args.timing)
    if audit is not None:
        doc["audit"] = audit
    if extra:
        doc.update(extra)
    _write(args.json, dumps(doc))
    if args.svg:
        crit = critical_points(poly).locations() if report.status != "inapplicable" else poly.vertices
        _write(args.svg, render_svg(poly, report.simple_witness, crit, title=name))
    return _STATUS_EXIT[report.status]


# --- commands --------------------------------------------------------------

def cmd_check(args) -> int:
    poly, name, _ = load_polygon(args.file)
    return _run_decide(poly, name, args)


def cmd_separable(args) -> int:
    poly, name, _ = load_polygon(args.file)
    res = is_separable(poly)
    print(f"separable: {'yes' if res else 'no'}")
    print(f"interior vertices: {list(res.interior)}")
    doc = {"name": name, "separable": res.separable, "interior": list(res.interior),
           "witness": None if res.witness is None else [float(res.witness[0]), float(res.witness[1])],
           "witness_vertices": None if res.vertices is None else list(res.vertices)}
    if res.witness is not None:
        print(f"witness point ({_fmt(res.witness[0])}, {_fmt(res.witness[1])}) "
              f"sees vertices {res.vertices[0]} and {res.vertices[1]}")
    _write(args.json, dumps(doc))
    return EXIT_SATISFIES if res else EXIT_INAPPLICABLE


def cmd_critical_points(args) -> int:
    poly, name, _ = load_polygon(args.file)
    C = critical_points(poly)
    print(f"{len(C)} critical points ({len(C.non_vertex())} non-vertex)")
    for c in C.points:
        extra = "" if c.kind == "vertex" else f"  edge {c.host_edge}, through {c.witnesses}"
        print(f"  {c.kind:10s} ({_fmt(c.location[0])}, {_fmt(c.location[1])}){extra}")
    for note in C.notes:
        print(f"note: {note}")
    doc = {"name": name, "vertices": _pts(poly.vertices),
           "interior": interior_vertices(poly),
           "critical": [{"location": [float(c.location[0]), float(c.location[1])], "kind": c.kind,
                         "host_edge": c.host_edge,
                         "witnesses": None if c.witnesses is None else list(c.witnesses)}
                        for c in C.points],
           "notes": list(C.notes)}
    _write(args.json, dumps(doc))
    if args.svg:
        _write(args.svg, render_svg(poly, None, C.locations(), title=name))
    return 0


def _edge(args, poly: Polygon, flipped: bool) -> int:
    try:
        return map_edge_index(args.edge, len(poly), flipped)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _convex(poly: Polygon) -> None:
    if not poly.convex:
        raise BadInputError("this command needs a convex polygon")


def cmd_ddna(args) -> int:
    poly, name, flipped = load_polygon(args.file)
    _convex(poly)
    v = ddna_classify(poly, _edge(args, poly, flipped))
    print(f"verdict: {v.verdict}")
    print(f"2p = {_fmt(v.lhs)}, pi*l*(1+cos a)/sin a = {_fmt(v.rhs)}, "
          f"a = {_fmt(v.alpha_max)} rad ({_fmt(math.degrees(v.alpha_max))} deg)")
    doc = {"name": name, "edge": args.edge, "p": v.p, "l": v.l, "alpha_max": v.alpha_max,
           "lhs": v.lhs, "rhs": v.rhs, "verdict": v.verdict}
    _write(args.json, dumps(doc))
    return 0


def cmd_dent_threshold(args) -> int:
    poly, name, flipped = load_polygon(args.file)
    _convex(poly)
    edge = _edge(args, poly, flipped)
    try:
        res = dent_threshold(poly, edge, method=args.method, tau=args.tolerance)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    print(f"{res.delta:.6f}")
    if res.equation_root is not None:
        print(f"equation root: {_fmt(res.equation_root)}")
    if res.bisection is not None:
        print(f"bisection on decide: {_fmt(res.bisection)} ({res.iterations} steps)")
    doc = {"name": name, "edge": args.edge, "delta": res.delta, "equation_root": res.equation_root,
           "bisection": res.bisection, "ddna": res.ddna.verdict}
    _write(args.json, dumps(doc))
    return 0


def cmd_lshape(args) -> int:
    try:
        L = LShape(args.w, args.h, args.bx, args.cy)
        theta = L.default_theta() if args.theta is None else args.theta
        curve, m = lshape_counterexample(L, theta, perturbed=args.perturbed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    curv, perim = lshape_closed_forms(L, theta)
    print(f"theta = {_fmt(theta)}")
    print(f"constructed curve: curvature {_fmt(m.curvature)} (3pi+4theta = {_fmt(curv)}), "
          f"perimeter {_fmt(m.perimeter)} ((h+w)(1+sec+tan) = {_fmt(perim)}), f = {_fmt(m.f_value)}")
    _print_curve("constructed", curve)
    extra = {"construction": {"theta": theta, "perturbed": args.perturbed, "curve": _pts(curve.vertices),
                              "curvature": m.curvature, "perimeter": m.perimeter, "f_value": m.f_value}}
    svg, args.svg = args.svg, None
    code = _run_decide(L.polygon(), "L-shape", args, extra)
    if svg:
        poly = L.polygon()
        _write(svg, render_svg(poly, curve, critical_points(poly).locations(), title="L-shape"))
    return code


def cmd_dent(args) -> int:
    poly, name, flipped = load_polygon(args.file)
    _convex(poly)
    try:
        spec = DentSpec(poly, _edge(args, poly, flipped), args.delta)
        cell = build_P_delta(spec)
    except InvalidPolygonError as exc:
        raise UsageError(str(exc)) from exc
    extra = {"delta": args.delta, "apex": [float(spec.apex[0]), float(spec.apex[1])]}
    try:
        ga, gb = gamma_kv_curves(spec)
        for g in (ga, gb):
            print(f"gamma^(k,{g.vertex}): f = {_fmt(g.f_direct)} (closed form {_fmt(g.f_closed)})")
        extra["gamma"] = {g.vertex: {"f": g.f_direct, "f_closed": g.f_closed, "curve": _pts(g.curve.vertices)}
                          for g in (ga, gb)}
    except ValueError as exc:
        print(f"note: {exc}")
    return _run_decide(cell, name, args, extra)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", metavar="OUT", help="write a JSON report ('-' for stdout)")
    common.add_argument("--svg", metavar="OUT", help="write an SVG drawing")
    common.add_argument("--tolerance", type=float, default=TAU_DECIDE,
                        help="decision tolerance relative to the cell diameter (default %(default)g)")
    common.add_argument("--seed", type=int, default=0, help="seed of the random-curve audit")
    common.add_argument("--audit", type=int, default=0, metavar="N",
                        help="also test N seeded random closed curves")
    common.add_argument("--timing", action="store_true", help="report stage timings")

    p = _Parser(prog="dnaineq", description="Decide the DNA inequality for polygonal cells.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("check", parents=[common], help="full decision for a polygon file")
    s.add_argument("file")
    s.add_argument("--exhaustive", action="store_true",
                   help="run the special-form scan even when a negative walk is already known")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("separable", parents=[common], help="separability test")
    s.add_argument("file")
    s.set_defaults(func=cmd_separable)

    s = sub.add_parser("critical-points", parents=[common], help="list critical points")
    s.add_argument("file")
    s.set_defaults(func=cmd_critical_points)

    s = sub.add_parser("ddna", parents=[common], help="dentability test of a convex polygon edge")
    s.add_argument("file")
    s.add_argument("--edge", type=int, required=True)
    s.set_defaults(func=cmd_ddna)

    s = sub.add_parser("dent-threshold", parents=[common], help="largest admissible dent angle")
    s.add_argument("file")
    s.add_argument("--edge", type=int, required=True)
    s.add_argument("--method", choices=("auto", "equation", "bisection", "both"), default="auto")
    s.set_defaults(func=cmd_dent_threshold)

    s = sub.add_parser("lshape", parents=[common], help="L-shaped cell and its counterexample")
    s.add_argument("--w", type=float, required=True, help="outer width")
    s.add_argument("--h", type=float, required=True, help="outer height")
    s.add_argument("--bx", type=float, required=True, help="notch corner x")
    s.add_argument("--cy", type=float, required=True, help="notch corner y")
    s.add_argument("--theta", type=float, help="angle at the corner opposite the notch")
    s.add_argument("--perturbed", action="store_true", help="nudge the repeated vertex inward")
    s.add_argument("--exhaustive", action="store_true")
    s.set_defaults(func=cmd_lshape)

    s = sub.add_parser("dent", parents=[common], help="decide a dented convex polygon")
    s.add_argument("--file", required=True)
    s.add_argument("--edge", type=int, required=True)
    s.add_argument("--delta", type=float, required=True, help="dent half-angle in radians")
    s.add_argument("--exhaustive", action="store_true")
    s.set_defaults(func=cmd_dent)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    if args.tolerance <= 0:
        print("error: --tolerance must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except BadInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run(argv: Optional[Sequence[str]] = None) -> int:
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
