"""Command-line front end.

    brachistochrone solve --b 1 --beta 1
    brachistochrone time --curve circle --b 1 --beta 1
    brachistochrone compare --b 2 --beta 1 --format csv
    brachistochrone residuals --curve cycloid --b 1 --beta 1
    brachistochrone sweep --from 0.1 --to 10 --steps 20
    brachistochrone plot --b 1 --beta 1 --svg trio.svg
    brachistochrone direct --b 1 --beta 1 --n 256 --out direct.csv

Exit codes: 0 success, 2 bad arguments or input data, 3 numerical
diagnostic (quadrature did not settle, internal consistency check failed,
minimiser did not converge), 4 I/O failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import records
from .curves import DEFAULT_GRADING, circle_curve, line_curve, load_curve_csv, make_mesh
from .cycloid_solver import BrachProblem, sample_solution, solve
from .direct_minimizer import METHODS, MinimizeConfig, minimize_direct
from .errors import ArgumentError, BrachistochroneError
from .lagrangians import lagrangian_by_name
from .variational import (
    QuadratureConfig,
    beltrami_residual,
    directional_derivative,
    el_residual,
    make_admissible_perturbation,
    travel_time,
    weak_form_residual,
)

EXIT_OK, EXIT_ARGS, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4
BUILTIN_CURVES = ("line", "circle", "cycloid")


class NumericalFailure(BrachistochroneError):
    pass


# --- helpers ----------------------------------------------------------------


def _positive(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be positive and finite, got {text}")
    return v


def _curve_spec(text):
    if text in BUILTIN_CURVES or (text.startswith("file=") and len(text) > 5):
        return text
    raise argparse.ArgumentTypeError(f"expected one of {', '.join(BUILTIN_CURVES)} or file=PATH, got {text!r}")


def _problem(args) -> BrachProblem:
    return BrachProblem(args.b, args.beta)


def _quad(args) -> QuadratureConfig:
    return QuadratureConfig(abs_tol=args.abs_tol, max_levels=args.max_levels)


def build_curve(spec: str, args):
    mesh = make_mesh(args.n, args.b, args.q)
    if spec == "line":
        return line_curve(args.b, args.beta, mesh)
    if spec == "circle":
        return circle_curve(args.b, args.beta, mesh)
    if spec == "cycloid":
        return sample_solution(solve(_problem(args)), mesh)
    return load_curve_csv(spec[5:], args.b, args.beta)


def _emit(text, out):
    out.write(text if text.endswith("\n") else text + "\n")


def _csv(rows, header):
    out = [",".join(header)]
    for row in rows:
        cells = []
        for key in header:
            v = row[key]
            if isinstance(v, bool):
                cells.append("true" if v else "false")
            elif isinstance(v, float):
                cells.append(records.format_float(v).replace("null", "nan"))
            else:
                cells.append(str(v))
        out.append(",".join(cells))
    return "\n".join(out)


def _render(rows, header, fmt, out, envelope=None):
    if fmt == "csv":
        _emit(_csv(rows, header), out)
    else:
        _emit(records.dumps(rows if envelope is None else envelope), out)


# --- commands ---------------------------------------------------------------


def cmd_solve(args, out):
    rec = solve(_problem(args)).to_record()
    _render([rec], list(rec), args.format, out, rec)


def _time_record(spec, args):
    curve = build_curve(spec, args)
    lag = lagrangian_by_name(args.lagrangian)
    res = travel_time(curve, lag, _quad(args), strict=False)
    rec = {
        "curve": spec,
        "b": args.b,
        "beta": args.beta,
        "lagrangian": lag.name,
        "time": res.value,
        "converged": res.converged,
        "levels": res.levels,
        "error_estimate": res.error_estimate,
    }
    if not res.converged:
        raise NumericalFailure(
            f"quadrature for {spec} did not converge to {args.abs_tol:g}; last estimates "
            + ", ".join(records.format_float(e) for e in res.estimates)
        )
    return rec


def cmd_time(args, out):
    rec = _time_record(args.curve, args)
    _render([rec], list(rec), args.format, out, rec)


def cmd_compare(args, out):
    specs = list(BUILTIN_CURVES) + list(args.extra or [])
    rows = [_time_record(s, args) for s in specs]
    best = rows[2]["time"]
    for r in rows:
        r["margin"] = (r["time"] - best) / best
    times = [r["time"] for r in rows[:3]]
    ordered = times[2] < times[1] < times[0]
    envelope = {
        "b": args.b,
        "beta": args.beta,
        "exact_cycloid": solve(_problem(args)).time,
        "ordering_holds": ordered,
        "rows": [{k: r[k] for k in ("curve", "time", "converged", "margin")} for r in rows],
    }
    _render(rows, ["curve", "time", "converged", "margin"], args.format, out, envelope)


def cmd_residuals(args, out):
    curve = build_curve(args.curve, args)
    lag = lagrangian_by_name(args.lagrangian)
    cutoff = args.cutoff if args.cutoff is not None else 0.1 * args.b
    cfg = _quad(args)
    reports = [
        el_residual(curve, lag, cutoff),
        beltrami_residual(curve, lag, cutoff),
        weak_form_residual(curve, lag, args.n_test, cutoff, cfg),
    ]
    derivs = []
    for i in range(args.directions):
        v = make_admissible_perturbation(args.seed + i, cutoff, args.b, 0.1 * args.beta, curve.mesh)
        derivs.append(directional_derivative(curve, v, lag, cfg))
    if args.format == "csv":
        rows = []
        for rep in reports:
            vals = rep.values - rep.constant if rep.constant is not None else rep.values
            rows += [{"kind": rep.kind, "t": float(t), "value": float(v)} for t, v in zip(rep.t, vals)]
        rows += [{"kind": "directional", "t": float(i), "value": float(d)} for i, d in enumerate(derivs)]
        _emit(_csv(rows, ["kind", "t", "value"]), out)
        return
    rec = {
        "curve": args.curve,
        "b": args.b,
        "beta": args.beta,
        "lagrangian": lag.name,
        "n": curve.mesh.n,
        "euler_lagrange": reports[0].to_record(),
        "beltrami": reports[1].to_record(),
        "weak": reports[2].to_record(),
    }
    if derivs:
        rec["directional"] = {"seed": args.seed, "values": derivs, "sup": float(np.max(np.abs(derivs)))}
    _emit(records.dumps(rec), out)


CRITICAL_RATIO = 2.0 / math.pi


def sweep_rows(lo: float, hi: float, steps: int, mark_critical: bool = False):
    """Linear grid of ``steps + 1`` ratios, optionally with ``2/pi`` inserted."""
    if not (0 < lo < hi) or not (math.isfinite(lo) and math.isfinite(hi)):
        raise ArgumentError(f"need 0 < from < to, got from={lo!r}, to={hi!r}")
    if steps < 1:
        raise ArgumentError(f"steps must be >= 1, got {steps}")
    ratios = [lo + (hi - lo) * i / steps for i in range(steps)] + [hi]
    if mark_critical and lo < CRITICAL_RATIO < hi and CRITICAL_RATIO not in ratios:
        ratios = sorted(ratios + [CRITICAL_RATIO])
    rows = []
    for r in ratios:
        s = solve(BrachProblem(1.0, r))
        rows.append(
            {"ratio": r, "theta_tilde": s.theta_tilde, "k": s.k, "class": s.shape.value, "exact_time": s.time}
        )
    return rows


def cmd_sweep(args, out):
    rows = sweep_rows(args.ratio_from, args.ratio_to, args.steps, args.mark_critical)
    _render(rows, ["ratio", "theta_tilde", "k", "class", "exact_time"], args.format, out)


_COLOURS = {"line": "#1f77b4", "circle": "#2ca02c", "cycloid": "#d62728"}
_EXTRA_COLOURS = ("#9467bd", "#8c564b", "#e377c2", "#7f7f7f")


def render_svg(curves, b: float, beta: float) -> str:
    """Static SVG of the curves; depth grows downwards, as for a falling bead."""
    if not curves:
        raise ArgumentError("nothing to plot")
    width, height, margin = 640, 400, 48
    depth = max(beta, max(float(np.max(c.values)) for _, c in curves))
    sx = (width - 2 * margin) / b
    sy = (height - 2 * margin) / depth
    scale = min(sx, sy)
    x0, y0 = margin, margin

    def px(t, g):
        return f"{x0 + scale * t:.3f},{y0 + scale * g:.3f}"

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x0 + scale * b:.3f}" y2="{y0}" stroke="black"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y0 + scale * depth:.3f}" stroke="black"/>',
        f'<text x="{x0 + scale * b:.3f}" y="{y0 - 8}" font-size="12" text-anchor="end">t</text>',
        f'<text x="{x0 - 8}" y="{y0 + scale * depth:.3f}" font-size="12" text-anchor="end">depth</text>',
        f'<circle cx="{x0 + scale * b:.3f}" cy="{y0 + scale * beta:.3f}" r="3" fill="black"/>',
    ]
    extra = 0
    for i, (name, c) in enumerate(curves):
        colour = _COLOURS.get(name)
        if colour is None:
            colour = _EXTRA_COLOURS[extra % len(_EXTRA_COLOURS)]
            extra += 1
        pts = " ".join(px(t, g) for t, g in zip(c.t, c.values))
        lines.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{pts}"/>')
        ly = height - margin + 16
        lx = margin + 150 * i
        lines.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 24}" y2="{ly}" stroke="{colour}" stroke-width="2"/>')
        lines.append(f'<text x="{lx + 30}" y="{ly + 4}" font-size="12">{name}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def cmd_plot(args, out):
    specs = [s for s in args.curves.split(",") if s]
    for s in specs:
        _curve_spec(s)
    curves = [(s, build_curve(s, args)) for s in specs]
    svg = render_svg(curves, args.b, args.beta)
    Path(args.svg).write_text(svg, encoding="utf-8", newline="\n")
    _emit(records.dumps({"svg": str(args.svg), "curves": specs}), out)


def cmd_direct(args, out):
    p = _problem(args)
    mesh = make_mesh(args.n, args.b, args.q)
    cfg = MinimizeConfig(max_iterations=args.max_iterations, grad_tol=args.grad_tol, method=args.method)
    ref = sample_solution(solve(p), mesh)
    res = minimize_direct(p, mesh, cfg, reference=ref)
    if args.out:
        res.save(args.out)
    rec = res.to_record()
    rec["method"] = res.method
    rec["grad_norm"] = res.grad_norm
    rec["exact_objective"] = solve(p).time / math.sqrt(2.0)
    _emit(records.dumps(rec), out)
    if not res.converged:
        raise NumericalFailure(f"minimiser stopped after {res.iterations} iterations without converging")


# --- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="brachistochrone",
        description="Travel times, stationarity residuals and the closed-form cycloid.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, mesh=True, quad=True):
        p.add_argument("--b", type=_positive, required=True, help="horizontal extent")
        p.add_argument("--beta", type=_positive, required=True, help="terminal depth")
        if mesh:
            p.add_argument("--n", type=int, default=256, help="mesh cells")
            p.add_argument("--q", type=float, default=DEFAULT_GRADING, help="mesh grading exponent")
        if quad:
            p.add_argument("--abs-tol", type=_positive, default=1e-8, help="quadrature tolerance")
            p.add_argument("--max-levels", type=int, default=14, help="quadrature refinement levels")
            p.add_argument(
                "--lagrangian", choices=("brach", "transformed", "constant"), default="brach"
            )

    def fmt(p):
        p.add_argument("--format", choices=("json", "csv"), default="json")

    fc = argparse.ArgumentDefaultsHelpFormatter
    p = sub.add_parser("solve", help="closed-form solution", formatter_class=fc)
    common(p, mesh=False, quad=False)
    fmt(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("time", help="travel time of one curve", formatter_class=fc)
    common(p)
    p.add_argument("--curve", type=_curve_spec, required=True, help="line, circle, cycloid or file=PATH")
    fmt(p)
    p.set_defaults(func=cmd_time)

    p = sub.add_parser("compare", help="line vs circle vs cycloid", formatter_class=fc)
    common(p)
    p.add_argument("--extra", type=_curve_spec, action="append", help="additional file=PATH curve")
    fmt(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("residuals", help="Euler-Lagrange, Beltrami and weak-form residuals", formatter_class=fc)
    common(p)
    p.add_argument("--curve", type=_curve_spec, required=True)
    p.add_argument("--n-test", type=int, default=100, help="weak-form test functions")
    p.add_argument("--cutoff", type=_positive, default=None, help="singular-end cutoff (default b/10)")
    p.add_argument("--directions", type=int, default=0, help="random directional derivatives to report")
    p.add_argument("--seed", type=int, default=0)
    fmt(p)
    p.set_defaults(func=cmd_residuals)

    p = sub.add_parser("sweep", help="tabulate the solution over beta/b", formatter_class=fc)
    p.add_argument("--from", dest="ratio_from", type=_positive, required=True)
    p.add_argument("--to", dest="ratio_to", type=_positive, required=True)
    p.add_argument("--steps", type=int, default=10, help="number of intervals; rows = steps + 1")
    p.add_argument("--mark-critical", action="store_true", help="insert the ratio 2/pi if in range")
    p.add_argument("--format", choices=("json", "csv"), default="csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("plot", help="SVG of candidate curves", formatter_class=fc)
    common(p, quad=False)
    p.add_argument("--curves", default="line,circle,cycloid", help="comma-separated curve list")
    p.add_argument("--svg", required=True, help="output path")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("direct", help="convex direct minimisation", formatter_class=fc)
    common(p, quad=False)
    p.add_argument("--method", choices=METHODS, default="scaled")
    p.add_argument("--max-iterations", type=int, default=5000)
    p.add_argument("--grad-tol", type=_positive, default=1e-8)
    p.add_argument("--out", default=None, help="curve CSV; a .json summary is written next to it")
    p.set_defaults(func=cmd_direct)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args, out)
    except argparse.ArgumentTypeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except ArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except BrachistochroneError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
