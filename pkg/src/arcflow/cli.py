"""Batch front-end: fixtures, expressions, experiments, JSON/CSV output.

Every subcommand prints one JSON document to stdout (sorted keys, so
identical configs give byte-identical output) and exits with

    0   verdict as expected (or no expectation given)
    1   error (bad arguments, unparseable expression, runtime failure)
    2   verdict mismatch against --expect

``--dump-config`` prints the resolved flat key=value config instead of
running; ``arcflow --config FILE`` replays such a config.
"""

import argparse
import json
import sys

import numpy as np

from arcflow import diagnostics, fixtures, l2control, spaces
from arcflow.arcs import evaluate
from arcflow.diagnostics import (
    Distribution,
    RegionSampler,
    commutation_gap,
    estimate_closeness,
    estimate_E1,
    estimate_E2,
    estimate_speed_growth,
    estimate_transversality,
    involutivity_check,
    nagumo_check,
    sample_integral_surface,
    surface_tangency,
)
from arcflow.errors import ArcflowError
from arcflow.expressions import parse_expression
from arcflow.flows import euler_curve, solve
from arcflow.hermite import hermite_diagonal_exact, hermite_orthogonality
from arcflow.metric import curve_gap, estimate_order, verify_metric_axioms
from arcflow.spaces import GridFunction, GridSpec, circle_set, write_grid_csv

# (name, default, help); every option is textual so configs round-trip.
_COMMON = [
    ("space", "r2", "space id: r1|r2|r3|l2|hausdorff"),
    ("seed", "0", "random seed"),
    ("expect", None, "expected verdict; mismatch exits 2"),
    ("csv", None, "write the tabular part to this CSV file"),
]

_COMMANDS = {
    "metric-check": _COMMON + [
        ("triples", "1000", "number of sampled triples"),
        ("radius", "1.0", "sampling radius"),
    ],
    "tangency": _COMMON + [
        ("a", None, "first arc-field expression"),
        ("b", None, "second arc-field expression"),
        ("base", None, "base point (space dependent)"),
        ("t-grid", "dyadic:4:12", "gap grid: dyadic:K0:K1 or comma floats"),
        ("floor", None, "zero floor override"),
    ],
    "euler": _COMMON + [
        ("field", None, "arc-field expression"),
        ("point", None, "initial point"),
        ("t", "1.0", "integration time"),
        ("steps", None, "fixed Euler step count"),
        ("tol", None, "Richardson tolerance (alternative to --steps)"),
        ("n-max", "4096", "step cap for the doubling solver"),
    ],
    "bracket": _COMMON + [
        ("x", None, "first arc-field expression"),
        ("y", None, "second arc-field expression"),
        ("point", None, "base point"),
        ("t-grid", "dyadic:4:12", "evaluation times"),
    ],
    "diagnose": _COMMON + [
        ("what", None, "E1|E2|close|transverse|speed"),
        ("x", None, "arc-field expression"),
        ("y", None, "second expression (close/transverse)"),
        ("center", None, "sampling center"),
        ("radius", "1.0", "sampling radius"),
        ("pairs", "400", "sample count"),
        ("delta", "0.25", "time bound"),
        ("radii", "0.5,1,2,4", "radius list (speed)"),
    ],
    "commute": _COMMON + [
        ("f", None, "first flow fixture id"),
        ("g", None, "second flow fixture id"),
        ("center", None, "sampling center"),
        ("radius", "1.0", "sampling radius"),
        ("pairs", "200", "sample count"),
        ("delta", "0.25", "time bound"),
        ("quantum", None, "snap sampled times to this multiple"),
        ("floor", "1e-9", "gap below which the flows count as commuting"),
    ],
    "surface": _COMMON + [
        ("f", None, "outer flow fixture id"),
        ("g", None, "inner flow fixture id"),
        ("base", None, "surface base point"),
        ("s-grid", "lin:-0.5:0.5:41", "inner parameter grid lin:A:B:N"),
        ("t-grid", "lin:-0.5:0.5:41", "outer parameter grid"),
        ("combo", None, "arc field to test for tangency (optional)"),
        ("tangency-grid", "dyadic:4:11", "gap grid for the tangency fit"),
        ("tangency-base", None, "base point for the tangency arcs"),
        ("floor", None, "tangency zero floor override"),
    ],
    "involutive": _COMMON + [
        ("f", None, "first flow fixture id"),
        ("g", None, "second flow fixture id"),
        ("bases", None, "semicolon-separated base points"),
        ("coeff-lo", "-2", "coefficient grid lower bound"),
        ("coeff-hi", "2", "coefficient grid upper bound"),
        ("coeff-step", "0.25", "coefficient grid step"),
        ("t-grid", "dyadic:4:12", "gap grid"),
    ],
    "nagumo": _COMMON + [
        ("field", None, "arc-field expression"),
        ("set", "circle:10000", "invariant set: circle:N or line:AXIS:SPACING"),
        ("point", None, "initial point"),
        ("lam", "1.0", "growth constant"),
        ("t-grid", "0.125,0.25,0.5,0.75,1", "solution times (both signs run)"),
        ("tol", "1e-5", "solver tolerance"),
        ("n-max", "65536", "solver step cap"),
        ("bound", "1.05", "acceptable max ratio/drift"),
    ],
    "l2-reach": _COMMON + [
        ("target", "chi01", "target id: chi01|gauss"),
        ("order", "3", "bracket order N"),
        ("steps", "256", "Euler steps for the reported output"),
        ("trace", "16,64,256", "step counts in the trace"),
        ("outdir", None, "write target/output/oracle CSVs here"),
    ],
    "hermite": _COMMON + [
        ("orthogonality", None, "max degree for the orthogonality table"),
        ("coefficients", None, "coefficient target: chi01|gauss"),
        ("order", "8", "coefficient order N"),
    ],
    "fixtures": [("space", None, "restrict to one space id")],
}

# commands whose --space default should not apply
_SPACE_FIXED = {"l2-reach": "l2", "hermite": "l2"}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="arcflow",
        description="flows, brackets and integrability diagnostics")
    parser.add_argument("--config", help="replay a key=value config file")
    sub = parser.add_subparsers(dest="command")
    for name, options in _COMMANDS.items():
        p = sub.add_parser(name)
        for opt, default, help_text in options:
            if name in _SPACE_FIXED and opt == "space":
                default = _SPACE_FIXED[name]
            p.add_argument(f"--{opt}", default=default, help=help_text)
        p.add_argument("--dump-config", action="store_true",
                       help="print the resolved config and exit")
    return parser


def _dump_config(command, args):
    lines = [f"command={command}"]
    for opt, _default, _help in _COMMANDS[command]:
        value = getattr(args, opt.replace("-", "_"))
        if value is not None:
            lines.append(f"{opt}={value}")
    return "\n".join(lines) + "\n"


def _argv_from_config(path):
    argv = []
    command = None
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            if key == "command":
                command = value
            else:
                argv.extend([f"--{key}", value])
    if command is None:
        raise ArcflowError(f"{path}: config file has no 'command=' line")
    return [command] + argv


def _parse_grid(text):
    """dyadic:K0:K1 -> descending 2^-k grid; otherwise comma floats."""
    if text.startswith("dyadic:"):
        _, k0, k1 = text.split(":")
        return [2.0 ** -k for k in range(int(k0), int(k1) + 1)]
    values = [float(v) for v in text.split(",")]
    return values


def _parse_lin(text):
    _, a, b, n = text.split(":")
    return np.linspace(float(a), float(b), int(n))


def _json_default(obj):
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _emit(payload):
    print(json.dumps(payload, indent=2, sort_keys=True, default=_json_default))


def _write_csv(path, header, rows):
    if path is None:
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(repr(v) if isinstance(v, float) else str(v)
                              for v in row) + "\n")


def _registry(args):
    return fixtures.get_registry(args.space)


def _point(args, attr="point"):
    return fixtures.parse_point(args.space, getattr(args, attr, None))


def _sampler(args, center=None):
    quantum = getattr(args, "quantum", None)
    return RegionSampler(
        center if center is not None else fixtures.parse_point(
            args.space, getattr(args, "center", None)),
        float(args.radius), int(args.pairs), float(args.delta),
        int(args.seed), time_quantum=float(quantum) if quantum else None)


def _describe_endpoint(space_id, point):
    if space_id in ("r1", "r2", "r3"):
        return ",".join(repr(float(c)) for c in point)
    if space_id == "l2":
        return f"gridfunction(norm={spaces.grid_norm(point)!r})"
    return f"compactset({len(point)} points)"


# ---------------------------------------------------------------------------
# subcommand handlers: return (payload, verdict)

def _cmd_metric_check(args):
    space = fixtures.get_space(args.space)
    report = verify_metric_axioms(space, int(args.triples), int(args.seed))
    return report.to_dict(), ("pass" if report.passed else "fail")


def _cmd_tangency(args):
    arcs_reg, _ = _registry(args)
    A = parse_expression(args.a, arcs_reg)
    B = parse_expression(args.b, arcs_reg)
    base = fixtures.parse_point(args.space, args.base)
    t_grid = _parse_grid(args.t_grid)
    space = fixtures.get_space(args.space)
    gaps = curve_gap(space, lambda t: evaluate(A, base, t),
                     lambda t: evaluate(B, base, t), t_grid)
    floor = float(args.floor) if args.floor else None
    report = estimate_order(t_grid, gaps, floor=floor,
                            scale=space.magnitude(base))
    _write_csv(args.csv, "t,gap", list(zip(t_grid, gaps)))
    return report.to_dict(), report.verdict


def _cmd_euler(args):
    arcs_reg, _ = _registry(args)
    X = parse_expression(args.field, arcs_reg)
    x0 = _point(args)
    t = float(args.t)
    if args.steps is not None:
        endpoint = euler_curve(X, x0, t, int(args.steps))
        payload = {"endpoint_ref": _describe_endpoint(args.space, endpoint),
                   "steps_used": int(args.steps), "error_estimate": None,
                   "escaped": False, "escape_time": None}
        return payload, "computed"
    if args.tol is None:
        raise ArcflowError("euler needs --steps or --tol")
    result = solve(X, x0, t, float(args.tol), n_max=int(args.n_max))
    payload = result.to_dict(lambda p: _describe_endpoint(args.space, p))
    payload["trace"] = [{"n": n, "error_estimate": e} for n, e in result.trace]
    _write_csv(args.csv, "n,error_estimate", result.trace)
    return payload, ("escaped" if result.escaped else "converged")


def _cmd_bracket(args):
    arcs_reg, _ = _registry(args)
    from arcflow.arcs import bracket as bracket_op
    X = parse_expression(args.x, arcs_reg)
    Y = parse_expression(args.y, arcs_reg)
    B = bracket_op(X, Y)
    x0 = _point(args)
    space = fixtures.get_space(args.space)
    rows = []
    for t in _parse_grid(args.t_grid):
        pt = evaluate(B, x0, t)
        row = {"t": t, "displacement": space.distance(x0, pt)}
        if args.space in ("r1", "r2", "r3"):
            row["endpoint"] = [float(c) for c in pt]
        rows.append(row)
    _write_csv(args.csv, "t,displacement",
               [(r["t"], r["displacement"]) for r in rows])
    return {"bracket": B.name, "table": rows}, "computed"


def _cmd_diagnose(args):
    arcs_reg, _ = _registry(args)
    X = parse_expression(args.x, arcs_reg)
    sampler = _sampler(args)
    what = args.what
    if what == "E1":
        est = estimate_E1(X, sampler)
    elif what == "E2":
        est = estimate_E2(X, sampler)
    elif what == "close":
        est = estimate_closeness(X, parse_expression(args.y, arcs_reg), sampler)
    elif what == "transverse":
        est = estimate_transversality(X, parse_expression(args.y, arcs_reg),
                                      sampler)
    elif what == "speed":
        radii = [float(r) for r in args.radii.split(",")]
        fit = estimate_speed_growth(X, sampler.center, radii, sampler)
        return fit.to_dict(), "fitted"
    else:
        raise ArcflowError(f"unknown diagnostic {what!r}")
    verdict = "diverging" if est.diverging else "stable"
    if what == "transverse":
        verdict = "transverse" if est.witness.get("transverse") else "not-transverse"
    return est.to_dict(), verdict


def _cmd_commute(args):
    _, flow_reg = _registry(args)
    try:
        F, G = flow_reg[args.f], flow_reg[args.g]
    except KeyError as exc:
        raise ArcflowError(f"unknown flow fixture {exc.args[0]!r}") from exc
    est = commutation_gap(F, G, _sampler(args))
    verdict = "commuting" if est.value <= float(args.floor) else "non-commuting"
    return est.to_dict(), verdict


def _cmd_surface(args):
    arcs_reg, flow_reg = _registry(args)
    F, G = flow_reg[args.f], flow_reg[args.g]
    base = fixtures.parse_point(args.space, args.base)
    surface = sample_integral_surface(F, G, base, _parse_lin(args.s_grid),
                                      _parse_lin(args.t_grid),
                                      seed=int(args.seed))
    payload = {
        "points": len(surface.points),
        "resolution": surface.resolution,
        "s_grid": [float(surface.s_grid[0]), float(surface.s_grid[-1]),
                   len(surface.s_grid)],
        "t_grid": [float(surface.t_grid[0]), float(surface.t_grid[-1]),
                   len(surface.t_grid)],
    }
    verdict = "sampled"
    if args.combo:
        combo = parse_expression(args.combo, arcs_reg)
        tangency_base = fixtures.parse_point(args.space, args.tangency_base) \
            if args.tangency_base else base
        floor = float(args.floor) if args.floor else None
        report = surface_tangency(surface, combo, [tangency_base],
                                  _parse_grid(args.tangency_grid), floor=floor)
        payload["tangency"] = report.to_dict()
        verdict = report.verdict
        _write_csv(args.csv, "t,gap",
                   list(zip(report.t_grid, report.gaps)))
    return payload, verdict


def _cmd_involutive(args):
    arcs_reg, flow_reg = _registry(args)
    F, G = flow_reg[args.f], flow_reg[args.g]
    if args.bases:
        bases = [fixtures.parse_point(args.space, b)
                 for b in args.bases.split(";")]
    else:
        bases = [fixtures.parse_point(args.space, None)]
    grid = np.arange(float(args.coeff_lo),
                     float(args.coeff_hi) + float(args.coeff_step) / 2,
                     float(args.coeff_step))
    dist = Distribution((F.as_arc_field(), G.as_arc_field()), (F, G))
    report = involutivity_check(dist, bases, coeff_grid=grid,
                                t_grid=_parse_grid(args.t_grid))
    verdict = "INVOLUTIVE" if report.involutive else "NOT_INVOLUTIVE"
    return report.to_dict(), verdict


def _parse_set(text):
    if text.startswith("circle:"):
        return circle_set(int(text.split(":")[1]))
    if text.startswith("line:"):
        _, axis, spacing = text.split(":")
        direction = np.zeros(2)
        direction[int(axis)] = 1.0
        return spaces.line_set(direction, 20.0, float(spacing))
    raise ArcflowError(f"unknown set spec {text!r}")


def _cmd_nagumo(args):
    arcs_reg, _ = _registry(args)
    X = parse_expression(args.field, arcs_reg)
    S = _parse_set(args.set)
    x0 = _point(args)
    ts = [float(t) for t in args.t_grid.split(",")]
    t_grid = [t for v in ts for t in (v, -v)]
    report = nagumo_check(X, float(args.lam), S, x0, t_grid,
                          tol=float(args.tol), n_max=int(args.n_max))
    verdict = "bounded" if report.max_value <= float(args.bound) else "violated"
    return report.to_dict(), verdict


def _cmd_l2_reach(args):
    spec = GridSpec()
    if args.target == "chi01":
        target = GridFunction.indicator(0.0, 1.0, spec)
    elif args.target == "gauss":
        target = GridFunction.gaussian(spec)
    else:
        raise ArcflowError(f"unknown target {args.target!r}")
    trace_steps = tuple(int(n) for n in args.trace.split(","))
    rspec = l2control.ReachabilitySpec(target, args.target, int(args.order),
                                       int(args.steps), trace_steps)
    result = l2control.reach(rspec)
    payload = result.trace_dict(int(args.order))
    payload["gap_oracle"] = result.gap_oracle
    payload["gap_target"] = result.gap_target
    payload["coefficients"] = list(result.coeffs.values)
    if args.outdir:
        import os
        os.makedirs(args.outdir, exist_ok=True)
        write_grid_csv(target, os.path.join(args.outdir, "target.csv"))
        write_grid_csv(result.output, os.path.join(args.outdir, "output.csv"))
        write_grid_csv(result.oracle, os.path.join(args.outdir, "oracle.csv"))
    _write_csv(args.csv, "n,gap_oracle,gap_target",
               [(r["n"], r["gap_oracle"], r["gap_target"])
                for r in result.trace])
    return payload, "ok"


def _cmd_hermite(args):
    payload = {}
    if args.orthogonality is not None:
        nmax = int(args.orthogonality)
        table = [[hermite_orthogonality(m, n) for n in range(nmax + 1)]
                 for m in range(nmax + 1)]
        payload["orthogonality"] = table
        payload["diagonal_exact"] = [hermite_diagonal_exact(n)
                                     for n in range(nmax + 1)]
    if args.coefficients is not None:
        N = int(args.order)
        if args.coefficients == "chi01":
            coeffs = l2control.coefficients_chi01(N)
        elif args.coefficients == "gauss":
            coeffs = l2control.coefficients_general(
                GridFunction.gaussian(GridSpec()), N)
        else:
            raise ArcflowError(f"unknown coefficient target {args.coefficients!r}")
        payload["coefficients"] = coeffs.to_dict()
    if not payload:
        raise ArcflowError("hermite needs --orthogonality and/or --coefficients")
    return payload, "ok"


def _cmd_fixtures(args):
    payload = {}
    for space_id in ("r1", "r2", "r3", "l2", "hausdorff"):
        if args.space and args.space != space_id:
            continue
        arcs_reg, flow_reg = fixtures.get_registry(space_id)
        payload[space_id] = {"arcs": sorted(arcs_reg),
                             "flows": sorted(flow_reg)}
    return payload, "ok"


_HANDLERS = {
    "metric-check": _cmd_metric_check,
    "tangency": _cmd_tangency,
    "euler": _cmd_euler,
    "bracket": _cmd_bracket,
    "diagnose": _cmd_diagnose,
    "commute": _cmd_commute,
    "surface": _cmd_surface,
    "involutive": _cmd_involutive,
    "nagumo": _cmd_nagumo,
    "l2-reach": _cmd_l2_reach,
    "hermite": _cmd_hermite,
    "fixtures": _cmd_fixtures,
}


def main(argv=None):
    if argv is None:
        argv = sys.argv[1:]
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    if args.config:
        try:
            argv = _argv_from_config(args.config)
        except (OSError, ArcflowError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            return 0 if exc.code == 0 else 1
    if not args.command:
        parser.print_usage(sys.stderr)
        return 1
    if getattr(args, "dump_config", False):
        sys.stdout.write(_dump_config(args.command, args))
        return 0
    try:
        payload, verdict = _HANDLERS[args.command](args)
    except ArcflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    payload = dict(payload)
    payload["verdict_overall"] = verdict
    _emit(payload)
    expect = getattr(args, "expect", None)
    if args.command == "metric-check" and expect is None:
        expect = "pass"
    if expect is not None and verdict != expect:
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
