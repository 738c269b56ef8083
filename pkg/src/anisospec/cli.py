"""Command-line front end.

Exit codes: 0 success, 1 computation failure (including failed verification
cases), 2 usage error (bad arguments, malformed or invalid input files).
Results go to ``--out`` as JSON or CSV with a one-line summary on stdout;
without ``--out`` the JSON goes to stdout and the summary to stderr.
"""

import argparse
import csv
import io
import json
import math
import re
import sys

from . import __version__
from . import geometry as geo
from . import spectra, verify
from .anisotropy import classify, from_dict, sup_norm
from .errors import (
    AnisospecError,
    InvalidAnisotropy,
    InvalidExponent,
    InvalidLength,
    InvalidParams,
    InvalidRing,
    NoConvergence,
)
from .solver import SolverOptions, convergence_study, mesh_angle, slice_check, solve, triangulate

SCHEMA = "anisospec/1"
USAGE_ERRORS = (InvalidAnisotropy, InvalidParams, InvalidRing, InvalidExponent, InvalidLength)
_DEGREES = re.compile(r"(deg|°|degrees?)\s*$", re.IGNORECASE)


class UsageError(Exception):
    pass


class FileError(Exception):
    pass


# ------------------------------------------------------------------ JSON

def _encode(obj):
    """JSON text with every float written to 17 significant digits."""
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return "null"
        text = format(obj, ".17g")
        return text if any(c in text for c in ".en") else text + ".0"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    if hasattr(obj, "tolist"):
        return _encode(obj.tolist())
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj):
    return _encode(obj) + "\n"


# ------------------------------------------------------------------ inputs

def _read_text(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise FileError(f"cannot read {path}: {exc.strerror}") from None


def _load_json(text, what):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what} is not valid JSON: {exc}") from None


def _radians(text, name):
    if _DEGREES.search(text):
        raise UsageError(f"{name} must be in radians; degrees are not accepted")
    try:
        value = float(text)
    except ValueError:
        raise UsageError(f"{name} must be a number in radians, got {text!r}") from None
    if not math.isfinite(value):
        raise UsageError(f"{name} must be finite")
    return value


def _param_value(key, text):
    if key in ("phi", "theta"):
        return _radians(text, key)
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"parameter {key} must be numeric, got {text!r}") from None


def build_generated(name, params):
    if name not in geo.GENERATORS:
        raise UsageError(f"unknown shape {name!r}; choose from {', '.join(sorted(geo.GENERATORS))}")
    try:
        return geo.GENERATORS[name](**params)
    except TypeError as exc:
        raise UsageError(f"bad parameters for {name}: {exc}") from None


def load_shape(path):
    """Membrane JSON, or a generator call ``{"generator": name, ...params}``."""
    data = _load_json(_read_text(path), f"shape file {path}")
    if isinstance(data, dict) and "generator" in data:
        params = {k: v for k, v in data.items() if k not in ("generator", "schema")}
        return build_generated(data["generator"], params)
    return geo.Membrane.from_dict(data)


def load_anisotropy(text):
    """Inline JSON or ``@path``."""
    if text.startswith("@"):
        text = _read_text(text[1:])
    data = _load_json(text, "anisotropy")
    _reject_degree_fields(data)
    return from_dict(data)


def _reject_degree_fields(data):
    if isinstance(data, dict):
        for k, v in data.items():
            if "deg" in k.lower():
                raise UsageError(f"field {k!r}: angles are accepted in radians only")
            if isinstance(v, str) and k in ("theta", "phi"):
                raise UsageError(f"field {k!r} must be a number in radians")
            _reject_degree_fields(v)
    elif isinstance(data, list):
        for v in data:
            _reject_degree_fields(v)


def _p_value(text):
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"exponent must be a real number, got {text!r}") from None


def _positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}") from None
    if not (math.isfinite(value) and value > 0):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return value


def _h_list(text):
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated mesh sizes, got {text!r}") from None
    return values


def _solver_opts(args):
    return SolverOptions(h=args.h, seed=args.seed, restarts=args.restarts)


# ------------------------------------------------------------------ outputs

def _write(path, text):
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise FileError(f"cannot write {path}: {exc.strerror}") from None


def _emit(args, payload, summary, csv_rows=None, csv_header=None):
    if args.out and args.out.endswith(".csv") and csv_rows is not None:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(csv_header)
        for row in csv_rows:
            writer.writerow([format(v, ".17g") if isinstance(v, float) else v for v in row])
        _write(args.out, buf.getvalue())
        print(summary)
    elif args.out:
        _write(args.out, dumps(payload))
        print(summary)
    else:
        sys.stdout.write(dumps(payload))
        print(summary, file=sys.stderr)


def _result_dict(r):
    return {"value": r.value, "method": r.method, "p": r.p,
            "error_estimate": r.error_estimate, "provenance": r.provenance}


# ------------------------------------------------------------------ commands

def cmd_gen_shape(args):
    params = {}
    for item in args.params:
        if "=" not in item:
            raise UsageError(f"shape parameter {item!r} must look like key=value")
        key, value = item.split("=", 1)
        params[key.strip()] = _param_value(key.strip(), value.strip())
    m = build_generated(args.name, params)
    _emit(args, m.to_dict(), f"{args.name}: {m.vertex_count} vertices, {len(m.holes)} holes, "
                             f"area {geo.area(m):.6g}")
    return 0


def cmd_classify(args):
    h = load_anisotropy(args.anis)
    cls = classify(h, args.tol)
    payload = {"schema": SCHEMA, "kind": cls.kind, "c": cls.c, "theta": cls.theta, "sup_norm": sup_norm(h)}
    _emit(args, payload, f"{cls.kind}" + (f" c={cls.c:.6g} theta={cls.theta:.6g}" if cls.is_degenerate else ""))
    return 0


def cmd_width_profile(args):
    m = load_shape(args.shape)
    prof = geo.width_profile(m, args.n)
    payload = {"schema": SCHEMA, "sup_width": prof.sup_width, "attained_flag": prof.attained_flag,
               "continuum": prof.continuum, "maxima": [list(x) for x in prof.maxima],
               "thetas": prof.thetas, "values": prof.values}
    summary = (f"sup width {prof.sup_width:.10g}, {len(prof.maxima)} maxima"
               f"{' (continuum)' if prof.continuum else ''}, design {prof.attained_flag}")
    _emit(args, payload, summary, zip(map(float, prof.thetas), map(float, prof.values)), ["theta", "L"])
    return 0


def cmd_lambda(args):
    m = load_shape(args.shape)
    h = load_anisotropy(args.anis)
    if classify(h).kind in ("degenerate", "zero"):
        r = spectra.lambda_degenerate(m, h, args.p)
    else:
        r = solve(m, h, args.p, _solver_opts(args))[0]
    _emit(args, {"schema": SCHEMA, **_result_dict(r)}, f"lambda = {r.value:.10g} ({r.method})")
    return 0


def cmd_lambda_min(args):
    m = load_shape(args.shape)
    r, ext = spectra.lambda_min(m, args.p, args.n)
    payload = {"schema": SCHEMA, **_result_dict(r),
               "extremizers": [a.to_dict() for a in ext.anisotropies],
               "complete": ext.complete, "continuum": ext.continuum}
    count = "continuum" if ext.continuum else str(len(ext.anisotropies))
    _emit(args, payload, f"lambda_min = {r.value:.10g}, extremizers: {count}")
    return 0


def cmd_lambda_max(args):
    m = load_shape(args.shape)
    r = spectra.lambda_max(m, args.p, _solver_opts(args))
    _emit(args, {"schema": SCHEMA, **_result_dict(r)}, f"lambda_max = {r.value:.10g} +- {r.error_estimate:.2g}")
    return 0


def cmd_bounds(args):
    m = load_shape(args.shape)
    payload = {"schema": SCHEMA, "p": args.p}
    if args.anis:
        h = load_anisotropy(args.anis)
        lo, hi = spectra.u_estimate_bounds(m, h, args.p, _solver_opts(args))
        payload["u_estimate"] = {"lower": lo, "upper": hi}
    lhs, rhs, holds, eq = spectra.id_min_bound(m, args.p, args.tol)
    payload["id_min"] = {"lhs": lhs, "rhs": rhs, "holds": holds, "equality": eq}
    if geo.is_convex(m):
        lhs, rhs, holds2, eq2 = spectra.ip_min_bound(m, args.p, args.curvature_tol)
        payload["ip_min"] = {"lhs": lhs, "rhs": rhs, "holds": holds2, "equality": eq2}
    a, bound, ok = spectra.isodiametric_check(m)
    payload["isodiametric"] = {"area": a, "bound": bound, "holds": ok}
    summary = f"id-min {'holds' if holds else 'FAILS'}{' (equality)' if eq else ''}"
    if "ip_min" in payload:
        summary += f", ip-min {'holds' if payload['ip_min']['holds'] else 'FAILS'}"
    if "u_estimate" in payload:
        summary += f", U-estimate [{payload['u_estimate']['lower']:.6g}, {payload['u_estimate']['upper']:.6g}]"
    _emit(args, payload, summary)
    return 0


def _export_solution(args, r, u):
    if args.mesh_out:
        _write(args.mesh_out, u.mesh.to_text())
    if args.field_out:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["x", "y", "u"])
        for (x, y), v in zip(u.mesh.vertices, u.values):
            writer.writerow([format(float(x), ".17g"), format(float(y), ".17g"), format(float(v), ".17g")])
        _write(args.field_out, buf.getvalue())


def cmd_solve(args):
    m = load_shape(args.shape)
    h = load_anisotropy(args.anis)
    try:
        r, u = solve(m, h, args.p, _solver_opts(args))
    except NoConvergence as exc:
        if exc.best is not None:
            _export_solution(args, *exc.best)
        raise
    _export_solution(args, r, u)
    _emit(args, {"schema": SCHEMA, **_result_dict(r), "vertices": len(u.mesh.vertices)},
          f"lambda = {r.value:.10g} +- {r.error_estimate:.2g} on {len(u.mesh.vertices)} vertices")
    return 0


def cmd_slice_check(args):
    m = load_shape(args.shape)
    h = load_anisotropy(args.anis)
    cls = classify(h)
    if not cls.is_degenerate:
        raise UsageError("slice-check needs a degenerate anisotropy")
    opts = _solver_opts(args)
    mesh = triangulate(m, opts.h, mesh_angle(h))
    from .solver import rayleigh_minimize

    _, u = rayleigh_minimize(mesh, h, args.p, opts)
    rep = slice_check(mesh, u, cls.theta, args.p, tol=args.tol, n_slices=args.slices)
    payload = {"schema": SCHEMA, "theta": cls.theta, "slices": rep.slices, "nontrivial": rep.nontrivial,
               "near_zero": rep.near_zero, "within": rep.within, "fraction": rep.fraction,
               "reference": rep.reference, "quotients": list(rep.quotients)}
    _emit(args, payload, f"{rep.within}/{rep.nontrivial} nontrivial slices within {args.tol:g} "
                         f"({rep.near_zero} near zero)")
    return 0


def cmd_blowup(args):
    h = load_anisotropy(args.anis)
    seq = spectra.blowup_sequence(h, args.p, args.k_max)
    rows = [(k, a, b.value) for k, a, b in seq]
    payload = {"schema": SCHEMA, "p": args.p,
               "sequence": [{"k": k, "area": a, "lower_bound": v} for k, a, v in rows]}
    _emit(args, payload, f"lower bound grows from {rows[0][2]:.6g} to {rows[-1][2]:.6g} over k=1..{args.k_max}",
          rows, ["k", "area", "lower_bound"])
    return 0


def cmd_verify(args):
    configs = verify.load_config(args.config) if args.config else None
    suites = verify.SUITES if args.suite == "all" else (args.suite,)
    reports = [verify.run_suite(s, configs) for s in suites]
    payload = {"schema": SCHEMA, "reports": []}
    for rep in reports:
        d = rep.to_dict()
        d.pop("runtime")
        payload["reports"].append(d)
    if args.text:
        _write(args.text, "\n\n".join(r.to_text() for r in reports) + "\n")
    ok = all(r.passed for r in reports)
    summary = "; ".join(f"{r.suite} {r.summary['passed']}/{r.summary['total']}" for r in reports)
    _emit(args, payload, f"verify {'PASS' if ok else 'FAIL'}: {summary}")
    return 0 if ok else 1


def cmd_convergence(args):
    m = load_shape(args.shape)
    h = load_anisotropy(args.anis)
    table = convergence_study(m, h, args.p, args.h_list, _solver_opts(args))
    payload = {"schema": SCHEMA, "h": list(table.hs), "values": list(table.values),
               "limit": table.limit, "order": table.order}
    _emit(args, payload, f"limit {table.limit:.10g}, empirical order {table.order:.3g}",
          zip(table.hs, table.values), ["h", "value"])
    return 0


# ------------------------------------------------------------------ parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    parser = _Parser(prog="anisospec", description="Anisotropic fundamental frequencies of planar membranes.")
    parser.add_argument("--version", action="version", version=f"anisospec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_, shape=False, anis=None, p=False, solver=False, n=False):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        if shape:
            sp.add_argument("--shape", required=True, help="membrane JSON file or generator call JSON")
        if anis is not None:
            sp.add_argument("--anis", required=anis, help="anisotropy JSON, inline or @file")
        if p:
            sp.add_argument("--p", type=_p_value, required=True, help="exponent p > 1")
        if solver:
            sp.add_argument("--h", type=_positive_float, default=0.02, help="mesh size (default 0.02)")
            sp.add_argument("--seed", type=int, default=0)
            sp.add_argument("--restarts", type=int, default=3)
        if n:
            sp.add_argument("--n", type=int, default=1024, help="angle grid size (default 1024)")
        sp.add_argument("--out", help="output path (.json, or .csv where supported)")
        return sp

    g = add("gen-shape", cmd_gen_shape, "generate a membrane from a named family")
    g.add_argument("name", help=", ".join(sorted(geo.GENERATORS)))
    g.add_argument("params", nargs="*", help="key=value parameters, angles in radians")
    c = add("classify", cmd_classify, "classify an anisotropy", anis=True)
    c.add_argument("--tol", type=_positive_float, default=1e-9)
    add("width-profile", cmd_width_profile, "directional width function", shape=True, n=True)
    add("lambda", cmd_lambda, "least level for one anisotropy", shape=True, anis=True, p=True, solver=True)
    add("lambda-min", cmd_lambda_min, "least level over unit anisotropies", shape=True, p=True, n=True)
    add("lambda-max", cmd_lambda_max, "Euclidean least level (finite elements)", shape=True, p=True, solver=True)
    b = add("bounds", cmd_bounds, "U-estimate and shape inequalities", shape=True, anis=False, p=True, solver=True)
    b.add_argument("--tol", type=_positive_float, default=1e-6, help="equality tolerance for id-min")
    b.add_argument("--curvature-tol", type=_positive_float, default=1e-2, help="equality tolerance for ip-min")
    s = add("solve", cmd_solve, "finite-element minimisation", shape=True, anis=True, p=True, solver=True)
    s.add_argument("--mesh-out", help="plain-text mesh export")
    s.add_argument("--field-out", help="CSV export of the minimiser (x,y,u)")
    sc = add("slice-check", cmd_slice_check, "1D eigenfunction test on chords", shape=True, anis=True,
             p=True, solver=True)
    sc.add_argument("--tol", type=_positive_float, default=0.02)
    sc.add_argument("--slices", type=int, default=64)
    bl = add("blowup", cmd_blowup, "unit-area thinning rectangle lower bounds", anis=True, p=True)
    bl.add_argument("--k-max", type=int, default=32)
    v = add("verify", cmd_verify, "run a verification suite")
    v.add_argument("--suite", required=True, choices=(*verify.SUITES, "all"))
    v.add_argument("--config", help="key = value tolerance file with optional [suite] sections")
    v.add_argument("--text", help="human-readable report path")
    cv = add("convergence", cmd_convergence, "mesh refinement study", shape=True, anis=True, p=True, solver=True)
    cv.add_argument("--h-list", type=_h_list, default=[0.1, 0.05, 0.025], help="comma-separated decreasing sizes")
    return parser


def run(argv=None):
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except FileError as exc:
        print(f"file error: {exc}", file=sys.stderr)
        return 2
    except USAGE_ERRORS as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 2
    except AnisospecError as exc:
        print(f"computation error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())
