"""Command-line front end: one subcommand per solver family, JSON/CSV out.

Exit codes: 0 success, 2 domain/causality errors, 3 convergence or search
failures, 64 usage errors. With a fixed ``--seed`` all output bytes are
reproducible.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from . import verify as verify_mod
from .cutlocus import classify_cut, cut_time, in_future_aubry
from .distance import ConnectOptions, connect
from .errors import (ClassificationGap, ConvergenceFailure, DomainError,
                     InAubry, LorkamError, NotCausallyRelated,
                     NotChronological, NotTimelike, NUCheckFailed,
                     SafetyBoundHit, SearchBoundaryHit, StepFailure)
from .homotopy import sample_trace
from .laxoleinik import LOOptions, regularized_value, sandwich_check
from .geodesic import integrate_geodesic
from .spacetime import (SpacetimeSpec, cylinder, minkowski, warped,
                        wrap_angle)

_USAGE_EXIT = 64
_DOMAIN_EXIT = 2
_SOLVER_EXIT = 3

_DOMAIN_ERRORS = (DomainError, NotCausallyRelated, NotChronological,
                  NotTimelike, InAubry)
_SOLVER_ERRORS = (ConvergenceFailure, StepFailure, SearchBoundaryHit,
                  SafetyBoundHit, ClassificationGap, NUCheckFailed)


def _parse_point(text: str) -> np.ndarray:
    try:
        return np.array([float(c) for c in text.split(",")])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad point {text!r}") from exc


def build_spec(args) -> SpacetimeSpec:
    name = args.metric
    kw = {"winding_bound": args.winding_bound}
    if name == "minkowski2":
        return minkowski(2)
    if name == "minkowski3":
        return minkowski(3)
    if name == "cylinder":
        return cylinder(**kw)
    if name.startswith("warped:"):
        t_dom = None
        if args.t_domain:
            t_dom = tuple(float(c) for c in args.t_domain.split(","))
        return warped(name.split(":", 1)[1], t_domain=t_dom, **kw)
    raise argparse.ArgumentTypeError(f"unknown metric {name!r}")


def _point_record(spec, p):
    rec = {"coords": [float(c) for c in p]}
    if spec.periodic:
        rec["theta_rep"] = float(wrap_angle(p[1]))
        rec["winding"] = int(round((p[1] - rec["theta_rep"]) / (2 * math.pi)))
    return rec


def _emit_json(payload, path):
    text = json.dumps(payload, indent=2, sort_keys=True, allow_nan=True)
    if path and path != "-":
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _cmd_geodesic(args):
    spec = build_spec(args)
    rec = integrate_geodesic(spec, args.x, args.v, (0.0, args.tmax))
    ts = np.linspace(rec.domain[0], rec.domain[1], args.samples)
    rows = [[float(t)] + [float(c) for c in rec.position(t)] for t in ts]
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["t"] + [f"x{i}" for i in range(spec.dim)])
            wr.writerows(rows)
    else:
        _emit_json({"terminated_by": rec.terminated_by,
                    "energy_drift": rec.energy_drift,
                    "samples": rows}, args.json)
    return 0


def _cmd_distance(args):
    spec = build_spec(args)
    ms = connect(spec, args.x, args.y, ConnectOptions(seed=args.seed))
    payload = {
        "relation": ms.rel,
        "d": ms.d,
        "multiplicity": ms.multiplicity,
        "maximizers": [
            {"v0": [float(c) for c in m.v0], "length": m.length,
             **({"winding": m.winding} if m.winding is not None else {})}
            for m in ms.maximizers],
    }
    _emit_json(payload, args.json)
    return 0


def _cmd_cutlocus(args):
    spec = build_spec(args)
    res = cut_time(spec, args.x, args.v, horizon=args.horizon)
    payload = {"status": res.status, "t_max": res.t_max}
    if res.alpha is not None:
        payload["alpha"] = res.alpha
    if res.t_reach is not None:
        payload["t_reach"] = res.t_reach
    if res.status == "finite" and args.classify:
        cls = classify_cut(spec, args.x, args.v, res)
        payload["classification"] = {
            "kind": cls.kind,
            "multiplicity": cls.multiplicity,
            "cut_point": _point_record(spec, cls.cut_point),
        }
        if cls.conjugate_parameter is not None:
            payload["classification"]["conjugate_parameter"] = \
                cls.conjugate_parameter
    _emit_json(payload, args.json)
    return 0


def _cmd_aubry(args):
    spec = build_spec(args)
    verdict = in_future_aubry(spec, args.x, args.v, horizon=args.horizon)
    payload = {"status": verdict.status, "t_checked": verdict.t_checked}
    if verdict.alpha is not None:
        payload["alpha"] = verdict.alpha
    if verdict.t_reach is not None:
        payload["t_reach"] = verdict.t_reach
    _emit_json(payload, args.json)
    return 0


def _cmd_lo(args):
    spec = build_spec(args)
    opts = LOOptions(C0=args.c0, s_max=args.s_max)
    rv = regularized_value(spec, args.t, args.s, args.x, args.y, opts)
    rep = sandwich_check(spec, args.t, args.s, args.x, args.y, options=opts)
    payload = {
        "value": rv.value,
        "argmax": _point_record(spec, rv.argmax),
        "multiple_flag": rv.multiple_flag,
        "search_radius": rv.radius,
        "sandwich": {"lower": rep.lower, "upper": rep.upper,
                     "lower_ok": rep.lower_ok, "upper_ok": rep.upper_ok},
    }
    _emit_json(payload, args.json)
    return 0


def _cmd_retract(args):
    spec = build_spec(args)
    trace = sample_trace(spec, args.x, args.y, args.mode,
                         n=args.tau_samples, eps=args.eps)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            wr = csv.writer(fh)
            if isinstance(trace.images[0], tuple):
                hdr = (["tau"] + [f"a{i}" for i in range(spec.dim)]
                       + [f"b{i}" for i in range(spec.dim)])
                wr.writerow(hdr)
                for tau, (a, b) in zip(trace.taus, trace.images):
                    wr.writerow([float(tau)] + [float(c) for c in a]
                                + [float(c) for c in b])
            else:
                wr.writerow(["tau"] + [f"x{i}" for i in range(spec.dim)])
                for tau, im in zip(trace.taus, trace.images):
                    wr.writerow([float(tau)] + [float(c) for c in im])
    else:
        images = []
        for im in trace.images:
            if isinstance(im, tuple):
                images.append([_point_record(spec, im[0]),
                               _point_record(spec, im[1])])
            else:
                images.append(_point_record(spec, im))
        _emit_json({"mode": args.mode, "max_step": trace.max_step,
                    "taus": [float(t) for t in trace.taus],
                    "images": images}, args.json)
    return 0


def _cmd_verify(args):
    if args.suite == "all":
        indices = None
    else:
        indices = [int(tok) for tok in args.suite.split(",")]
    results = verify_mod.run_suite(indices, seed=args.seed)
    all_ok = True
    for r in results:
        mark = "PASS" if r.ok else "FAIL"
        print(f"[{mark}] criterion {r.index:2d} ({r.name}): "
              f"{r.detail} [{r.elapsed:.1f}s]")
        all_ok &= r.ok
    if args.json:
        _emit_json({"results": [
            {"index": r.index, "name": r.name, "ok": r.ok,
             "detail": r.detail, "elapsed": r.elapsed} for r in results],
            "all_ok": all_ok}, args.json)
    return 0 if all_ok else 1


def _add_common(p):
    p.add_argument("--metric", default="cylinder",
                   help="minkowski2|minkowski3|cylinder|warped:<profile>")
    p.add_argument("--t-domain", default=None,
                   help="open t slab 'lo,hi' for warped metrics")
    p.add_argument("--winding-bound", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", nargs="?", const="-", default="-",
                   help="JSON output path ('-' for stdout)")


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="lorkam",
        description="Lorentzian distance, cut loci, Aubry sets and "
                    "regularized Lax-Oleinik evolution on model spacetimes")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("geodesic", help="integrate a geodesic")
    _add_common(p)
    p.add_argument("--x", type=_parse_point, required=True)
    p.add_argument("--v", type=_parse_point, required=True)
    p.add_argument("--tmax", type=float, required=True)
    p.add_argument("--samples", type=int, default=101)
    p.add_argument("--csv", default=None)
    p.set_defaults(fn=_cmd_geodesic)

    p = sub.add_parser("distance", help="distance and maximizing geodesics")
    _add_common(p)
    p.add_argument("--x", type=_parse_point, required=True)
    p.add_argument("--y", type=_parse_point, required=True)
    p.set_defaults(fn=_cmd_distance)

    p = sub.add_parser("cutlocus", help="cut time along a direction")
    _add_common(p)
    p.add_argument("--x", type=_parse_point, required=True)
    p.add_argument("--v", type=_parse_point, required=True)
    p.add_argument("--horizon", type=float, default=64.0)
    p.add_argument("--classify", action="store_true")
    p.set_defaults(fn=_cmd_cutlocus)

    p = sub.add_parser("aubry", help="future Aubry membership of a ray")
    _add_common(p)
    p.add_argument("--x", type=_parse_point, required=True)
    p.add_argument("--v", type=_parse_point, required=True)
    p.add_argument("--horizon", type=float, default=64.0)
    p.set_defaults(fn=_cmd_aubry)

    p = sub.add_parser("lo", help="regularized value and sandwich check")
    _add_common(p)
    p.add_argument("--x", type=_parse_point, required=True)
    p.add_argument("--y", type=_parse_point, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--c0", type=float, default=10.0)
    p.add_argument("--s-max", type=float, default=0.1)
    p.set_defaults(fn=_cmd_lo)

    p = sub.add_parser("retract", help="sample a deformation retraction")
    _add_common(p)
    p.add_argument("--x", type=_parse_point, required=True)
    p.add_argument("--y", type=_parse_point, required=True)
    p.add_argument("--mode", choices=["point", "pair", "cut2nu"],
                   default="point")
    p.add_argument("--tau-samples", type=int, default=21)
    p.add_argument("--eps", type=float, default=1.0)
    p.add_argument("--csv", default=None)
    p.set_defaults(fn=_cmd_retract)

    p = sub.add_parser("verify", help="run the verification suite")
    p.add_argument("--suite", default="all",
                   help="'all' or comma-separated criterion indices")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--json", nargs="?", const="-", default=None)
    p.set_defaults(fn=_cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return _USAGE_EXIT if exc.code not in (0,) else 0
    try:
        return args.fn(args)
    except _DOMAIN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _DOMAIN_EXIT
    except _SOLVER_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _SOLVER_EXIT
    except LorkamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _SOLVER_EXIT


if __name__ == "__main__":
    sys.exit(main())
