"""Command line entry point.

Subcommands: cf, trace, shrink, halfnbhd, orbifold, render-julia, render-param.
Every run writes a JSON sidecar with the full effective configuration; a flat
key=value config file can pre-seed flags, and explicit flags win.  Exit codes:
0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import cmath
import csv
import json
import math
import os
import sys

import numpy as np

from . import hypgeom, orbifold, pullback, render, rotation, siegel
from .maps import ExpAffine, MapFamily, Sine, ZExp

OUT_DIR_ENV = "SIEGELLAB_OUT"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _parse_theta(text: str) -> float:
    if text == "golden":
        return rotation.GOLDEN_MEAN
    if text.startswith("["):
        # continued fraction term list, e.g. [0;1,2,1,2]
        body = text.strip("[]")
        head, _, tail = body.partition(";")
        terms = [int(head)] + [int(t) for t in tail.split(",") if t]
        cf = rotation.ContinuedFraction(terms[0], tuple(terms[1:]), 0.0)
        return float(rotation.reconstruct(cf))
    return float(text)


def _parse_complex(text: str) -> complex:
    return complex(text.replace(" ", "").replace("i", "j"))


def _family(args) -> MapFamily:
    if args.family == "sine":
        return Sine(_parse_theta(args.theta))
    if args.family == "zexp":
        return ZExp(_parse_complex(args.lam))
    if args.family == "expaffine":
        return ExpAffine(_parse_complex(args.lam))
    raise _UsageError(f"unknown family {args.family!r}")


def _out_path(args, name: str) -> str:
    base = getattr(args, "out", None) or name
    outdir = os.environ.get(OUT_DIR_ENV)
    if outdir and not os.path.isabs(base):
        base = os.path.join(outdir, base)
    return base


def _write_sidecar(path: str, config: dict) -> None:
    with open(path, "w") as fh:
        json.dump(config, fh, indent=2, sort_keys=True)


def _apply_config_file(argv: list[str]) -> list[str]:
    """Prepend key=value pairs from --config FILE as defaults (flags win)."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise _UsageError("--config needs a file argument")
    path = argv[i + 1]
    rest = argv[:i] + argv[i + 2:]
    extra = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            extra.append(f"--{key.strip()}")
            extra.append(value.strip())
    # defaults go right after the subcommand so later flags override them
    if rest and not rest[0].startswith("-"):
        return [rest[0]] + extra + rest[1:]
    return extra + rest


def build_parser() -> _Parser:
    p = _Parser(prog="siegellab")
    sub = p.add_subparsers(dest="command", required=True)

    cf = sub.add_parser("cf", help="continued fraction expansion and convergents")
    cf.add_argument("--x", required=True)
    cf.add_argument("--terms", type=int, default=20)
    cf.add_argument("--bound", type=int, default=None)
    cf.add_argument("--out", default=None)

    tr = sub.add_parser("trace", help="trace a boundary orbit and measure its rotation number")
    _family_flags(tr)
    tr.add_argument("--seed", default="cv", help="'cv' for the critical value, or a complex")
    tr.add_argument("--n", type=int, default=100000)
    tr.add_argument("--escape-radius", type=float, default=10.0)
    tr.add_argument("--out", default="trace.csv")

    sh = sub.add_parser("shrink", help="randomized pullback chain diameter experiment")
    _family_flags(sh)
    sh.add_argument("--center", default=None, help="disk center (complex); default: auto")
    sh.add_argument("--radius", type=float, default=0.1)
    sh.add_argument("--vertices", type=int, default=96)
    sh.add_argument("--chains", type=int, default=50)
    sh.add_argument("--depth", type=int, default=25)
    sh.add_argument("--epsilon", type=float, default=0.02)
    sh.add_argument("--seed", "--rng-seed", dest="rng_seed", type=int, default=1)
    sh.add_argument("--threads", type=int, default=1)
    sh.add_argument("--out", default="shrink.json")
    sh.add_argument("--csv", default=None, help="optional CSV of per-level diameters")

    hn = sub.add_parser("halfnbhd", help="half hyperbolic neighborhood boundary arcs")
    hn.add_argument("--phi1", type=float, required=True)
    hn.add_argument("--phi2", type=float, required=True)
    hn.add_argument("--d", type=float, required=True)
    hn.add_argument("--arc-points", type=int, default=128)
    hn.add_argument("--out", default="halfnbhd.json")

    ob = sub.add_parser("orbifold", help="ramification weights of an orbit portrait")
    ob.add_argument("--portrait", required=True, help="JSON file: nodes/next/degree/cycle")
    ob.add_argument("--out", default=None)

    rj = sub.add_parser("render-julia", help="dynamical plane raster")
    _family_flags(rj)
    _render_flags(rj)
    rj.add_argument("--traps", default=None,
                    help="semicolon list of cx,cy,r trap disks")

    rp = sub.add_parser("render-param", help="parameter plane of lambda z e^z")
    _render_flags(rp)
    return p


def _family_flags(p):
    p.add_argument("--family", default="sine", choices=["sine", "zexp", "expaffine"])
    p.add_argument("--theta", default="golden")
    p.add_argument("--lam", "--lambda", dest="lam", default="2")


def _render_flags(p):
    p.add_argument("--center", default=None)
    p.add_argument("--width", type=float, default=None)
    p.add_argument("--height", type=float, default=None)
    p.add_argument("--size", type=int, default=512)
    p.add_argument("--max-iter", type=int, default=render.DEFAULT_MAX_ITER)
    p.add_argument("--escape-radius", type=float, default=None)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default=None)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _apply_config_file(argv)
        parser = build_parser()
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return _dispatch(args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _dispatch(args) -> int:
    cmd = args.command.replace("-", "_")
    return globals()[f"_cmd_{cmd}"](args)


def _cmd_cf(args) -> int:
    x = _parse_theta(args.x)
    cf = rotation.cf_expand(x, args.terms)
    conv = rotation.convergents(cf)
    writer = csv.writer(sys.stdout)
    print(cf)
    writer.writerow(["k", "a_k", "p_k", "q_k"])
    terms = cf.terms
    for k, (p, q) in enumerate(conv):
        writer.writerow([k, terms[k] if k < len(terms) else "", p, q])
    if args.bound is not None:
        rep = rotation.is_bounded_type(cf, args.bound)
        print(f"bounded_type={rep.bounded} observed_max={rep.observed_max} depth={rep.depth}")
    return 0


def _cmd_trace(args) -> int:
    family = _family(args)
    if args.seed == "cv":
        sd = family.singular_data()
        cv = sd.critical_values
        seed = cv[0] if isinstance(cv, list) else cv.point(0)
    else:
        seed = _parse_complex(args.seed)
    orbit = siegel.trace_boundary(family, seed, args.n, args.escape_radius)
    path = _out_path(args, "trace.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "re", "im"])
        for i, z in enumerate(orbit.points):
            w.writerow([i, z.real, z.imag])
    summary = {"escaped": orbit.escaped, "n": args.n,
               "seed": [seed.real, seed.imag], "family": family.name}
    if not orbit.escaped:
        meas = siegel.measure_rotation_number(orbit)
        summary["rotation_number"] = meas.value
        summary["error_bound"] = meas.error_bound
    _write_sidecar(path + ".json", {**summary, "config": _plain_config(args)})
    print(json.dumps(summary))
    return 0


def _auto_disk_center(family, radius: float) -> complex:
    """Place the disk just outside the traced Siegel boundary (sine only)."""
    sd = family.singular_data()
    cv = sd.critical_values[0]
    orbit = siegel.trace_boundary(family, cv, 20000, 10.0)
    pts = orbit.points
    # boundary point far from both critical values, pushed outward radially
    dist_cv = np.minimum(np.abs(pts - sd.critical_values[0]),
                         np.abs(pts - sd.critical_values[1]))
    p = pts[int(np.argmax(dist_cv))]
    return complex(p * (1.0 + (radius + 0.02) / abs(p)))


def _cmd_shrink(args) -> int:
    family = _family(args)
    if args.center is None:
        center = _auto_disk_center(family, args.radius)
    else:
        center = _parse_complex(args.center)
    disk0 = pullback.JordanDiskApprox.circle(center, args.radius, args.vertices)
    report = pullback.shrink_experiment(family, disk0, args.chains, args.depth,
                                        args.epsilon, args.rng_seed,
                                        workers=args.threads)
    path = _out_path(args, "shrink.json")
    payload = {**report.to_dict(),
               "disk_center": [center.real, center.imag],
               "disk_radius": args.radius,
               "config": _plain_config(args)}
    _write_sidecar(path, payload)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["level", "min", "median", "max"])
            for lvl in range(len(report.per_level_max)):
                w.writerow([lvl, report.per_level_min[lvl], report.per_level_median[lvl],
                            report.per_level_max[lvl]])
    print(json.dumps(report.to_dict()))
    return 0


def _cmd_halfnbhd(args) -> int:
    interval = hypgeom.ArcInterval(args.phi1, args.phi2)
    hn = hypgeom.build_half_neighborhood(interval, args.d)
    path = _out_path(args, "halfnbhd.json")
    payload = {
        "interval": [interval.phi1, interval.phi2],
        "d": hn.d,
        "beta": hn.beta,
        "outer_arc": _arc_payload(hn.outer_arc, args.arc_points),
        "inner_arc": _arc_payload(hn.inner_arc, args.arc_points),
        "config": _plain_config(args),
    }
    _write_sidecar(path, payload)
    print(json.dumps({"d": hn.d, "beta": hn.beta}))
    return 0


def _arc_payload(arc, n):
    poly = arc.polyline(n)
    return {"center": [arc.center.real, arc.center.imag], "radius": arc.radius,
            "angle_start": arc.angle_start, "angle_end": arc.angle_end,
            "polyline": [[z.real, z.imag] for z in poly]}


def _cmd_orbifold(args) -> int:
    with open(args.portrait) as fh:
        portrait = orbifold.OrbitPortrait.from_json_dict(json.load(fh))
    nu = orbifold.compute_nu(portrait)
    nu_tilde = orbifold.pull_back_nu(portrait, nu)
    report = orbifold.check_covering(portrait, nu, nu_tilde)
    payload = {"nu": {str(k): v for k, v in nu.nu.items()},
               "nu_tilde": {str(k): v for k, v in nu_tilde.nu.items()},
               "covering": report.overall,
               "per_node": {str(k): v for k, v in report.per_node.items()}}
    print(json.dumps(payload, indent=2))
    if args.out:
        _write_sidecar(_out_path(args, args.out), {**payload, "config": _plain_config(args)})
    return 0


def _cmd_render_julia(args) -> int:
    family = _family(args)
    center = _parse_complex(args.center) if args.center else 0j
    width = args.width or 8.0
    height = args.height or width
    window = render.Window(center, width, height)
    traps = render.TrapSpec()
    if args.traps:
        disks = []
        for part in args.traps.split(";"):
            cx, cy, r = (float(t) for t in part.split(","))
            disks.append((complex(cx, cy), r))
        traps = render.TrapSpec(tuple(disks))
    raster = render.render_dynamical(family, window, args.size, args.size,
                                     max_iter=args.max_iter,
                                     escape_radius=args.escape_radius,
                                     traps=traps, workers=args.threads)
    path = _out_path(args, "julia.ppm")
    render.write_image(raster, path=path)
    print(json.dumps({"out": path, "size": [args.size, args.size]}))
    return 0


def _cmd_render_param(args) -> int:
    if args.center:
        center = _parse_complex(args.center)
        width = args.width or 1.2
        height = args.height or width
        window = render.Window(center, width, height)
    else:
        window = render.DEFAULT_PARAMETER_WINDOW
    raster = render.render_parameter(window, args.size, args.size,
                                     max_iter=args.max_iter,
                                     escape_radius=args.escape_radius or 1e6,
                                     workers=args.threads)
    path = _out_path(args, "param.ppm")
    render.write_image(raster, path=path)
    print(json.dumps({"out": path, "size": [args.size, args.size]}))
    return 0


def _plain_config(args) -> dict:
    return {k: v for k, v in vars(args).items() if k != "command" and v is not None}


if __name__ == "__main__":
    sys.exit(main())
