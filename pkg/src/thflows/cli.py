"""Command-line front end.

    thflows bott --a 0.3 --method quadrature
    thflows monodromy --spec '{"family":"discrete","n":2,"lambda":1}'
    thflows seifert --a 2/3
    thflows verify --spec '{"family":"discrete","n":2,"lambda":1}' --points 1000

Exit codes: 0 success, 2 invalid input, 3 numerical or I/O failure.
JSON floats are written with repr, which round-trips every double exactly.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np

from . import __version__
from .covers import (
    covered_leaf_constants,
    phi_n,
    pullback_residual,
    random_sigma_point,
    sigma_tangent,
    solve_zeta,
)
from .forms import PointS3, hopf_point, random_points
from .invariants import (
    LEAF1,
    LEAF2,
    bott_closed_result,
    bott_quadrature,
    monodromy_closed_result,
    monodromy_numeric,
    recover_parameter,
)
from .leaves import count_petals, petal_curves, trace_constants, trace_leaf
from .models import (
    FoliationSpec,
    SpecError,
    c4_residuals,
    cartan_residual,
    integrability_residual,
    kernel_multiplier_batch,
    kernel_vector,
    omega_on_kernel,
)
from .ode import IntegrationError
from .seifert import ArithmeticInputError, descend_lens, from_rational_a
from . import svg

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


class InputError(ValueError):
    pass


# ---------------------------------------------------------------------------
# parsing helpers


def parse_complex(text) -> complex:
    """Accept 0.3, 2/3, 0.5+0.2i, 0.5+0.2j, [re, im] or "re,im"."""
    if isinstance(text, (int, float)):
        return complex(text)
    if isinstance(text, (list, tuple)):
        if len(text) != 2:
            raise InputError(f"complex as a list needs [re, im], got {text!r}")
        return complex(float(text[0]), float(text[1]))
    s = str(text).strip().replace(" ", "")
    if s.startswith("["):
        try:
            return parse_complex(json.loads(s))
        except json.JSONDecodeError:
            raise InputError(f"cannot parse {text!r}") from None
    if "," in s:
        re_, im_ = s.split(",", 1)
        return complex(float(re_), float(im_))
    if "/" in s and not any(c in s for c in "ij"):
        try:
            return complex(float(Fraction(s)))
        except (ValueError, ZeroDivisionError):
            raise InputError(f"cannot parse {text!r}") from None
    try:
        return complex(s.replace("i", "j"))
    except ValueError:
        raise InputError(f"cannot parse complex number {text!r}") from None


def parse_triple(text, kind=float):
    if isinstance(text, (list, tuple)):
        vals = list(text)
    else:
        vals = str(text).split(",")
    if len(vals) != 3:
        raise InputError(f"expected three comma-separated values, got {text!r}")
    try:
        return tuple(kind(v) for v in vals)
    except ValueError:
        raise InputError(f"cannot parse {text!r}") from None


def spec_from_args(args) -> FoliationSpec:
    given = [x is not None for x in (args.spec, args.a, args.n)]
    if sum(given) != 1:
        raise InputError("give exactly one of --spec, --a, --n")
    if args.spec is not None:
        if isinstance(args.spec, dict):
            return FoliationSpec.from_dict(args.spec)
        return FoliationSpec.from_json(args.spec)
    if args.a is not None:
        return FoliationSpec.parametric(parse_complex(args.a))
    lam = 1.0 if args.lam is None else float(args.lam)
    return FoliationSpec.discrete(int(args.n), lam)


def _c(z):
    z = complex(z)
    return [z.real, z.imag]


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=True) + "\n"


def _emit(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _check_range(name, value, lo, hi):
    if not (lo <= value <= hi):
        raise InputError(f"{name} must lie in [{lo:g}, {hi:g}], got {value}")


def _map(workers):
    if workers and workers > 1:
        pool = ProcessPoolExecutor(max_workers=workers)
        return pool, pool.map
    return None, map


# ---------------------------------------------------------------------------
# verification report


THRESHOLD = 1e-10


def verify_all(spec: FoliationSpec, n_points: int = 1000, seed: int = 0) -> dict:
    """Max residual of every pointwise identity over seeded random points of S^3.

    Checks flagged ``informational`` are reported but never fail the run
    (the Cartan identity holds only for real a; the contact sign only
    inside 0 < Re a < 1).
    """
    if n_points < 1:
        raise InputError("n_points must be >= 1")
    rng = np.random.default_rng(seed)
    z1, z2 = random_points(n_points, rng)
    Y1, Y2 = kernel_vector(spec, z1, z2)
    h, mres = kernel_multiplier_batch(spec, z1, z2)
    r1, r2 = c4_residuals(spec, (z1, z2))
    checks = []

    def add(name, value, required=True, expect_zero=True, note=None):
        value = float(value)
        ok = value < THRESHOLD if expect_zero else value >= THRESHOLD
        entry = {"check": name, "max": value, "threshold": THRESHOLD}
        if required:
            entry["status"] = "PASS" if ok else "FAIL"
        else:
            entry["status"] = "PASS" if ok else "FAIL-as-expected"
            entry["informational"] = True
        if note:
            entry["note"] = note
        checks.append(entry)

    add("integrability", np.max(integrability_residual(spec, (z1, z2))))
    add("c4_first", np.max(r1))
    add("c4_second", np.max(r2))
    cart = np.max(cartan_residual(spec, (z1, z2)))
    real_a = spec.is_parametric and spec.a.imag == 0.0
    add("cartan", cart, required=real_a,
        note=None if real_a else "Cartan identity expected only for real a")
    add("omega_on_kernel", np.max(omega_on_kernel(spec, (z1, z2))))
    add("kernel_tangency", np.max(np.abs((Y1 * np.conj(z1) + Y2 * np.conj(z2)).real)))
    add("kernel_multiplier", np.max(mres))
    g = h.imag
    sign_const = bool(np.all(g > 0) or np.all(g < 0))
    contact = spec.is_parametric is False or 0 < spec.a.real < 1
    checks.append({
        "check": "contact_sign",
        "min_im_h": float(np.min(g)),
        "max_im_h": float(np.max(g)),
        "status": "PASS" if sign_const else ("FAIL" if contact else "FAIL-as-expected"),
        **({} if contact else {"informational": True}),
    })
    if not spec.is_parametric and spec.lam == 1.0:
        worst = 0.0
        for _ in range(min(n_points, 200)):
            p = random_sigma_point(spec.n, rng)
            v = sigma_tangent(spec.n, p.z1, p.z2, tuple(complex(*rng.standard_normal(2)) for _ in range(2)))
            worst = max(worst, pullback_residual(spec.n, p, v))
        add("cover_pullback", worst)
    failed = [c["check"] for c in checks if c["status"] == "FAIL"]
    return {
        "spec": spec.to_dict(),
        "points": n_points,
        "seed": seed,
        "checks": checks,
        "passed": not failed,
        "failed": failed,
    }


# ---------------------------------------------------------------------------
# subcommands


def cmd_bott(args):
    spec = spec_from_args(args)
    if args.method == "closed_form":
        res = bott_closed_result(spec, args.normalization)
    else:
        if args.method == "quadrature" and not spec.is_parametric:
            source = "generic"
        else:
            source = "analytic" if args.method == "quadrature" else "generic"
        grid = parse_triple(args.grid, int) if args.grid is not None else None
        res = bott_quadrature(spec, grid, source, args.step, args.normalization)
    out = {"spec": spec.to_dict(), **res.to_dict()}
    return dump_json(out)


def cmd_monodromy(args):
    spec = spec_from_args(args)
    leaf = {"1": LEAF1, "2": LEAF2}[str(args.leaf)]
    if args.method == "closed_form":
        res = monodromy_closed_result(spec, leaf)
        out = {"spec": spec.to_dict(), **res.to_dict(), "error_estimate": 0.0, "grid": None}
    else:
        _check_range("z0", args.z0, 1e-4, 1e-1)
        _check_range("ode_tol", args.ode_tol, 1e-12, 1e-6)
        res = monodromy_numeric(spec, leaf, args.z0, args.ode_tol, extrapolate=not args.no_extrapolate)
        est = abs(res.samples[0] - res.samples[-1]) if len(res.samples) > 1 else float("nan")
        out = {
            "spec": spec.to_dict(), **res.to_dict(),
            "error_estimate": est,
            "grid": None,
            "seed_radii": [args.z0, args.z0 / 2] if len(res.samples) > 1 else [args.z0],
            "raw": [_c(s) for s in res.samples],
        }
    return dump_json(out)


def cmd_recover(args):
    value = parse_complex(args.bott)
    rec = recover_parameter(value)
    return dump_json({"bott": _c(value), **rec.to_dict(), "none": rec.empty})


def _trace_from_args(args):
    spec = spec_from_args(args)
    _check_range("ode_tol", args.ode_tol, 1e-12, 1e-6)
    eta, t1, t2 = parse_triple(args.p0)
    _check_range("eta", eta, 0.0, math.pi / 2)
    p0 = hopf_point(eta, t1, t2)
    if args.advance is not None:
        j, delta = args.advance.split(",")
        until = (int(j), float(delta))
        direction = 1 if until[1] > 0 else -1
        if until[0] not in (1, 2):
            raise InputError("--advance lift index must be 1 or 2")
        tr = trace_leaf(spec, p0, args.t_max, args.ode_tol, until_lift=until, direction=direction)
    else:
        if args.t_max is None:
            raise InputError("give --t-max or --advance")
        tr = trace_leaf(spec, p0, args.t_max, args.ode_tol)
    return spec, tr


def cmd_trace(args):
    spec, tr = _trace_from_args(args)
    try:
        c = trace_constants(tr)
        drift = np.max(np.abs(c - c[0]), axis=1)
    except Exception:
        drift = np.full(len(tr), np.nan)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "x1", "y1", "x2", "y2", "theta1_lift", "theta2_lift", "drift"])
    for k in range(len(tr)):
        a, b = tr.z1[k], tr.z2[k]
        w.writerow([repr(float(v)) for v in (tr.t[k], a.real, a.imag, b.real, b.imag,
                                             tr.theta1_lift[k], tr.theta2_lift[k], drift[k])])
    if args.svg:
        meta = {"command": "trace", "spec": spec.to_json(), "p0": args.p0,
                "ode_tol": args.ode_tol, "samples": len(tr)}
        _emit(svg.render(svg.trace_panels(tr), meta), args.svg)
    return buf.getvalue()


def cmd_petals(args):
    if args.n < 1:
        raise InputError("n must be >= 1")
    _check_range("ode_tol", args.ode_tol, 1e-12, 1e-6)
    _check_range("radius", args.radius, 1e-4, 0.3)
    pool, mapper = _map(args.workers)
    try:
        rep = count_petals(args.n, args.seeds, args.iterations, args.ode_tol, args.radius,
                           detailed=True, mapper=mapper)
    finally:
        if pool:
            pool.shutdown()
    return dump_json(rep.to_dict())


def cmd_seifert(args):
    if (args.a is None) == (args.k is None):
        raise InputError("give exactly one of --a or --k")
    if args.a is not None:
        data = from_rational_a(args.a if "/" in str(args.a) else float(args.a))
        out = {"a": str(args.a), **data.to_dict(), "euler_number": str(data.euler_number())}
    else:
        vals = str(args.k).split(",")
        if len(vals) != 2:
            raise InputError("--k needs k1,k2")
        try:
            k1, k2 = int(vals[0]), int(vals[1])
        except ValueError:
            raise InputError(f"--k needs integers, got {args.k!r}") from None
        out = descend_lens(k1, k2).to_dict()
    return dump_json(out)


def cmd_cover(args):
    n = args.n
    if n < 1:
        raise InputError("n must be >= 1")
    if args.points < 1:
        raise InputError("points must be >= 1")
    rng = np.random.default_rng(args.seed)
    pull = 0.0
    for _ in range(args.points):
        p = random_sigma_point(n, rng)
        v = sigma_tangent(n, p.z1, p.z2, tuple(complex(*rng.standard_normal(2)) for _ in range(2)))
        pull = max(pull, pullback_residual(n, p, v))
    z1, z2 = random_points(args.points, rng)
    zres, sig, iters, zetas = 0.0, 0.0, [], []
    for a, b in zip(z1, z2):
        p = PointS3(a, b)
        r = solve_zeta(n, p, detailed=True)
        zres = max(zres, r.residual)
        iters.append(r.iterations)
        zetas.append(r.zeta)
        sig = max(sig, phi_n(n, p).residual())
    tr = trace_leaf(FoliationSpec.discrete(n), hopf_point(0.6, 0.3, 1.1), until_lift=(1, 4 * math.pi))
    c = covered_leaf_constants(n, tr)
    leaf = float(np.max(np.abs(c - c[0])))
    return dump_json({
        "n": n,
        "points": args.points,
        "seed": args.seed,
        "max_residuals": {"pullback": pull, "zeta": zres, "sigma_n": sig, "covered_leaf_constants": leaf},
        "zeta_stats": {"min": float(min(zetas)), "max": float(max(zetas)),
                       "mean_iterations": float(np.mean(iters)), "max_iterations": int(max(iters))},
    })


def cmd_verify(args):
    spec = spec_from_args(args)
    rep = verify_all(spec, args.points, args.seed)
    return dump_json(rep), (EXIT_OK if rep["passed"] else EXIT_NUMERIC)


def cmd_plot(args):
    if args.out is None:
        raise InputError("plot needs --out")
    if args.kind == "petal_curves":
        if args.n is None or args.n < 1:
            raise InputError("petal_curves needs --n >= 1")
        c1s = [float(x) for x in str(args.c1).split(",")]
        series = []
        for c1 in c1s:
            series.extend(petal_curves(args.n, c1, args.samples))
        panels = [{"series": series, "title": f"petal curves, n = {args.n}", "xlabel": "Re z2",
                   "ylabel": "Im z2", "xlim": (-1, 1), "ylim": (-1, 1), "equal": True}]
        meta = {"command": "plot petal_curves", "n": args.n, "c1": args.c1, "samples": args.samples}
    else:
        spec, tr = _trace_from_args(args)
        panels = svg.trace_panels(tr)
        meta = {"command": "plot trace", "spec": spec.to_json(), "p0": args.p0, "ode_tol": args.ode_tol}
    _emit(svg.render(panels, meta), args.out)
    return dump_json({"written": args.out})


# ---------------------------------------------------------------------------
# argparse


def _spec_args(p, discrete_n=True):
    p.add_argument("--spec", help='JSON, e.g. {"family":"parametric","a":[0.3,0]}')
    p.add_argument("--a", help="parametric a, e.g. 0.3, 0.5+0.2i, 2/3")
    if discrete_n:
        p.add_argument("--n", type=int, help="discrete family index n")
        p.add_argument("--lambda", dest="lam", type=float, help="homotopy parameter (default 1)")


def _trace_args(p):
    p.add_argument("--p0", default="0.6,0.3,1.1", help="seed in Hopf coordinates eta,theta1,theta2 (radians)")
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--advance", help="stop when lift j advanced by delta: 'j,delta'")
    p.add_argument("--ode-tol", dest="ode_tol", type=float, default=1e-10)


def build_parser():
    parser = argparse.ArgumentParser(prog="thflows", description="Transversely holomorphic flows on S^3.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with option values (flags win)")
    common.add_argument("--output", "-o", help="output file (default stdout)")
    common.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("bott", parents=[common], help="Bott invariant")
    _spec_args(p)
    p.add_argument("--method", choices=["closed_form", "quadrature", "generic"], default="closed_form")
    p.add_argument("--grid", help="n_eta,n_theta1,n_theta2")
    p.add_argument("--step", type=float, default=1e-5, help="finite-difference step for the generic pipeline")
    p.add_argument("--normalization", choices=["standard", "two_pi_i"], default="standard")
    p.set_defaults(func=cmd_bott)

    p = sub.add_parser("monodromy", parents=[common], help="logarithmic monodromy of a Hopf circle")
    _spec_args(p)
    p.add_argument("--leaf", choices=["1", "2"], default="1")
    p.add_argument("--method", choices=["closed_form", "numeric"], default="numeric")
    p.add_argument("--z0", type=float, default=1e-2)
    p.add_argument("--ode-tol", dest="ode_tol", type=float, default=1e-12)
    p.add_argument("--no-extrapolate", dest="no_extrapolate", action="store_true")
    p.set_defaults(func=cmd_monodromy)

    p = sub.add_parser("recover", parents=[common], help="recover a (or n) from a Bott value")
    p.add_argument("--bott", required=True)
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("trace", parents=[common], help="trace a leaf, CSV output")
    _spec_args(p)
    _trace_args(p)
    p.add_argument("--svg", help="also write SVG projections here")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("petals", parents=[common], help="count Leau-Fatou petals")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seeds", type=int)
    p.add_argument("--iterations", type=int)
    p.add_argument("--radius", type=float, default=0.05)
    p.add_argument("--ode-tol", dest="ode_tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_petals)

    p = sub.add_parser("seifert", parents=[common], help="Seifert invariants or lens descent")
    p.add_argument("--a", help="rational a in (0,1), e.g. 2/3")
    p.add_argument("--k", help="k1,k2 for the lens-space descent")
    p.set_defaults(func=cmd_seifert)

    p = sub.add_parser("cover", parents=[common], help="verify the branched cover identities")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("verify", parents=[common], help="residual report for a spec")
    _spec_args(p)
    p.add_argument("--points", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("plot", parents=[common], help="SVG figures")
    p.add_argument("kind", choices=["petal_curves", "trace"])
    _spec_args(p)
    _trace_args(p)
    p.add_argument("--c1", default="-1,0,1", help="comma-separated leaf constants c1")
    p.add_argument("--samples", type=int, default=400)
    p.add_argument("--out")
    p.set_defaults(func=cmd_plot)
    return parser


_NEVER_CONFIGURABLE = {"command", "func", "config"}


def _apply_config(parser, argv):
    """Re-parse with config-file values as defaults so explicit flags win."""
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    try:
        with open(args.config, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise OSError(f"cannot read config {args.config}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"config {args.config} is not valid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise InputError("config must be a JSON object")
    subparser = parser._subparsers._group_actions[0].choices[args.command]
    allowed = {a.dest for a in subparser._actions} - _NEVER_CONFIGURABLE - {"help"}
    unknown = sorted(set(cfg) - allowed)
    if unknown:
        raise InputError(f"unknown config keys for {args.command}: {unknown}")
    if isinstance(cfg.get("spec"), dict):
        cfg["spec"] = json.dumps(cfg["spec"])
    subparser.set_defaults(**cfg)
    return parser.parse_args(argv)


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
    except SystemExit as exc:  # argparse usage errors
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    except (InputError, SpecError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    try:
        result = args.func(args)
        text, code = result if isinstance(result, tuple) else (result, EXIT_OK)
        _emit(text, args.output)
        if code != EXIT_OK:
            print("error: verification failed", file=sys.stderr)
            return code
    except (InputError, SpecError, ArithmeticInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (IntegrationError, ArithmeticError, FloatingPointError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
