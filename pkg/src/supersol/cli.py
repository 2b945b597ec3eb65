"""Command-line front end: ``supersol <command> --config FILE``."""

import argparse
import math
import sys

import numpy as np

from . import __version__, bounds, classifier, config, io
from .errors import (
    InvalidRadius, InvalidSpec, NotApplicable, NotIntegrable, OutsideDomain, SupersolError,
)
from .geometry import Ball, Constant, sup_inradius
from .nonlinearity import QUAD_EPSABS, QUAD_EPSREL, f_norm_infinity
from .oracle import cone as cone_mod
from .oracle.grid import certify_supersolution
from .oracle.sampling import HOLDS_TOL, verify_theorem1

SCHEMA_VERSION = "1.0"

EXIT_OK = 0
EXIT_WARN = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

EPILOG = """\
config keys:
  problem.N, problem.p, f.family (power|sum|max|singular), f.q, f.r,
  weight.kind (constant|radial_power), weight.c, weight.beta,
  domain.shape (full|ball|exterior|annulus|cone2d), domain.R, domain.R1, domain.R2, domain.theta0,
  bound.center (comma list), bound.radii (comma list or start:stop:count),
  verify.a, verify.b, verify.pairs, verify.seed, verify.grid_n, verify.samples,
  cone.theta0, cone.q.  Angles accept pi, pi/8, 3*pi/4.

CSV written by `bound --csv`:
  r          radius of the ball B_r(x) around bound.center
  bound      lower bound for u(x) (integrable case) or upper bound for inf over B_r(x)
             (non-integrable case); nan when saturated
  saturated  1 when the bound argument reaches ||F||_inf, i.e. no positive
             non-flat supersolution can exist at that radius

exit codes: 0 success, 1 inconclusive or warnings, 2 invalid config, 3 numeric failure
"""


def _region(region):
    if region is None:
        return None
    return {
        "kind": region.kind, "threshold": region.threshold,
        "inner_radius": region.inner_radius, "outer_radius": region.outer_radius,
    }


def _classification(c):
    return {
        "verdict": c.verdict.value,
        "rule": c.certificate.rule,
        "checked_values": [[name, value] for name, value in c.certificate.checked_values],
        "notes": list(c.certificate.notes),
        "region": _region(c.region),
        "M": c.M,
    }


def run_classify(cfg, ctx):
    spec = config.build_spec(cfg)
    c = classifier.classify(spec)
    ctx["status"] = EXIT_WARN if c.verdict is classifier.Verdict.Inconclusive else EXIT_OK
    if ctx["status"]:
        ctx["diagnostics"].append("no applicable rule: verdict Inconclusive")
    return _classification(c)


def _center(cfg, N):
    c = cfg.get("bound.center")
    if c is None:
        return np.zeros(N)
    if len(c) != N:
        raise config.ConfigError(f"bound.center needs {N} coordinates")
    return np.asarray(c, dtype=float)


def run_bound(cfg, ctx):
    spec = config.build_spec(cfg)
    x = _center(cfg, spec.N)
    radii = cfg.require("bound.radii")
    curve = bounds.bound_curve(spec, x, radii)
    ctx["curve"] = curve
    rows = [{"r": r, "bound": v, "saturated": s} for r, v, s in io.bound_rows(curve)]
    if any(row["saturated"] for row in rows):
        ctx["diagnostics"].append("some radii are saturated: no non-flat positive supersolution there")
    ctx["provenance"]["tolerances"].update({"quad_epsabs": QUAD_EPSABS, "quad_epsrel": QUAD_EPSREL})
    return {"kind": curve.kind, "center": list(x), "rows": rows}


def run_deadcore(cfg, ctx):
    spec = config.build_spec(cfg)
    c = spec.weight.c if isinstance(spec.weight, Constant) else None
    if c is None:
        raise NotApplicable("dead-core threshold needs a constant weight")
    T = classifier.deadcore_threshold(spec.f, spec.p, spec.N, c)
    region = classifier.deadcore_region(spec.domain, T)
    if region.empty:
        ctx["diagnostics"].append("threshold exceeds the inradius: no forced dead core")
    return {
        "threshold": T, "F_norm_inf": f_norm_infinity(spec.f, spec.p), "alpha": bounds.alpha(spec.N, spec.p),
        "sup_inradius": sup_inradius(spec.domain), "region": _region(region),
        "notes": [classifier.COR1_NOTE],
    }


def run_verify(cfg, ctx):
    spec = config.build_spec(cfg)
    if not isinstance(spec.domain, Ball):
        raise config.ConfigError("verify works on domain.shape = ball")
    a, b, R = cfg.get("verify.a"), cfg.get("verify.b"), spec.domain.R
    if not (b > 0 and a - b * R * R > 0):
        raise config.ConfigError("verify needs b > 0 and a - b R^2 > 0 so that u is positive")

    def u(y):
        return a - b * np.sum(np.asarray(y) ** 2, axis=-1)

    half = R / math.sqrt(spec.N) * (1 - 1e-9)
    rep = certify_supersolution(spec, u, [-half] * spec.N, [half] * spec.N, n=cfg.get("verify.grid_n"))
    rng = np.random.default_rng(cfg.get("verify.seed"))
    n_pairs = cfg.get("verify.pairs")
    passed, margin = 0, math.inf
    for _ in range(n_pairs):
        d = rng.normal(size=spec.N)
        x = d / np.linalg.norm(d) * R * rng.uniform(0.0, 0.95) ** (1.0 / spec.N)
        r = rng.uniform(0.0, R - np.linalg.norm(x)) * (1 - 1e-9)
        chk = verify_theorem1(spec, u, x, r, n=cfg.get("verify.samples"))
        passed += chk.holds
        margin = min(margin, chk.lhs - chk.rhs)
    spot = verify_theorem1(spec, u, np.zeros(spec.N), R * (1 - 1e-12), n=cfg.get("verify.samples"))
    ok = rep.supersolution and passed == n_pairs and spot.holds
    ctx["status"] = EXIT_OK if ok else EXIT_WARN
    if not ok:
        ctx["diagnostics"].append("verification failed")
    ctx["provenance"]["tolerances"].update({"holds_tol": HOLDS_TOL, "residual_tol": rep.tol})
    return {
        "u": f"{io.fmt_float(a)} - {io.fmt_float(b)} |x|^2",
        "residual": {
            "min": rep.min, "max": rep.max, "linf": rep.linf, "tol": rep.tol, "h": rep.h,
            "exact_stencil": rep.exact, "certified": rep.supersolution,
        },
        "lower_bound_check": {
            "pairs": n_pairs, "passed": passed, "min_margin": margin,
            "spot": {"x": "origin", "r": R * (1 - 1e-12), "lhs": spot.lhs, "rhs": spot.rhs, "holds": spot.holds},
        },
    }


def run_cone(cfg, ctx):
    theta0, q = cfg.require("cone.theta0"), cfg.require("cone.q")
    sol = cone_mod.cone_example_solve(theta0, q)
    inner = sol.w.values[1:-1]
    ctx["provenance"]["iterations"]["bisection"] = sol.iterations
    ctx["provenance"]["tolerances"].update({"shoot_rtol": cone_mod.SHOOT_RTOL, "shoot_atol": cone_mod.SHOOT_ATOL})
    return {
        "theta0": sol.theta0, "q": sol.q, "beta_q": sol.beta_q, "lambda1": sol.lambda1,
        "slope": sol.slope, "boundary_defect": sol.boundary_defect, "energy": sol.energy,
        "symmetry_defect": sol.symmetry_defect, "w_max": float(inner.max()),
        "w_positive": bool(np.all(inner > 0)),
        "residual": {"h": list(sol.residual.hs), "relative": list(sol.residual.relative), "orders": list(sol.residual.orders)},
    }


COMMANDS = {
    "classify": run_classify, "bound": run_bound, "deadcore": run_deadcore,
    "verify": run_verify, "cone-example": run_cone,
}


def build_parser():
    ap = argparse.ArgumentParser(
        prog="supersol", description="Bounds, Liouville classification and numerical checks for -Lap u >= rho f(u)|grad u|^p.",
        epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", required=True, help="flat key = value configuration file")
    ap.add_argument("--out", help="JSON report path (default: stdout)")
    ap.add_argument("--csv", help="bound only: CSV with columns r,bound,saturated")
    ap.add_argument("--svg", help="bound only: SVG polyline of the bound curve")
    ap.add_argument("--version", action="version", version=__version__)
    return ap


def run(command, cfg):
    """Execute a command on a parsed config; returns (report, exit code, context)."""
    ctx = {"status": EXIT_OK, "diagnostics": [], "provenance": {"tolerances": {}, "iterations": {}}}
    report = {
        "schema_version": SCHEMA_VERSION, "command": command, "config": cfg.echo(),
        "result": None, "diagnostics": ctx["diagnostics"],
    }
    try:
        if cfg.command is not None and cfg.command != command:
            raise config.ConfigError(f"config is for {cfg.command!r}, not {command!r}")
        report["result"] = COMMANDS[command](cfg, ctx)
        code = ctx["status"]
    except (InvalidSpec, InvalidRadius, OutsideDomain) as exc:
        ctx["diagnostics"].append(f"invalid config: {exc}")
        code = EXIT_CONFIG
    except (NotApplicable, NotIntegrable) as exc:
        ctx["diagnostics"].append(f"not applicable: {exc}")
        code = EXIT_WARN
    except (SupersolError, ArithmeticError) as exc:
        ctx["diagnostics"].append(f"numeric failure: {type(exc).__name__}: {exc}")
        code = EXIT_NUMERIC
    report["provenance"] = {"version": __version__, **ctx["provenance"]}
    report["exit_code"] = code
    return report, code, ctx


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = config.load(args.config)
    except (InvalidSpec, OSError) as exc:
        print(f"supersol: invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    report, code, ctx = run(args.command, cfg)
    text = io.dumps_json(report) + "\n"
    if args.out:
        io.write_text(args.out, text)
    else:
        sys.stdout.write(text)
    curve = ctx.get("curve")
    if curve is not None:
        if args.csv:
            io.write_bound_csv(args.csv, curve)
        if args.svg:
            io.write_text(args.svg, io.bound_curve_svg(curve))
    for d in ctx["diagnostics"]:
        print(f"supersol: {d}", file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
