"""Command line: ``eigengrad {bounds,solve,fpt,verify,report}``.

Exit codes: 0 pass, 1 check failure, 2 usage/config error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import bounds as bc
from .domains import cd_constant, make_ball, make_circle, make_interval
from .eigensolver import boundary_gradient, gradient_ratio, solve
from .montecarlo import MCConfig, martingale_check, simulate_fpt
from .report import SandwichRow, VerificationReport

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class ConfigError(Exception):
    pass


def _positive(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _poly(coeffs):
    c = [float(a) for a in coeffs]
    V = np.polynomial.Polynomial(c)
    return V, V.deriv(1), V.deriv(2)


def build_domain(cfg):
    kind = cfg.get("kind")
    nodes = int(cfg.get("nodes", 4096))
    if kind == "interval":
        L = float(cfg.get("L", math.pi))
        if "V" in cfg:
            V, dV, d2V = _poly(cfg["V"])
            return make_interval(L, V, dV, d2V, nodes=nodes)
        return make_interval(L, nodes=nodes)
    if kind == "ball":
        return make_ball(int(cfg.get("d", 2)), float(cfg.get("R", 1.0)), nodes=nodes)
    if kind == "circle":
        return make_circle(float(cfg.get("L", 2 * math.pi)), nodes=nodes)
    raise ConfigError(f"unknown domain kind {kind!r}")


def load_config(path):
    try:
        with open(path, "rb") as fh:
            cfg = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(str(exc)) from exc
    if "domain" not in cfg:
        raise ConfigError("config needs a [domain] table")
    problem = cfg.setdefault("problem", {})
    bcond = problem.setdefault("bc", "closed" if cfg["domain"].get("kind") == "circle"
                               else "dirichlet")
    if bcond not in ("dirichlet", "neumann", "closed"):
        raise ConfigError(f"unknown boundary condition {bcond!r}")
    if int(problem.setdefault("modes", 5)) < 1:
        raise ConfigError("modes must be >= 1")
    for v in problem.get("variants", []):
        if v not in bc.DIRICHLET_VARIANTS:
            raise ConfigError(f"unknown variant {v!r}")
    return cfg


def geometry_for(spec, curv, problem, overrides):
    d = spec.dim
    n = float(problem.get("n", d if not spec.has_drift else d + 1))
    K = cd_constant(spec, n)
    fields = dict(d=d, n=n, K=K, K_V=curv.K_V, theta=curv.theta, delta=curv.delta,
                  alpha=curv.alpha)
    for key, val in overrides.items():
        if key not in fields:
            raise ConfigError(f"unknown geometry override {key!r}")
        fields[key] = float(val)
    return bc.GeometryParams(**fields)


def sandwich_rows(spec, g, bcond, modes, variants=None):
    rows = []
    for k, ep in enumerate(solve(spec, bcond, modes), start=1):
        lam, ratio = ep.lambda_, gradient_ratio(ep)
        if bcond == "dirichlet":
            lb = bc.dirichlet_lower_bound(g, lam)
            names = variants or bc.admissible_variants(g.alpha)
            best = min((bc.dirichlet_upper_bound(g, lam, v) for v in names),
                       key=lambda b: b.upper)
            rows.append(SandwichRow(k, lam, ratio, lb, best.upper, best.branch, best.variant))
        else:
            lb = bc.neumann_lower_bound(g, lam)
            ub = bc.neumann_upper_bound(g.K_V, lam)
            rows.append(SandwichRow(k, lam, ratio, lb, ub, "neumann", "sharp"))
    return rows


def run_verify(config_path, out_dir=None):
    """Run the full pipeline for one config file; returns (report, exit code)."""
    cfg = load_config(config_path)
    problem = cfg["problem"]
    try:
        spec, curv = build_domain(cfg["domain"])
        g = geometry_for(spec, curv, problem, cfg.get("geometry", {}))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    mc = cfg.get("mc", {})
    report = VerificationReport(spec.label, problem["bc"],
                                z_threshold=float(mc.get("z_threshold", 4.0)))
    report.rows = sandwich_rows(spec, g, problem["bc"], int(problem["modes"]),
                                problem.get("variants"))
    if mc:
        paths = int(mc.get("paths", 100_000))
        seed = int(mc.get("seed", 0))
        dt = mc.get("dt")
        for i, (alpha, eps, t) in enumerate(mc.get("fpt", [])):
            r = simulate_fpt(alpha, eps, t, MCConfig(paths, dt, seed), key=(i,))
            report.fpt.append(dict(alpha=alpha, eps=eps, t=t, estimate=r.estimate,
                                   stderr=r.stderr, exact=r.exact, z_score=r.z_score))
        mart = mc.get("martingale")
        if mart and problem["bc"] == "dirichlet":
            ep = solve(spec, "dirichlet", 1)[0]
            m = martingale_check(ep, spec, float(mart["x"]), mart.get("t", [0.1, 0.5, 1.0]),
                                 MCConfig(paths, dt, seed), threshold=report.z_threshold)
            report.martingale.append(dict(x=float(mart["x"]), start_value=m.start_value,
                                          checkpoints=m.checkpoints, means=m.means,
                                          stderrs=m.stderrs, z_scores=[float(z) for z in m.z_scores],
                                          passed=m.passed))
    if out_dir is not None:
        report.write(out_dir, {"eigenfunctions.tsv": _eigen_tsv(spec, problem)})
    return report, (EXIT_PASS if report.passed else EXIT_FAIL)


def _eigen_tsv(spec, problem, stride=16):
    pairs = solve(spec, problem["bc"], int(problem["modes"]))
    x = spec.grid[::stride]
    head = "x\t" + "\t".join(f"phi{k}" for k in range(1, len(pairs) + 1))
    lines = [head]
    cols = [ep.phi[::stride] for ep in pairs]
    for i, xi in enumerate(x):
        lines.append("\t".join([repr(float(xi))] + [repr(float(c[i])) for c in cols]))
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------

def cmd_bounds(args):
    if args.lambda_ is None and args.lambda1 is None:
        print("error: one of --lambda or --lambda1 is required", file=sys.stderr)
        return EXIT_USAGE
    alpha = args.alpha if args.alpha is not None else (args.alpha0 or 0.0)
    g = bc.GeometryParams(d=args.d, n=args.n, K=args.K, K_V=args.K_V, alpha=alpha)
    if args.lambda_ is not None:
        lam = args.lambda_
        if args.neumann:
            print(f"lower  {bc.neumann_lower_bound(g, lam):.6f}")
            print(f"upper  {bc.neumann_upper_bound(g.K_V, lam):.6f}")
        else:
            print(f"lower  {bc.dirichlet_lower_bound(g, lam):.6f}")
            print(f"lower_weak  {bc.dirichlet_lower_bound_weak(g, lam):.6f}")
            names = [args.variant] if args.variant else bc.admissible_variants(g.alpha)
            allb = [bc.dirichlet_upper_bound(g, lam, v) for v in names]
            for b in allb:
                inter = " ".join(f"{k}={v:.6f}" for k, v in b.intermediates.items())
                print(f"upper[{b.variant}]  {b.upper:.6f}  {b.branch}  {inter}")
            best = min(allb, key=lambda b: b.upper)
            print(f"upper  {best.upper:.6f}  ({best.variant})")
    if args.lambda1 is not None:
        c1, c2 = bc.intro_c1_c2(g, args.lambda1)
        print(f"c1  {c1:.6f}")
        print(f"c2  {c2:.6f}")
    return EXIT_PASS


def cmd_solve(args):
    dom = {"kind": args.domain, "nodes": args.grid, "L": args.L, "R": args.R, "d": args.d}
    dom = {k: v for k, v in dom.items() if v is not None}
    spec, curv = build_domain(dom)
    bcond = args.bc or ("closed" if spec.kind == "circle" else "dirichlet")
    print(f"{'k':>3} {'lambda':>14} {'ratio':>12} {'boundary':>12}")
    for k, ep in enumerate(solve(spec, bcond, args.modes), start=1):
        nb = boundary_gradient(ep, spec) if spec.has_boundary else float("nan")
        print(f"{k:>3} {ep.lambda_:>14.8f} {gradient_ratio(ep):>12.8f} {nb:>12.8f}")
    return EXIT_PASS


def cmd_fpt(args):
    r = simulate_fpt(args.alpha, args.eps, args.t, MCConfig(args.paths, args.dt, args.seed))
    print(f"exact     {r.exact:.6f}")
    print(f"estimate  {r.estimate:.6f}")
    print(f"stderr    {r.stderr:.6f}")
    print(f"z         {r.z_score:+.3f}")
    return EXIT_PASS


def cmd_verify(args):
    report, code = run_verify(args.config, args.out)
    print(report.summary())
    return code


def cmd_report(args):
    report = VerificationReport.from_json(Path(args.report).read_text())
    print(report.summary())
    if args.out:
        report.write(args.out)
    return EXIT_PASS if report.passed else EXIT_FAIL


def build_parser():
    p = argparse.ArgumentParser(prog="eigengrad", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bounds", help="evaluate the closed-form bounds")
    b.add_argument("--d", type=int, default=1)
    b.add_argument("--n", type=float, default=None)
    b.add_argument("--K", type=float, default=0.0)
    b.add_argument("--K_V", "--KV", dest="K_V", type=float, default=None)
    b.add_argument("--alpha", type=float, default=None)
    b.add_argument("--alpha0", type=float, default=None)
    b.add_argument("--lambda", dest="lambda_", type=_positive, default=None)
    b.add_argument("--lambda1", type=_positive, default=None)
    b.add_argument("--variant", choices=bc.DIRICHLET_VARIANTS, default=None)
    b.add_argument("--neumann", action="store_true")
    b.set_defaults(func=cmd_bounds)

    s = sub.add_parser("solve", help="finite-difference eigenpairs of a model domain")
    s.add_argument("--domain", choices=("interval", "ball", "circle"), default="interval")
    s.add_argument("--L", type=_positive, default=None)
    s.add_argument("--R", type=_positive, default=None)
    s.add_argument("--d", type=int, default=None)
    s.add_argument("--bc", choices=("dirichlet", "neumann", "closed"), default=None)
    s.add_argument("--modes", type=int, default=5)
    s.add_argument("--grid", type=int, default=4096)
    s.set_defaults(func=cmd_solve)

    f = sub.add_parser("fpt", help="first-passage probability: quadrature vs Monte Carlo")
    f.add_argument("--alpha", type=float, default=0.0)
    f.add_argument("--eps", type=_positive, default=1.0)
    f.add_argument("--t", type=_positive, default=1.0)
    f.add_argument("--paths", type=int, default=100_000)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--dt", type=_positive, default=None)
    f.set_defaults(func=cmd_fpt)

    v = sub.add_parser("verify", help="run a verification config")
    v.add_argument("config")
    v.add_argument("--out", default=None)
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("report", help="summarise a report.json")
    r.add_argument("report")
    r.add_argument("--out", default=None)
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
