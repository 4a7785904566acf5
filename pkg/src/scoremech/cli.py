"""Command-line front end.

Subcommands: solve-sym, solve-asym, regime-map, verify, simulate, entry,
sweep.  Artifacts are written under --out as canonical JSON (sorted keys,
17-significant-digit floats) and long-format CSV, so identical configs yield
byte-identical files.

Exit codes: 0 success, 2 validation error, 3 numeric failure, 4 verification
failure; errors are reported as one-line JSON on stderr.
"""

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .errors import (ScoremechError, InvalidParameter, MissingField,
                     UnknownField, DomainError, OutOfRange)
from .env import make_environment, check_regularity
from . import symmetric as sym
from . import asymmetric as asym
from . import auctionsim as game
from . import entry as entry_mod

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3
EXIT_VERIFICATION = 4

_VALIDATION_ERRORS = (InvalidParameter, MissingField, UnknownField,
                      json.JSONDecodeError, FileNotFoundError, KeyError,
                      ValueError)


# --------------------------------------------------------------------------
# Canonical serialization
# --------------------------------------------------------------------------

def canonical_json(obj) -> str:
    """Sorted keys, floats at 17 significant digits; deterministic bytes."""
    def render(o):
        if isinstance(o, dict):
            items = sorted((str(k), v) for k, v in o.items())
            inner = ",".join(f"{json.dumps(k)}:{render(v)}" for k, v in items)
            return "{" + inner + "}"
        if isinstance(o, np.ndarray):
            o = o.tolist()
        if isinstance(o, (list, tuple)):
            return "[" + ",".join(render(v) for v in o) + "]"
        if isinstance(o, (bool, np.bool_)):
            return "true" if o else "false"
        if o is None:
            return "null"
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, (float, np.floating)):
            if not np.isfinite(o):
                return json.dumps(str(o))
            return format(float(o), ".17g")
        return json.dumps(str(o))

    return render(obj) + "\n"


def _write(outdir: Path, name: str, text: str) -> Path:
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / name
    path.write_text(text)
    return path


def _write_csv(outdir: Path, name: str, header, rows) -> Path:
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / name
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format(v, ".17g") if isinstance(v, float) else v
                        for v in row])
    return path


def _load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _parse_range(spec: str) -> np.ndarray:
    """start:stop:step, inclusive of stop up to half a step."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise InvalidParameter(f"range must be start:stop:step, got {spec!r}")
    start, stop, step = (float(p) for p in parts)
    if step <= 0 or stop < start:
        raise InvalidParameter("range requires step > 0 and stop >= start")
    return np.arange(start, stop + 0.5 * step, step)


# --------------------------------------------------------------------------
# Command implementations
# --------------------------------------------------------------------------

def _env_from_args(args):
    cfg = _load_json(args.env)
    env = make_environment(cfg)
    report = check_regularity(env)
    if not report.passed:
        raise InvalidParameter("environment fails regularity checks: "
                               + ", ".join(report.failed_checks()))
    return env


def cmd_solve_sym(args) -> int:
    env = _env_from_args(args)
    sol = sym.solve_symmetric(env, grid=args.grid)
    ths = np.linspace(0.0, 1.0, 129)
    qs = np.array([float(sol.schedule(t)) for t in ths])
    payload = {
        "family": env.family, "n": env.n, "utility": sol.utility,
        "theta": ths, "quality": qs,
        "score_rule": None if sol.rule is None else
            np.array([float(sol.rule(q)) for q in qs]),
        "price": None if sol.price is None else
            np.array([float(sol.price(t)) for t in ths]),
        "score_bid": None if sol.score is None else
            np.array([float(sol.score(t)) for t in ths]),
    }
    path = _write(Path(args.out), "solve_sym.json", canonical_json(payload))
    print(path)
    return EXIT_OK


def cmd_solve_asym(args) -> int:
    env = _env_from_args(args)
    senv = asym.as_separable(env)
    regime = asym.solve_optimal(senv)
    payload = {
        "regime": regime.kind, "theta0": regime.theta0, "side": regime.side,
        "utility": regime.utility, "utilities": regime.utilities,
        "params": regime.params, "classification": regime.classification.kind,
        "thresholds": regime.thresholds,
    }
    path = _write(Path(args.out), "solve_asym.json", canonical_json(payload))
    print(path)
    return EXIT_OK


def cmd_regime_map(args) -> int:
    gammas = _parse_range(args.gamma)
    alphas = _parse_range(args.alpha)
    rows = []
    for g in gammas:
        for a in alphas:
            want = asym.classify_regime_ce(float(g), float(a))
            env = make_environment({"family": "constant_elasticity", "n": 2,
                                    "alpha": float(a), "beta": 1.0,
                                    "gamma": float(g)})
            got = asym.solve_optimal(asym.as_separable(env)).kind
            slack = asym.regime_boundary_slack(float(g), float(a))
            rows.append((float(g), float(a), want, got,
                         int(want == got), slack))
    path = _write_csv(Path(args.out), "regime_map.csv",
                      ["gamma", "alpha", "closed_form", "solver", "agree",
                       "boundary_slack"], rows)
    print(path)
    return EXIT_OK


def _mechanism_from_config(cfg: dict):
    """Build (mechanism, equilibrium profile, analytic utility) from JSON.

    Schema: {"kind": first_score|score_floor|score_ceiling|sole_source,
             "env": {...}, "theta0": optional (defaults to the optimum)}.
    """
    known = {"kind", "env", "theta0"}
    extra = set(cfg) - known
    if extra:
        raise UnknownField(f"unknown mechanism keys: {sorted(extra)}")
    if "kind" not in cfg or "env" not in cfg:
        raise MissingField("mechanism config requires 'kind' and 'env'")
    kind = cfg["kind"]
    env = make_environment(cfg["env"])
    if kind == "first_score":
        sol = sym.solve_symmetric(env)
        mech, profile = game.symmetric_profile(sol)
        return mech, profile, sol.utility
    senv = asym.as_separable(env)
    if kind == "sole_source":
        mech, profile = game.sole_source_profile(senv)
        return mech, profile, asym.utility_sole(senv)
    side = "right" if kind == "score_floor" else "left"
    theta0 = cfg.get("theta0")
    if theta0 is None:
        theta0 = (asym.threshold_floor(senv) if side == "right"
                  else asym.threshold_ceiling(senv))
    builder = (game.floor_profile if kind == "score_floor"
               else game.ceiling_profile)
    mech, profile = builder(senv, float(theta0))
    return mech, profile, asym.utility_at_threshold(senv, float(theta0), side)


def cmd_verify(args) -> int:
    mech, profile, utility = _mechanism_from_config(_load_json(args.mech))
    report = game.verify_bne(mech, profile,
                             grid=(args.grid, args.grid, args.grid))
    scale = max(1.0, abs(utility))
    ok = report.passes(ic_tol=args.tol * scale)
    payload = report.to_dict()
    payload.update({"kind": mech.kind, "analytic_utility": utility,
                    "tolerance": args.tol * scale, "passed": ok})
    path = _write(Path(args.out), "verify.json", canonical_json(payload))
    print(path)
    return EXIT_OK if ok else EXIT_VERIFICATION


def cmd_simulate(args) -> int:
    mech, profile, utility = _mechanism_from_config(_load_json(args.mech))
    result = game.simulate(mech, profile, draws=args.draws, seed=args.seed)
    payload = result.to_dict()
    payload.update({"kind": mech.kind, "analytic_utility": utility})
    outdir = Path(args.out)
    path = _write(outdir, "simulate.json", canonical_json(payload))
    for i, (edges, counts) in result.histograms.items():
        _write_csv(outdir, f"scores_firm{i}.csv",
                   ["bin_left", "bin_right", "count"],
                   [(float(edges[j]), float(edges[j + 1]), int(c))
                    for j, c in enumerate(counts)])
    print(path)
    return EXIT_OK


def cmd_entry(args) -> int:
    cfg = _load_json(args.env)
    n = args.n if args.n is not None else int(cfg.get("n", 2))
    env = make_environment({**cfg, "n": 2})   # separable analysis is 2-firm
    senv = asym.as_separable(env)
    curve = entry_mod.optimal_entry(senv, n)
    outdir = Path(args.out)
    csv_path = _write_csv(outdir, "entry.csv", ["k", "U_k", "is_argmax"],
                          [(int(k), float(u), int(a))
                           for k, u, a in curve.rows()])
    payload = {"k_star": curve.k_star, "shape": curve.shape.kind,
               "fractional_shape": curve.fractional_shape.kind,
               "hypothesis_ok": curve.hypothesis_ok,
               "one_or_all": curve.one_or_all,
               "utility": curve.utility}
    _write(outdir, "entry.json", canonical_json(payload))
    print(csv_path)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _load_json(args.env)
    values = _parse_range(args.range)
    rows = []
    for v in values:
        point = {**cfg, args.param: float(v)}
        env = make_environment(point)
        if args.target == "sym":
            sol = sym.solve_symmetric(env)
            rows.append((args.param, float(v), "symmetric", "", sol.utility))
        else:
            regime = asym.solve_optimal(asym.as_separable(env))
            rows.append((args.param, float(v), regime.kind,
                         format(regime.theta0, ".17g"), regime.utility))
    rows.sort(key=lambda r: r[1])
    path = _write_csv(Path(args.out), "sweep.csv",
                      ["param", "value", "regime", "theta0", "utility"], rows)
    print(path)
    return EXIT_OK


# --------------------------------------------------------------------------
# Argument parsing and dispatch
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="scoremech",
        description="Buyer-optimal procurement mechanism toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp, env=True, mech=False):
        if env:
            sp.add_argument("--env", required=True,
                            help="environment JSON path")
        if mech:
            sp.add_argument("--mech", required=True,
                            help="mechanism JSON path")
        sp.add_argument("--out", default=".", help="output directory")

    sp = sub.add_parser("solve-sym", help="optimal symmetric scoring auction")
    add_common(sp)
    sp.add_argument("--grid", type=int, default=512)
    sp.set_defaults(fn=cmd_solve_sym)

    sp = sub.add_parser("solve-asym",
                        help="optimal two-firm censored mechanism")
    add_common(sp)
    sp.set_defaults(fn=cmd_solve_asym)

    sp = sub.add_parser("regime-map",
                        help="closed-form vs solver regimes on a (gamma, "
                             "alpha) grid")
    sp.add_argument("--gamma", required=True, help="range start:stop:step")
    sp.add_argument("--alpha", required=True, help="range start:stop:step")
    sp.add_argument("--out", default=".")
    sp.set_defaults(fn=cmd_regime_map)

    sp = sub.add_parser("verify", help="grid Bayes-Nash verification")
    add_common(sp, env=False, mech=True)
    sp.add_argument("--grid", type=int, default=64)
    sp.add_argument("--tol", type=float, default=1e-3,
                    help="IC tolerance relative to the utility scale")
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("simulate", help="seeded Monte Carlo simulation")
    add_common(sp, env=False, mech=True)
    sp.add_argument("--draws", type=int, default=1_000_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(fn=cmd_simulate)

    sp = sub.add_parser("entry", help="restricted-entry analysis")
    add_common(sp)
    sp.add_argument("--n", type=int, default=None,
                    help="total number of firms (defaults to env n)")
    sp.set_defaults(fn=cmd_entry)

    sp = sub.add_parser("sweep", help="parameter sweep (long-format CSV)")
    add_common(sp)
    sp.add_argument("--param", required=True,
                    help="environment key to sweep")
    sp.add_argument("--range", required=True, help="start:stop:step")
    sp.add_argument("--target", choices=("sym", "asym"), default="asym")
    sp.set_defaults(fn=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except _VALIDATION_ERRORS as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return EXIT_VALIDATION
    except ScoremechError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
