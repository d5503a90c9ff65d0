"""Command line entry point: ``blev analyze|simulate|verify|report``.

Exit codes: 0 pass, 1 statistical failure, 2 configuration, parse or
precondition error (nothing is written), 3 particle-cap explosion.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import spectral
from .errors import ConditionError, ConfigError, DomainError, Explosion, InsufficientSamples, ModelError
from .mc_lab.experiments import DEFAULT_PARAMS, EXPERIMENTS, ExperimentSpec, experiment
from .mc_lab.replicas import run_replicas
from .mc_lab.report import fmt, report_from_dict, summary_lines, write_report
from .model import BranchingModel, binary_bbm, load_model, model_to_dict, zeta_bbm
from .simulator import DEFAULT_MAX_PARTICLES, DEFAULT_SEED, SimConfig

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_EXPLOSION = 0, 1, 2, 3
SEED_ENV = "BLEV_SEED"

# experiments whose natural default model is the heavy-tailed one
_HEAVY_DEFAULT = {"stable_clt", "tail_index"}

# conditions evaluated per theta in `analyze`, with the extra parameters they take
_THETA_CONDITIONS = (
    ("f_moment", {"r": 0.0}),
    ("kappa_prime", {}),
    ("UI", {}),
    ("H2", {}),
    ("log_moment", {"r": 1.0}),
    ("moment7", {}),
    ("tail_boundary", {}),
)
_P_CONDITIONS = ("wtp", "Hp", "kappa_p", "Lp", "WH", "tailW")
_GLOBAL_CONDITIONS = ("deriv", "H3", "max")


class UsageError(Exception):
    """Bad command line input; reported with exit code 2."""


def _parse_seed(text: str, origin: str) -> int:
    try:
        seed = int(str(text).strip(), 0)
    except ValueError:
        raise UsageError(f"{origin}: {text!r} is not an integer") from None
    if not 0 <= seed < 2**64:
        raise UsageError(f"{origin}: seed must be a 64-bit unsigned integer")
    return seed


def resolve_seed(flag: Optional[str], environ=None) -> tuple:
    """--seed beats $BLEV_SEED beats the fixed default; returns (seed, source)."""
    env = os.environ if environ is None else environ
    if flag is not None:
        return _parse_seed(flag, "--seed"), "flag"
    if env.get(SEED_ENV, "").strip():
        return _parse_seed(env[SEED_ENV], SEED_ENV), "env"
    return DEFAULT_SEED, "default"


def _load(path: Optional[str], fallback: Optional[BranchingModel] = None) -> BranchingModel:
    if path is None:
        if fallback is None:
            raise UsageError("--model is required")
        return fallback
    try:
        return load_model(path)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
    except ModelError as exc:
        raise UsageError(f"{path}: {exc}") from None
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror or exc}") from None


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) if isinstance(v, (float, int, bool)) or v is None else v for v in r])
    return buf.getvalue()


def _write_files(out: Optional[str], files: dict) -> list:
    if out is None:
        return []
    d = Path(out)
    d.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, text in files.items():
        p = d / name
        p.write_text(text, encoding="utf-8")
        paths.append(p)
    return paths


def _opt(x: Optional[float]):
    return "none" if x is None else fmt(float(x))


# --------------------------------------------------------------------------
# analyze
# --------------------------------------------------------------------------


def _default_grid(model: BranchingModel) -> np.ndarray:
    dom = spectral.theta_domain(model)
    ts = spectral.find_theta_star(model)
    hi = 2.0 * ts if ts is not None else 3.0
    if np.isfinite(dom.theta_plus):
        hi = min(hi, dom.theta_plus)
    grid = np.linspace(hi / 20, hi, 20)
    return grid[[dom.interior(t) for t in grid]]


def cmd_analyze(args) -> int:
    model = _load(args.model)
    thetas = [float(t) for t in (args.theta or [])]
    if any(t <= 0 for t in thetas):
        raise UsageError("--theta values must be positive")
    grid = np.array(sorted(set(thetas))) if thetas else _default_grid(model)
    prof = spectral.spectral_profile(model, grid)
    p_cond = 1.5 if args.p is None else float(args.p)
    cond_thetas = thetas or ([prof.theta_star / 2] if prof.theta_star is not None else [float(grid[0])])

    table = [(th, k0, k1, k2) for th, k0, k1, k2 in zip(prof.theta_grid, prof.kappa, prof.kappa1, prof.kappa2)]
    summary = [("theta_plus", "", prof.theta_plus), ("theta_star", "", prof.theta_star)]
    for th in cond_thetas:
        ps = spectral.find_p_star(model, th) if spectral.theta_domain(model).interior(th) else None
        summary.append(("p_star", th, ps))
    conds = []
    for th in cond_thetas:
        for cid, extra in _THETA_CONDITIONS:
            v = spectral.check_condition(model, cid, theta=th, **extra)
            conds.append((cid, th, "", v.holds, v.detail))
        for cid in _P_CONDITIONS:
            v = spectral.check_condition(model, cid, theta=th, p=p_cond)
            conds.append((cid, th, p_cond, v.holds, v.detail))
    for cid in _GLOBAL_CONDITIONS:
        v = spectral.check_condition(model, cid)
        conds.append((cid, "", "", v.holds, v.detail))

    files = {
        "kappa_table.csv": _csv_text(["theta", "kappa", "kappa_prime", "kappa_double_prime"], table),
        "spectral_summary.csv": "quantity,theta,value\n" + "".join(
            f"{q},{fmt(th) if th != '' else ''},{_opt(v)}\n" for q, th, v in summary),
        "conditions.csv": _csv_text(["condition_id", "theta", "p", "holds", "detail"], conds),
    }
    echo = json.dumps(model_to_dict(model), indent=2) + "\n"
    if args.echo_model:
        files["model.json"] = echo
    _write_files(args.out, files)

    if args.echo_model:
        sys.stdout.write(echo)
        return EXIT_PASS
    print(f"model: {prof.notes}")
    for q, th, v in summary:
        label = q if th == "" else f"{q}(theta={fmt(th)})"
        print(f"{label} {_opt(v)}")
    print("theta kappa kappa' kappa''")
    for row in table:
        print(" ".join(fmt(float(x)) for x in row))
    for cid, th, p, holds, detail in conds:
        where = "" if th == "" else f" theta={fmt(th)}" + ("" if p == "" else f" p={fmt(p)}")
        print(f"condition {cid}{where}: {'holds' if holds else 'fails'}  {detail}")
    return EXIT_PASS


# --------------------------------------------------------------------------
# simulate
# --------------------------------------------------------------------------


def cmd_simulate(args) -> int:
    model = _load(args.model)
    seed, _ = resolve_seed(args.seed)
    times = [float(t) for t in (args.t or [0.0])]
    replicas = 1 if args.replicas is None else int(args.replicas)
    if replicas < 1:
        raise UsageError("--replicas must be >= 1")
    try:
        cfg = SimConfig(tuple(times), max_particles=DEFAULT_MAX_PARTICLES)
    except (ValueError, ConfigError) as exc:
        raise UsageError(str(exc)) from None
    reals = run_replicas(model, cfg, replicas, seed, threads=args.threads)
    buf = io.StringIO()
    buf.write("replica,time,position\n")
    for i, real in enumerate(reals):
        for snap in real.snapshots:
            tt = fmt(float(snap.time))
            for x in snap.positions:
                buf.write(f"{i},{tt},{fmt(float(x))}\n")
    text = buf.getvalue()
    if args.out is None:
        sys.stdout.write(text)
    else:
        (path,) = _write_files(args.out, {"snapshots.csv": text})
        print(f"wrote {path}")
    return EXIT_PASS


# --------------------------------------------------------------------------
# verify / report
# --------------------------------------------------------------------------


def _overrides(args, eid: str) -> dict:
    defaults = DEFAULT_PARAMS[eid]
    params = {}
    for key, vals in (("theta", args.theta), ("t", args.t)):
        if vals is None:
            continue
        if key not in defaults:
            raise UsageError(f"--{key} is not a parameter of {eid}")
        if isinstance(defaults[key], list):
            params[key] = [float(v) for v in vals]
        elif len(vals) != 1:
            raise UsageError(f"{eid} takes a single --{key} value")
        else:
            params[key] = float(vals[0])
    for key, val in (("T", args.T), ("p", args.p)):
        if val is None:
            continue
        if key not in defaults:
            raise UsageError(f"--{key} is not a parameter of {eid}")
        params[key] = float(val)
    if args.variant is not None:
        if "variant" not in defaults:
            raise UsageError(f"--variant is not a parameter of {eid}")
        params["variant"] = args.variant
    if args.replicas is not None:
        params["replicas"] = int(args.replicas)
    return params


def _emit(report, args) -> int:
    for line in summary_lines(report):
        print(line)
    if args.out is not None:
        for p in write_report(report, args.out, args.format):
            print(f"wrote {p}")
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_verify(args) -> int:
    eid = args.experiment
    fallback = zeta_bbm() if eid in _HEAVY_DEFAULT else binary_bbm()
    model = _load(args.model, fallback)
    seed, source = resolve_seed(args.seed)
    try:
        spec = ExperimentSpec(eid, model, _overrides(args, eid), seed=seed)
    except ConfigError as exc:
        raise UsageError(str(exc)) from None
    report = experiment(spec, threads=args.threads)
    report.provenance["seed_source"] = source
    return _emit(report, args)


def cmd_report(args) -> int:
    try:
        with open(args.input, encoding="utf-8") as fh:
            report = report_from_dict(json.load(fh))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{args.input}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
    except (OSError, ValueError) as exc:
        raise UsageError(f"{args.input}: {exc}") from None
    return _emit(report, args)


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="blev", description="Branching Levy process laboratory.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, model_required=True):
        p.add_argument("--model", required=model_required, help="model JSON file")
        p.add_argument("--out", help="output directory (default: standard output only)")

    a = sub.add_parser("analyze", help="spectral table, theta*, p* and condition verdicts")
    common(a)
    a.add_argument("--theta", type=float, nargs="+", help="theta values (default: a grid on Theta)")
    a.add_argument("--p", type=float, help="p used for the p-indexed conditions (default 1.5)")
    a.add_argument("--echo-model", action="store_true", help="print the canonical model JSON")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("simulate", help="dump snapshot positions as CSV")
    common(s)
    s.add_argument("--t", type=float, nargs="+", help="snapshot times (default 0)")
    s.add_argument("--replicas", type=int)
    s.add_argument("--seed")
    s.add_argument("--threads", type=int, default=1)
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", help="run one Monte Carlo experiment")
    common(v, model_required=False)
    v.add_argument("--experiment", required=True, choices=EXPERIMENTS)
    v.add_argument("--seed")
    v.add_argument("--replicas", type=int)
    v.add_argument("--threads", type=int, default=1)
    v.add_argument("--format", choices=("json", "csv", "both"), default="both")
    v.add_argument("--theta", type=float, nargs="+")
    v.add_argument("--t", type=float, nargs="+")
    v.add_argument("--T", type=float)
    v.add_argument("--p", type=float)
    v.add_argument("--variant", choices=("stable1", "stable2"), help="stable_clt normalization")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("report", help="re-render a saved JSON report")
    r.add_argument("--in", dest="input", required=True, help="report JSON written by verify")
    r.add_argument("--out")
    r.add_argument("--format", choices=("json", "csv", "both"), default="csv")
    r.set_defaults(func=cmd_report)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage, matching the config-error code
        return int(exc.code or 0)
    if getattr(args, "threads", 1) is not None and getattr(args, "threads", 1) < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConditionError as exc:
        print(f"error: {exc} [clause {exc.clause}]", file=sys.stderr)
        return EXIT_CONFIG
    except (UsageError, ConfigError, DomainError, InsufficientSamples) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Explosion as exc:
        print(f"explosion: {exc}", file=sys.stderr)
        return EXIT_EXPLOSION


if __name__ == "__main__":
    sys.exit(main())
