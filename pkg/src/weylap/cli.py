"""Command-line entry point: ``weylap <subcommand> [flags]``.

Every run writes ``<out>/<subcommand>.json`` (plus CSVs where useful) and
prints the JSON report. The output directory defaults to ``$WEYLAP_OUT`` or
the current directory. A ``--config`` JSON file may supply any flag by its
long name (dashes or underscores); explicit flags win over the file.

Exit status: 0 success, 1 failed check (``verify-paper``) or failed computation,
2 bad configuration.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import aptest, evolution, seminorms, verify
from .config import DEFAULTS
from .errors import ConfigError, WeylapError
from .seminorms import ScanSpec
from .signals import (ParametricSignal, constant, cosine, load_signal, paper_ode_solution,
                      paper_primitive, paper_step, sine, zero)

BUILTIN_SIGNALS = {
    "sin": sine, "cos": cosine, "step": paper_step, "primitive": paper_primitive,
    "ode_solution": paper_ode_solution, "zero": zero, "one": lambda: constant(1.0),
}


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with flag values")
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--density", type=int, default=None, help="quadrature points per unit")


def _signal_arg(p, name="--signal"):
    p.add_argument(name, default=None,
                   help="signal JSON file or builtin: " + ", ".join(BUILTIN_SIGNALS))


def _semigroup_args(p):
    p.add_argument("--a", type=float, default=None, help="scalar generator a < 0")
    p.add_argument("--diag", default=None, help="comma-separated diagonal generator")
    p.add_argument("--matrix", default=None, help="row-major CSV matrix file")
    p.add_argument("--M", type=float, default=None)
    p.add_argument("--delta", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="weylap", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("norm", help="Stepanov norm S^p_l")
    _common(p); _signal_arg(p)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--l", type=float, default=None)
    p.add_argument("--scan", default=None, help="min:max[:step]")

    p = sub.add_parser("weyl", help="Weyl norm along a window schedule")
    _common(p); _signal_arg(p)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--scan", default=None)
    p.add_argument("--l0", type=float, default=None)
    p.add_argument("--factor", type=float, default=None)
    p.add_argument("--max-windows", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)

    p = sub.add_parser("translations", help="scan eps-translation numbers")
    _common(p); _signal_arg(p)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--l", type=float, default=None)
    p.add_argument("--convention", choices=aptest.CONVENTIONS, default=None)
    p.add_argument("--tau", default=None, help="min:max:step")
    p.add_argument("--scan", default=None)

    p = sub.add_parser("classify", help="bohr / stepanov / weyl ladder")
    _common(p); _signal_arg(p)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--tau", default=None)
    p.add_argument("--scan", default=None)
    p.add_argument("--l-schedule", default=None, help="comma-separated window lengths")
    p.add_argument("--max-inclusion", type=float, default=None)

    p = sub.add_parser("danilov", help="small-measure tail functional")
    _common(p); _signal_arg(p)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--schedule", default=None, help="comma-separated window lengths")
    p.add_argument("--delta-schedule", default=None, help="comma-separated measure fractions")
    p.add_argument("--scan", default=None)
    p.add_argument("--tol", type=float, default=None)

    p = sub.add_parser("solve-linear", help="bounded mild solution of u' = Au + f")
    _common(p); _semigroup_args(p); _signal_arg(p, "--forcing")
    p.add_argument("--t", type=float, default=None, help="single evaluation time")
    p.add_argument("--grid", default=None, help="t0:t1 solution grid")
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--tail-tol", type=float, default=None)

    for name, hlp in (("solve-semilinear", "Picard solve of u' = Au + f(t,u)"),
                      ("diagnostic", "weighted translation defect of f(t, u(t))")):
        p = sub.add_parser(name, help=hlp)
        _common(p); _semigroup_args(p); _signal_arg(p, "--forcing")
        p.add_argument("--gain", type=float, default=None)
        p.add_argument("--coupling", choices=("sin", "tanh", "identity", "none"), default=None)
        p.add_argument("--p", type=float, default=None)
        p.add_argument("--grid", default=None)
        p.add_argument("--tail-tol", type=float, default=None)
        p.add_argument("--max-iter", type=int, default=None)
        p.add_argument("--res-tol", type=float, default=None)
        if name == "diagnostic":
            p.add_argument("--tau", type=float, default=None)
            p.add_argument("--l", type=float, default=None)
            p.add_argument("--delta1", type=float, default=None)
            p.add_argument("--gamma", type=float, default=None)

    p = sub.add_parser("verify-paper", help="run the full reproduction suite")
    _common(p)
    return ap


FALLBACKS = {
    "jobs": DEFAULTS.jobs, "seed": DEFAULTS.seed, "density": DEFAULTS.quad_density,
    "p": 1.0, "l": 1.0, "scan": "-10:10:0.01", "l0": DEFAULTS.schedule_l0,
    "factor": DEFAULTS.schedule_factor, "max_windows": DEFAULTS.schedule_max_windows,
    "tol": DEFAULTS.tol, "convention": "classical", "tau": "0:50:0.05",
    "l_schedule": ",".join(str(2 ** k) for k in range(11)), "schedule": "10,100,1000",
    "delta_schedule": "0.1,0.01,0.001", "tail_tol": DEFAULTS.tail_tol,
    "max_iter": DEFAULTS.max_iter, "res_tol": DEFAULTS.res_tol, "gain": 0.0,
    "coupling": "sin", "grid": "0:20", "delta1": 1.0, "gamma": 1.0,
    "M": 1.0,
}


def resolve(args: argparse.Namespace) -> dict:
    """Merge flags, the optional config file and fallbacks; unknown config keys are errors."""
    cfg = {k: v for k, v in vars(args).items() if k != "config"}
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config {args.config}: {e}", "config") from e
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object", "config")
        for key, val in data.items():
            k = key.replace("-", "_")
            if k == "subcommand":
                if val != args.subcommand:
                    raise ConfigError(f"config is for {val!r}, not {args.subcommand!r}", key)
                continue
            if k not in cfg:
                raise ConfigError(f"unknown key {key!r} for {args.subcommand}", key)
            if cfg[k] is None:
                cfg[k] = val
    for k, v in FALLBACKS.items():
        if k in cfg and cfg[k] is None:
            cfg[k] = v
    if cfg.get("out") is None:
        cfg["out"] = os.environ.get("WEYLAP_OUT", ".")
    return cfg


def _floats(text, field):
    try:
        if isinstance(text, (list, tuple)):
            return [float(x) for x in text]
        return [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError as e:
        raise ConfigError(f"{field}: expected comma-separated numbers", field) from e


def _range(text, field, n=3):
    try:
        parts = [float(x) for x in str(text).split(":")]
    except ValueError as e:
        raise ConfigError(f"{field}: expected min:max[:step]", field) from e
    if len(parts) not in (2, n) or not parts[0] < parts[1]:
        raise ConfigError(f"{field}: expected min:max[:step] with min < max", field)
    return parts


def _scan(cfg) -> ScanSpec:
    lo, hi, *rest = _range(cfg["scan"], "scan")
    try:
        return ScanSpec(lo, hi, rest[0] if rest else DEFAULTS.xi_step, int(cfg["density"]))
    except ValueError as e:
        raise ConfigError(str(e), "scan") from e


def _signal(cfg, key="signal"):
    name = cfg.get(key)
    if name is None:
        raise ConfigError(f"--{key} is required", key)
    if name in BUILTIN_SIGNALS:
        return BUILTIN_SIGNALS[name]()
    try:
        return load_signal(name)
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"cannot load signal {name!r}: {e}", key) from e


def _semigroup(cfg) -> evolution.SemigroupSpec:
    given = [k for k in ("a", "diag", "matrix") if cfg.get(k) is not None]
    if len(given) != 1:
        raise ConfigError("give exactly one of --a, --diag, --matrix", "a")
    try:
        if cfg.get("a") is not None:
            return evolution.SemigroupSpec.scalar(float(cfg["a"]), cfg.get("delta"))
        if cfg.get("diag") is not None:
            return evolution.SemigroupSpec.diagonal(_floats(cfg["diag"], "diag"), cfg.get("delta"))
        if cfg.get("delta") is None:
            raise ConfigError("--delta is required with --matrix", "delta")
        A = np.loadtxt(cfg["matrix"], delimiter=",", ndmin=2)
        return evolution.SemigroupSpec.dense(A, float(cfg["M"]), float(cfg["delta"]))
    except (OSError, ValueError) as e:
        raise ConfigError(str(e), given[0]) from e


def _parametric(cfg, n) -> ParametricSignal:
    forcing = _signal(cfg, "forcing") if cfg.get("forcing") is not None else None
    if forcing is not None and forcing.dim != n:
        raise ConfigError(f"forcing has dimension {forcing.dim}, generator {n}", "forcing")
    return ParametricSignal.affine(forcing, float(cfg["gain"]), cfg["coupling"], dim=n)


def _write_json(path: Path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")


def _jsonable(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not serialisable: {type(x).__name__}")


def _finite(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def run(cfg: dict) -> tuple[int, dict, list]:
    """Dispatch a resolved config. Returns ``(exit_code, report, extra_files)``."""
    sub = cfg["subcommand"]
    out = Path(cfg["out"])
    jobs = int(cfg["jobs"])
    files = []
    status = 0

    if sub == "norm":
        est = seminorms.stepanov_norm(_signal(cfg), float(cfg["p"]), float(cfg["l"]), _scan(cfg))
        result = est.to_dict()
    elif sub == "weyl":
        try:
            est = seminorms.weyl_norm(_signal(cfg), float(cfg["p"]), _scan(cfg), float(cfg["l0"]),
                                      float(cfg["factor"]), int(cfg["max_windows"]),
                                      float(cfg["tol"]))
        except seminorms.NotConverged as e:
            est = e.estimate
        path = out / "weyl_history.csv"
        est.history_csv(path)
        files.append(path)
        result = est.to_dict()
    elif sub == "translations":
        lo, hi, *st = _range(cfg["tau"], "tau")
        q = aptest.TranslationQuery(float(cfg["eps"]), float(cfg["p"]), float(cfg["l"]),
                                    cfg["convention"], lo, hi, st[0] if st else 0.05, _scan(cfg))
        ts = aptest.scan_translations(_signal(cfg), q, jobs)
        path = out / "translations.csv"
        ts.to_csv(path)
        files.append(path)
        result = ts.to_dict()
    elif sub == "classify":
        lo, hi, *st = _range(cfg["tau"], "tau")
        pol = aptest.ClassifyPolicy(_scan(cfg), lo, hi, st[0] if st else 0.05,
                                    tuple(_floats(cfg["l_schedule"], "l_schedule")),
                                    max_inclusion=cfg.get("max_inclusion"))
        cls = aptest.classify(_signal(cfg), float(cfg["eps"]), float(cfg["p"]), pol, jobs)
        result = cls.to_dict()
    elif sub == "danilov":
        try:
            res = seminorms.danilov_membership(_signal(cfg), float(cfg["p"]),
                                               _floats(cfg["schedule"], "schedule"),
                                               _floats(cfg["delta_schedule"], "delta_schedule"),
                                               _scan(cfg), float(cfg["tol"]))
            result = res.to_dict()
            result["decided"] = True
        except seminorms.NotConverged as e:
            result = seminorms.DanilovResult(None, e.history).to_dict()
            result["decided"] = False
    elif sub == "solve-linear":
        S = _semigroup(cfg)
        f = _signal(cfg, "forcing")
        if cfg.get("t") is not None:
            val = evolution.linear_mild_solution(S, f, float(cfg["t"]), float(cfg["tail_tol"]),
                                                 int(cfg["density"]), float(cfg["p"]))
            result = {"t": float(cfg["t"]), **val.to_dict()}
        else:
            t0, t1 = _range(cfg["grid"], "grid", 2)
            sol = evolution.linear_solution_on_grid(S, f, t0, t1, int(cfg["density"]),
                                                    float(cfg["tail_tol"]), float(cfg["p"]))
            path = out / "solution.csv"
            sol.to_csv(path)
            files.append(path)
            result = {"certificate": sol.certificate(), "sup_norm": sol.sup_norm}
    elif sub in ("solve-semilinear", "diagnostic"):
        S = _semigroup(cfg)
        f = _parametric(cfg, S.n)
        p = float(cfg["p"])
        t0, t1 = _range(cfg["grid"], "grid", 2)
        sol = evolution.picard_solve(S, f, p, (t0, t1), float(cfg["tail_tol"]),
                                     int(cfg["max_iter"]), float(cfg["res_tol"]),
                                     int(cfg["density"]))
        path = out / "solution.csv"
        sol.to_csv(path)
        files.append(path)
        result = {"certificate": sol.certificate(), "sup_norm": sol.sup_norm}
        if sub == "diagnostic":
            if cfg.get("tau") is None or cfg.get("l") is None:
                raise ConfigError("diagnostic needs --tau and --l", "tau")
            d = evolution.translation_diagnostic(f, sol, float(cfg["tau"]), p, float(cfg["l"]),
                                                 float(cfg["delta1"]), float(cfg["gamma"]),
                                                 float(cfg["tail_tol"]), int(cfg["density"]))
            result["diagnostic"] = d.to_dict()
    elif sub == "verify-paper":
        reports = verify.verify_all(seed=int(cfg["seed"]), jobs=jobs)
        for rep in reports:
            files.extend(rep.write_csvs(out))
        result = {"pass": all(r.passed for r in reports),
                  "cases": [r.to_dict() for r in reports]}
        status = 0 if result["pass"] else 1
    else:  # pragma: no cover - argparse restricts choices
        raise ConfigError(f"unknown subcommand {sub!r}", "subcommand")

    report = {"subcommand": sub, "seed": int(cfg["seed"]),
              "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
              "result": _finite(result)}
    return status, report, files


RANGE_FLAGS = ("--scan", "--tau", "--grid", "--diag", "--a", "--delta", "--gain", "--t")


def _glue_negative(argv: list) -> list:
    """Turn ``--scan -5:5`` into ``--scan=-5:5`` so argparse accepts negative ranges."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in RANGE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-") \
                and len(argv[i + 1]) > 1 and (argv[i + 1][1].isdigit() or argv[i + 1][1] == "."):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _glue_negative(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        cfg = resolve(args)
        out = Path(cfg["out"])
        out.mkdir(parents=True, exist_ok=True)
        status, report, _ = run(cfg)
    except ConfigError as e:
        field = f" [{e.field}]" if getattr(e, "field", None) else ""
        print(f"config error{field}: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"config error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    except WeylapError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    _write_json(out / f"{cfg['subcommand']}.json", report)
    json.dump(report, sys.stdout, indent=2, sort_keys=True, default=_jsonable)
    sys.stdout.write("\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
