"""Command line front end: ``gkdvlab {run,sweep-nu,bounds,norms,convergence} <config>``.

Every subcommand prints ``key,value`` lines (or a CSV table) on stdout and
writes its files, figures included, under ``--out``.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import bound_report
from .diagnostics import NORM_KEYS, sample
from .experiments import io
from .experiments.config import ConfigError, Scenario, config_hash, load
from .experiments.convergence import convergence_report
from .experiments.scenario import run_scenario
from .experiments.sweep import sweep_nu, write_sweep_artifacts
from .initial_data import closed_form_h2
from .spectral import sobolev_norm

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BLOWUP = 3


def _emit(rows) -> None:
    for key, value in rows:
        if isinstance(value, float):
            value = io.fmt(value)
        print(f"{key},{value}")


def _out_dir(args, sc: Scenario, sub: str = "") -> Path:
    base = Path(args.out) if args.out else Path(sc.out_dir)
    return base / sub if sub else base


def cmd_run(args, sc: Scenario) -> int:
    res = run_scenario(sc, _out_dir(args, sc), threads=args.threads)
    rows = [("status", res.status), ("last_valid_time", res.last_valid_time), ("dt", res.dt),
            ("samples", len(res.series.t))]
    if res.distance is not None:
        for key in NORM_KEYS:
            rows.append((f"max_distance_{key}", float(np.max(res.column(key)))))
    if res.fit is not None:
        for key in NORM_KEYS:
            rows.append((f"slope_{key}", res.fit.slope[key]))
            rows.append((f"r2_{key}", res.fit.r2[key]))
    rows.append(("size_estimate_passed", res.size_report.passed))
    for key, value in res.analysis.items():
        if isinstance(value, (int, float)):
            rows.append((key, float(value)))
    rows.append(("out", str(res.out_dir)))
    _emit(rows)
    return EXIT_OK if res.status == "ok" else EXIT_BLOWUP


def cmd_sweep(args, sc: Scenario) -> int:
    res = sweep_nu(sc, threads=args.threads)
    out = write_sweep_artifacts(sc, res, _out_dir(args, sc))
    _emit([("nu_star", res.nu_star), ("objective_star", res.objective_star),
           ("excluded", len(res.excluded)), ("primary_peak_speed", res.primary_peak_speed),
           ("max_then_min_H0", "none" if res.pattern is None else f"{res.pattern[0]:.6g};{res.pattern[1]:.6g}"),
           ("out", str(out))])
    return EXIT_OK


def cmd_bounds(args, sc: Scenario) -> int:
    U0 = sc.initial_field()
    norm = sobolev_norm(U0, sc.bound_s + 1)
    rep = bound_report(sc.model.nonlinearity, norm, norm, epsilon=sobolev_norm(U0, 2),
                       s=sc.bound_s, c_const=sc.c_sk)
    out = _out_dir(args, sc)
    out.mkdir(parents=True, exist_ok=True)
    resolved = sc.resolved()
    io.write_json(out / "bounds.json", {"config": resolved, "config_hash": config_hash(resolved),
                                        "version": __version__, "bounds": rep.to_dict()})
    _emit((k, "inf" if isinstance(v, float) and math.isinf(v) else v) for k, v in vars(rep).items())
    return EXIT_OK


def cmd_norms(args, sc: Scenario) -> int:
    U0 = sc.initial_field()
    smp = sample(U0, 0.0)
    rows = [(k, getattr(smp, k)) for k in ("H0", "H1", "H2", "Linf", "mass", "momentum", "peak_x", "peak_val")]
    init = sc.initial
    if not init.solitons and init.family in ("kdv", "mkdv"):
        rows.append(("H2_closed_form", closed_form_h2(init.family, float(init.c))))
    out = _out_dir(args, sc)
    out.mkdir(parents=True, exist_ok=True)
    io.write_diagnostics_csv(out / "norms.csv", [smp])
    _emit(rows)
    return EXIT_OK


def cmd_convergence(args, sc: Scenario) -> int:
    rep = convergence_report(sc, t_end=args.t_end)
    out = _out_dir(args, sc)
    out.mkdir(parents=True, exist_ok=True)
    io.write_table(out / "convergence_time.csv", ("dt", "diff_to_next"),
                   list(zip(rep.dts, rep.time_errors + [math.nan])))
    io.write_table(out / "convergence_space.csv", ("N", "error"),
                   list(zip(rep.Ns, rep.space_errors + [math.nan] * (len(rep.Ns) - len(rep.space_errors)))))
    io.write_json(out / "convergence.json", {"version": __version__, **vars(rep)})
    _emit([("time_order", rep.time_order), ("space_reference", rep.space_reference)]
          + [(f"space_ratio_{i}", r) for i, r in enumerate(rep.space_ratios)])
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "sweep-nu": cmd_sweep,
    "bounds": cmd_bounds,
    "norms": cmd_norms,
    "convergence": cmd_convergence,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gkdvlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("config", help="scenario file (.toml, or metadata.json of an earlier run)")
        p.add_argument("--out", help="output directory (default: [output].dir of the config)")
        p.add_argument("--seedless", action="store_true", default=True,
                       help="deterministic mode; the only mode, accepted for compatibility")
        p.add_argument("--threads", type=int, default=1, help="worker threads for paired runs and sweeps")
        p.add_argument("-v", "--verbose", action="store_true")
        if name == "convergence":
            p.add_argument("--t-end", type=float, default=None, help="horizon for the refinement runs")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        sc = load(args.config)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return COMMANDS[args.command](args, sc)


if __name__ == "__main__":
    sys.exit(main())
