"""Command-line entry point: ``uavfso {solve,sweep,validate}``."""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from .optimizer import altitude_table, auxiliary_altitudes, fso_snr, solve
from .params import Scenario, ScenarioError, load_scenario
from .sweeps import (PRESETS, SWEEPABLE, fmt, metadata_line, preset_jobs, run_job, sweep,
                     write_csv)
from .oracles import RNG_NAME
from .validation import run_validation, write_validation_csv

PROFILE_COLUMNS = ("h_u", "ee_u_tilde", "ee_u_exact", "p_u", "c_edge", "omega",
                   "p_rec_fixed_p_f", "p_rec_optimized_p_f", "p_f", "rho")


def _scenario(args) -> Scenario:
    return load_scenario(args.config) if args.config else Scenario()


def _open_out(path):
    if path is None:
        return sys.stdout, False
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w", encoding="utf-8", newline=""), True


def cmd_solve(args):
    scenario = _scenario(args)
    rep = solve(scenario, args.delta, workers=args.workers)
    d = rep.design
    print(metadata_line(scenario, delta=args.delta))
    for key, value in (("h_u", d.h_u), ("p_u", d.p_u), ("p_f", d.p_f), ("rho", d.rho),
                       ("ee_system", rep.ee_system), ("ee_u_tilde", rep.ee_u_tilde),
                       ("c_edge", rep.c_edge), ("q_i", rep.q.q_i), ("q_e", rep.q.q_e),
                       ("fbr_slack", rep.fbr_slack), ("fph_slack", rep.fph_slack),
                       ("snr_fso", fso_snr(rep, scenario)),
                       ("altitudes_searched", len(rep.altitude_profile))):
        print(f"{key} = {fmt(value)}")
    if args.out:
        table = altitude_table(scenario, args.delta, profile=rep.altitude_profile)
        h_ph, h_mc = auxiliary_altitudes(scenario, table=table)
        h_ph_opt, _ = auxiliary_altitudes(scenario, table=table, p_f="optimized")
        stream, close = _open_out(args.out)
        try:
            stream.write(metadata_line(scenario, delta=args.delta) + "\n")
            stream.write(f"# h_ee={fmt(d.h_u)} h_ph={fmt(h_ph)} h_ph_optimized_p_f={fmt(h_ph_opt)} "
                         f"h_mc={fmt(h_mc)}\n")
            w = csv.writer(stream, lineterminator="\n")
            w.writerow(PROFILE_COLUMNS)
            cols = (table.h_u, table.ee_u_tilde, table.ee_u_exact, table.p_u, table.c_edge,
                    table.omega, d.p_f * table.omega, table.p_rec, table.p_f, table.rho)
            for row in zip(*cols):
                w.writerow([fmt(x) for x in row])
        finally:
            if close:
                stream.close()
    return 0


def cmd_sweep(args):
    scenario = _scenario(args) if args.config else None
    if args.preset:
        jobs = preset_jobs(args.preset, scenario)
        tables = [run_job(j, args.delta, workers=args.workers) for j in jobs]
        scenarios = [j.scenario for j in jobs]
    else:
        if not args.param or args.range is None:
            raise SystemExit("sweep needs --preset, or --param with --range")
        scenario = scenario or Scenario()
        lo, hi = args.range
        values = np.geomspace(lo, hi, args.steps) if args.log else np.linspace(lo, hi, args.steps)
        table = sweep(scenario, args.param, values, args.delta, p_u=args.p_u, h_u=args.h_u,
                      workers=args.workers)
        table.meta.update(table=args.param, swept=args.param)
        tables, scenarios = [table], [scenario]

    for table, sc in zip(tables, scenarios):
        header = metadata_line(sc, delta=args.delta, preset=args.preset)
        if args.out and len(tables) > 1:
            out = Path(args.out) / f"{table.meta['table']}.csv"
        else:
            out = args.out
        stream, close = _open_out(out)
        try:
            write_csv(table, stream, header)
        finally:
            if close:
                stream.close()
    return 0


def cmd_validate(args):
    scenario = _scenario(args)
    checks = run_validation(scenario, seed=args.seed, n_drops=args.drops, delta=args.delta)
    stream, close = _open_out(args.out)
    try:
        write_validation_csv(checks, stream, metadata_line(scenario, delta=args.delta, seed=args.seed,
                                                           drops=args.drops, rng=RNG_NAME))
    finally:
        if close:
            stream.close()
    failed = [c.name for c in checks if not c.passed]
    if failed:
        print("failed checks: " + ", ".join(failed), file=sys.stderr)
        return 1
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="uavfso", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="INI scenario file (defaults if omitted)")
    common.add_argument("--delta", type=float, default=1.0, metavar="METERS",
                        help="altitude grid step (default 1)")
    common.add_argument("--out", metavar="PATH", help="output file (directory for multi-table presets)")
    common.add_argument("--workers", type=int, default=None, help="threads for altitude/grid evaluation")

    p = sub.add_parser("solve", parents=[common], help="optimize one scenario")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", parents=[common], help="parameter sweep or figure preset")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--param", choices=SWEEPABLE)
    p.add_argument("--range", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--steps", type=int, default=21)
    p.add_argument("--log", action="store_true", help="log-spaced values")
    p.add_argument("--p-u", type=float, default=None, help="fixed UAV power for h_u sweeps")
    p.add_argument("--h-u", type=float, default=None, help="fixed altitude for p_u sweeps")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", parents=[common], help="run the oracle/property suite")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--drops", type=int, default=100_000)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"invalid scenario: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
