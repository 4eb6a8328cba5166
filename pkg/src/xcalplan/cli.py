"""Command-line interface.

Subcommands:
    propagate      dump coarse-step ECI states for the configured fleet
    access         run the access sweep and dump access_events.csv
    plan-vicarious full vicarious pipeline (forces mode VICARIOUS)
    plan-toa       full crossover pipeline (forces mode TOA)
    run            full pipeline in the configured mode
    evaluate-arch  sweep reference-constellation architectures 1-6
    report         pivot a counts.csv into per-curve plot-ready tables

Common flags: --config PATH, --out DIR, --threads N (speed only, never
results), --seed N (recorded for randomized tooling; the pipeline itself is
deterministic).
"""
from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import replace
from pathlib import Path

from .scenario import (ConfigError, dump_states, evaluate_architectures,
                       load_config, run_scenario)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xcalplan",
        description="Cross-calibration opportunity planner")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="scenario JSON file")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads (affects speed, never results)")
        p.add_argument("--seed", type=int, default=None,
                       help="seed recorded in the run manifest")
        return p

    add("propagate", "dump coarse-step ECI states")
    add("access", "dump access events over the configured sites")
    add("plan-vicarious", "vicarious site pairing pipeline")
    add("plan-toa", "top-of-atmosphere crossover pipeline")
    add("run", "full pipeline in the configured mode")
    add("evaluate-arch", "sweep reference architectures 1-6")
    report = sub.add_parser(
        "report", help="pivot counts.csv into per-curve tables")
    report.add_argument("--out", required=True,
                        help="directory containing counts.csv")
    return parser


def _force_mode(scenario, mode):
    if scenario.mode == mode:
        return scenario
    return replace(scenario, mode=mode)


def _report(out_dir: Path) -> int:
    counts_path = out_dir / "counts.csv"
    if not counts_path.exists():
        print(f"xcalplan: no counts.csv under {out_dir}", file=sys.stderr)
        return 1
    with counts_path.open(newline="") as handle:
        rows = list(csv.DictReader(handle))
    tables: dict[tuple, dict] = {}
    for row in rows:
        key = (row["criteria_label"], row["horizon_hours"])
        table = tables.setdefault(key, {})
        table.setdefault(row["dt_threshold_hours"], {})[row["test_sat"]] = \
            row["count"]
    for (label, horizon), table in sorted(tables.items()):
        sats = sorted({sat for by_sat in table.values() for sat in by_sat})
        path = out_dir / f"report_{label}_h{float(horizon):g}.csv"
        with path.open("w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["dt_threshold_hours"] + sats)
            for thr in sorted(table, key=float):
                writer.writerow([thr] + [table[thr].get(s, "0")
                                         for s in sats])
        print(f"wrote {path}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "report":
        return _report(Path(args.out))
    try:
        scenario = load_config(args.config)
        if args.command == "propagate":
            path = dump_states(scenario, args.out)
            print(f"wrote {path}")
        elif args.command == "access":
            scenario = replace(scenario, dump_access_events=True)
            from .access import compute_accesses, write_events_csv
            events = compute_accesses(
                list(scenario.reference_sats) + list(scenario.test_sats),
                scenario.sites, scenario.window, threads=args.threads)
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            write_events_csv(events, out / "access_events.csv")
            print(f"wrote {out / 'access_events.csv'} ({len(events)} events)")
        elif args.command == "evaluate-arch":
            summary = evaluate_architectures(scenario, args.out,
                                             threads=args.threads,
                                             seed=args.seed)
            for arch, info in summary["architectures"].items():
                print(f"arch {arch}: {info}")
        else:
            if args.command == "plan-vicarious":
                scenario = _force_mode(scenario, "VICARIOUS")
            elif args.command == "plan-toa":
                scenario = _force_mode(scenario, "TOA")
            summary = run_scenario(scenario, args.out, threads=args.threads,
                                   seed=args.seed)
            print(f"run complete: {summary}")
    except ConfigError as exc:
        print(f"xcalplan: configuration error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"xcalplan: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
