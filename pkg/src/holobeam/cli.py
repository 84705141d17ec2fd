"""Command-line entry point: ``simulate [sweep|ceilings|validate]``."""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .experiment import Scenario, ScenarioError, emit_csv, emit_manifest, emit_plot_script, run_sweep
from .validation import ceiling_table, run_checks

SUBCOMMANDS = ("sweep", "ceilings", "validate")


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simulate",
        description="Holographic-surface hybrid beamforming sweeps under hardware impairments.",
    )
    parser.add_argument("command", nargs="?", choices=SUBCOMMANDS, default="sweep",
                        help="sweep (default), ceilings or validate")
    parser.add_argument("--config", type=Path, help="YAML or JSON scenario file")
    parser.add_argument("--paper-scale", action="store_true",
                        help="16x16 surface and at least 200 trials per point")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--out", type=Path, default=Path("out"), help="output directory for sweep")
    parser.add_argument("--threads", type=int, default=1, help="worker threads for sweep trials")
    parser.add_argument("--only", type=int, nargs="+", metavar="N",
                        help="validate: run only the numbered checks")
    return parser


def _scenario(args) -> Scenario:
    sc = Scenario.load(args.config) if args.config else Scenario()
    if args.seed is not None:
        if args.seed < 0 or args.seed >= 2**64:
            raise ScenarioError("seed", "must be an unsigned 64-bit integer")
        sc = sc.replace(seed=args.seed)
    return sc.full_scale() if args.paper_scale else sc


def _sweep(args) -> int:
    sc = _scenario(args)
    try:
        args.out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"could not create output directory {args.out}: {exc}") from exc
    start = time.perf_counter()
    records = run_sweep(sc, threads=args.threads)
    elapsed = time.perf_counter() - start
    csv_path = emit_csv(records, args.out / "records.csv")
    emit_plot_script(sc.axis, args.out)
    emit_manifest(sc, args.out, {"records": csv_path.name, "rows": len(records)})
    print(f"{'value':>10}  {'architecture':<18} {'SE (bit/s/Hz)':>14} {'EE (Mbit/J)':>12} {'rho (W)':>10}")
    for r in records:
        if r.is_mean:
            print(f"{r.value:>10g}  {r.architecture:<18} {r.se:>14.4f} {r.ee / 1e6:>12.4f} {r.rho:>10.4g}")
    print(f"wrote {len(records)} records to {csv_path} in {elapsed:.1f}s")
    return 0


def _ceilings(args) -> int:
    sc = _scenario(args)
    print(f"K={sc.users}, M={sc.rf_chains}, N={sc.nx * sc.ny}, B={sc.bandwidth_hz / 1e6:g} MHz")
    print(f"{'eps_t':>6} {'eps_r':>6}  {'architecture':<18} {'SE ceiling (bit/s/Hz)':>22} {'EE bound (Mbit/J)':>18}")
    for row in ceiling_table(sc):
        print(f"{row['epsilon_t']:>6g} {row['epsilon_r']:>6g}  {row['architecture']:<18} "
              f"{row['se_ceiling']:>22.4f} {row['ee_bound'] / 1e6:>18.4f}")
    return 0


def _validate(args) -> int:
    results = run_checks(args.only)
    for res in results:
        print(res.line(), flush=True)
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 1 if failed else 0


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    handler = {"sweep": _sweep, "ceilings": _ceilings, "validate": _validate}[args.command]
    try:
        return handler(args)
    except (ScenarioError, ValueError, OSError) as exc:
        print(f"simulate: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
