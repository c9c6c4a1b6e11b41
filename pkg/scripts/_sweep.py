"""Shared driver for the experiment scripts."""

from __future__ import annotations

import argparse
import statistics
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from laser import scenario as sc
from laser.cli import parse_seeds, run_seed


def sweep_family(configs: list[str], description: str):
    ap = argparse.ArgumentParser(description=description)
    ap.add_argument("--seeds", type=parse_seeds, default=parse_seeds("1..20"))
    ap.add_argument("--fast", action="store_true", help="5 seeds instead of 20")
    ap.add_argument("--out", default="results")
    ap.add_argument("--jobs", type=int, default=None)
    ap.add_argument("--svg", action="store_true")
    args = ap.parse_args()
    seeds = parse_seeds("1..5") if args.fast else args.seeds
    root = Path(__file__).resolve().parent.parent / "configs"
    print(f"{'config':<12} {'onboarded':>10} {'conv mean s':>12} {'conv max s':>11} "
          f"{'tx KiB':>8} {'leaf %':>7} {'1-hop %':>8} {'slope B':>9} {'R2':>6}")
    with ProcessPoolExecutor(max_workers=args.jobs) as pool:
        for name in configs:
            cfg = sc.load_config(root / f"{name}.cfg")
            reports = list(pool.map(run_seed, [cfg] * len(seeds), seeds))
            out = Path(args.out) / name
            sc.write_tables(reports, out)
            sc.write_runs(reports, out)
            if args.svg:
                from laser.plots import write_svgs
                write_svgs(reports, out)
            rows = [r for rep in reports for r in rep.onboarded]
            total = sum(len(rep.rows) for rep in reports)
            conv = [rep.convergence_s for rep in reports if rep.convergence_s is not None]
            reg = sc.burden_regression(reports)
            print(f"{name:<12} {len(rows):>5}/{total:<4} {statistics.fmean(conv):>12.1f} "
                  f"{max(conv):>11.1f} "
                  f"{statistics.fmean(r.tx_bytes for rep in reports for r in rep.rows) / 1024:>8.2f} "
                  f"{100 * sum(r.subtree == 0 for r in rows) / len(rows):>7.1f} "
                  f"{100 * sum(r.hops == 1 for r in rows) / len(rows):>8.1f} "
                  f"{reg.slope if reg else float('nan'):>9.0f} {reg.r2 if reg else float('nan'):>6.3f}")
