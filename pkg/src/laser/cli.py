"""Command line: ``laser {run,sweep,trace,check-config}``."""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from . import scenario as sc

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ABORT = 3
OUT_ENV = "LASER_OUT"

log = logging.getLogger("laser")


class SimulationAbort(RuntimeError):
    pass


def parse_seeds(text: str) -> list[int]:
    """``7``, ``1..20`` (inclusive) or ``1,4,9``."""
    try:
        if ".." in text:
            lo, hi = (int(p) for p in text.split("..", 1))
            if hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        seeds = [int(p) for p in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed range {text!r}") from None
    if len(set(seeds)) != len(seeds):
        raise argparse.ArgumentTypeError("duplicate seeds")
    return seeds


def default_out(config_path: str, command: str) -> Path:
    root = Path(os.environ.get(OUT_ENV, "results"))
    return root / Path(config_path).stem / command


def run_seed(config: sc.ExperimentConfig, seed: int) -> sc.RunReport:
    try:
        return sc.reduce(sc.simulate(config.with_seed(seed)), f"seed-{seed}")
    except Exception as exc:  # surfaced as exit status 3
        raise SimulationAbort(f"seed {seed}: {exc!r}") from exc


def _summary(report: sc.RunReport) -> str:
    conv = report.convergence_s
    return (f"{report.run_id}: {len(report.onboarded)}/{len(report.rows)} onboarded, "
            f"convergence {'n/a' if conv is None else f'{conv:.1f} s'}")


def _emit(reports, out: Path, svg: bool):
    sc.write_tables(reports, out)
    sc.write_runs(reports, out)
    if svg:
        from .plots import write_svgs
        write_svgs(reports, out)


def cmd_check_config(args) -> int:
    cfg = sc.load_config(args.config)
    s = cfg.scenario
    print(f"{args.config}: ok ({s.n_nodes} nodes, {s.area_m:g} m side, "
          f"{s.density_per_km2:.0f} nodes/km2, radio range {cfg.radio.range_m:.1f} m)")
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = sc.load_config(args.config)
    seed = cfg.scenario.seed if args.seed is None else args.seed
    out = Path(args.out) if args.out else default_out(args.config, f"seed-{seed}")
    report = run_seed(cfg, seed)
    _emit([report], out, args.svg)
    log.info(_summary(report))
    if report.unboarded:
        log.info("not onboarded: %s", " ".join(report.unboarded))
    print(out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = sc.load_config(args.config)
    out = Path(args.out) if args.out else default_out(args.config, "sweep")
    jobs = args.jobs or os.cpu_count() or 1
    if jobs == 1 or len(args.seeds) == 1:
        reports = [run_seed(cfg, s) for s in args.seeds]
    else:
        with ProcessPoolExecutor(max_workers=min(jobs, len(args.seeds))) as pool:
            reports = list(pool.map(run_seed, [cfg] * len(args.seeds), args.seeds))
    for rep in reports:
        sc.write_tables([rep], out / rep.run_id)
        log.info(_summary(rep))
    _emit(reports, out, args.svg)
    reg = sc.burden_regression(reports)
    if reg is not None:
        log.info("burden vs subtree: slope %.1f B/node, R^2 %.3f", reg.slope, reg.r2)
    print(out)
    return EXIT_OK


def cmd_trace(args) -> int:
    cfg = sc.load_config(args.config)
    seed = cfg.scenario.seed if args.seed is None else args.seed
    net = sc.build(cfg.with_seed(seed), trace=True)
    try:
        metrics = net.run(cfg.scenario.t_max_s)
    except Exception as exc:
        raise SimulationAbort(repr(exc)) from exc
    out = Path(args.out) if args.out else default_out(args.config, f"trace-{seed}")
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "metrics.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("time_ns", "kind", "node", "values"))
        for r in metrics:
            w.writerow((r.time_ns, r.kind, r.node, " ".join(map(str, r.values))))
    with open(out / "events.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("time_ns", "seq", "kind", "node"))
        w.writerows((t, s, k, n or "") for t, s, k, n in net.sim.trace)
    log.info("%d events, metrics digest %s", len(net.sim.trace), metrics.digest())
    print(out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="laser", description="Island onboarding simulator.")
    p.add_argument("-v", "--verbose", action="count", default=0)
    # also accepted after the subcommand
    verbosity = argparse.ArgumentParser(add_help=False)
    verbosity.add_argument("-v", "--verbose", action="count", default=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seeds=False):
        sp.add_argument("--config", required=True)
        sp.add_argument("--out", help=f"output directory (default under ${OUT_ENV} or ./results)")
        if seeds:
            sp.add_argument("--seeds", type=parse_seeds, default=parse_seeds("1..20"))
        else:
            sp.add_argument("--seed", type=int)

    sp = sub.add_parser("run", parents=[verbosity], help="simulate one seed and write CSV tables")
    common(sp)
    sp.add_argument("--svg", action="store_true")
    sp.set_defaults(func=cmd_run)
    sp = sub.add_parser("sweep", parents=[verbosity], help="simulate a seed range and merge the tables")
    common(sp, seeds=True)
    sp.add_argument("--jobs", type=int, default=0, help="worker processes (default: all cores)")
    sp.add_argument("--svg", action="store_true")
    sp.set_defaults(func=cmd_sweep)
    sp = sub.add_parser("trace", parents=[verbosity], help="dump the event trace and metrics stream of one seed")
    common(sp)
    sp.set_defaults(func=cmd_trace)
    sp = sub.add_parser("check-config", parents=[verbosity], help="validate a config file")
    sp.add_argument("--config", required=True)
    sp.set_defaults(func=cmd_check_config)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING if args.verbose == 0 else logging.INFO if args.verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except sc.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SimulationAbort as exc:
        print(f"simulation aborted: {exc}", file=sys.stderr)
        return EXIT_ABORT


if __name__ == "__main__":
    sys.exit(main())
