"""Scenario generation, config files, metrics reduction and CSV output."""

from __future__ import annotations

import configparser
import csv
import math
import random
import statistics
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .netsim.metrics import END, NODE, ONBOARD, START, TX, MetricsLog
from .netsim.network import Network, NodeSpec
from .netsim.radio import RadioModel
from .protocol.config import ProtocolConfig
from .protocol.node import Role

ANCHOR_ID = "an"
IM_ID = "im"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ScenarioSpec:
    """``n_nodes`` standard nodes in a square, one anchor at its centre."""

    n_nodes: int = 40
    area_m: float = 50.0
    start_mean_s: float = 120.0
    seed: int = 1
    t_max_s: float = 1200.0
    name: str = "scenario"

    def __post_init__(self):
        if self.n_nodes < 1:
            raise ConfigError("n_nodes must be >= 1")
        if self.area_m <= 0 or self.start_mean_s <= 0 or self.t_max_s <= 0:
            raise ConfigError("area_m, start_mean_s and t_max_s must be positive")

    @property
    def area_km2(self) -> float:
        return (self.area_m / 1000.0) ** 2

    @property
    def density_per_km2(self) -> float:
        return self.n_nodes / self.area_km2

    @property
    def anchor_position(self) -> tuple[float, float]:
        return (self.area_m / 2, self.area_m / 2)


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: ScenarioSpec = field(default_factory=ScenarioSpec)
    radio: RadioModel = field(default_factory=RadioModel)
    protocol: ProtocolConfig = field(default_factory=ProtocolConfig)

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return replace(self, scenario=replace(self.scenario, seed=seed))


# -- config files --------------------------------------------------------------

_SCENARIO_KEYS = {"n_nodes": int, "area_m": float, "start_mean_s": float, "seed": int,
                  "t_max_s": float, "name": str}
_RADIO_KEYS = {f.name: f.type for f in fields(RadioModel)}
_PROTOCOL_KEYS = {f.name: f.type for f in fields(ProtocolConfig) if f.name != "pbkdf2_iterations"}
_REQUIRED = {"scenario": ("n_nodes", "area_m"), "radio": tuple(_RADIO_KEYS)}
_CASTS = {"int": int, "float": float, "str": str, int: int, float: float, str: str}


def _section(parser: configparser.ConfigParser, name: str, schema: dict) -> dict:
    if not parser.has_section(name):
        if name in _REQUIRED:
            raise ConfigError(f"missing section [{name}]")
        return {}
    values = {}
    for key, raw in parser.items(name):
        if key not in schema:
            raise ConfigError(f"unknown key {name}.{key}")
        cast = _CASTS[schema[key]]
        try:
            values[key] = cast(raw)
        except ValueError:
            raise ConfigError(f"bad value for {name}.{key}: {raw!r}") from None
    for key in _REQUIRED.get(name, ()):
        if key not in values:
            raise ConfigError(f"missing key {name}.{key}")
    return values


def parse_config(text: str, source: str = "<string>") -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    known = {"scenario", "radio", "protocol", "crypto"}
    extra = set(parser.sections()) - known
    if extra:
        raise ConfigError(f"unknown section [{sorted(extra)[0]}]")
    scenario = _section(parser, "scenario", _SCENARIO_KEYS)
    radio = _section(parser, "radio", _RADIO_KEYS)
    protocol = _section(parser, "protocol", _PROTOCOL_KEYS)
    protocol.update(_section(parser, "crypto", {"pbkdf2_iterations": int}))
    try:
        return ExperimentConfig(ScenarioSpec(**scenario), RadioModel(**radio), ProtocolConfig(**protocol))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text, str(path))


# -- generation and execution ----------------------------------------------------

def generate(spec: ScenarioSpec) -> list[NodeSpec]:
    rng = random.Random(f"{spec.seed}/placement")
    cx, cy = spec.anchor_position
    nodes = [NodeSpec(ANCHOR_ID, cx, cy, 0.0, Role.AN)]
    rate = 1.0 / spec.start_mean_s
    for i in range(1, spec.n_nodes + 1):
        x = rng.uniform(0.0, spec.area_m)
        y = rng.uniform(0.0, spec.area_m)
        nodes.append(NodeSpec(f"n{i}", x, y, rng.expovariate(rate)))
    return nodes


def build(config: ExperimentConfig, trace: bool = False) -> Network:
    spec = config.scenario
    return Network(generate(spec), spec.seed, IM_ID, config.radio, config.protocol, trace=trace)


def simulate(config: ExperimentConfig) -> MetricsLog:
    return build(config).run(config.scenario.t_max_s)


# -- reduction -------------------------------------------------------------------

@dataclass(frozen=True)
class NodeRow:
    node_id: str
    x: float
    y: float
    start_s: Optional[float]
    onboard_s: Optional[float]
    tx_bytes: int
    subtree: int
    hops: Optional[int]
    parent: Optional[str]

    @property
    def onboarded(self) -> bool:
        return self.onboard_s is not None


def subtree_sizes(parents: dict[str, str]) -> dict[str, int]:
    """Descendant counts for every node appearing in a child -> parent map."""
    sizes = {n: 0 for n in parents}
    for p in parents.values():
        sizes.setdefault(p, 0)
    for child in parents:
        seen = {child}
        p = parents.get(child)
        while p is not None:
            if p in seen:
                raise ValueError("parent map contains a cycle")
            seen.add(p)
            sizes[p] += 1
            p = parents.get(p)
    return sizes


def depths(parents: dict[str, str]) -> dict[str, int]:
    out = {}
    for child in parents:
        d, p = 0, child
        while p in parents:
            d += 1
            p = parents[p]
        out[child] = d
    return out


@dataclass(frozen=True)
class RunReport:
    rows: tuple[NodeRow, ...]
    anchor: str
    end_s: float
    t_max_reached: bool
    run_id: str = ""

    @property
    def onboarded(self) -> list[NodeRow]:
        return [r for r in self.rows if r.onboarded]

    @property
    def unboarded(self) -> list[str]:
        return [r.node_id for r in self.rows if not r.onboarded]

    @property
    def all_onboarded(self) -> bool:
        return not self.unboarded

    @property
    def convergence_s(self) -> Optional[float]:
        times = [r.onboard_s for r in self.onboarded]
        return max(times) if times else None

    def ecdf(self) -> list[tuple[float, float]]:
        return ecdf([r.onboard_s for r in self.onboarded])

    def burden_by_subtree(self) -> dict[int, tuple[float, float, int]]:
        return burden_by_subtree(self.onboarded)

    def subtree_pmf(self) -> dict[int, float]:
        return pmf(r.subtree for r in self.onboarded)

    def hop_pmf(self) -> dict[int, float]:
        return pmf(r.hops for r in self.onboarded)


def reduce(log: MetricsLog, run_id: str = "") -> RunReport:
    """Per-node statistics from a metrics stream; the anchor is excluded."""
    order: list[str] = []
    pos: dict[str, tuple[float, float]] = {}
    anchor = None
    starts: dict[str, float] = {}
    onboard: dict[str, tuple[float, str, int]] = {}
    tx: dict[str, int] = {}
    end_s, t_max_reached = 0.0, False
    for r in log:
        t = r.time_ns / 1e9
        if r.kind == NODE:
            order.append(r.node)
            pos[r.node] = (r.values[0], r.values[1])
            if r.values[2] == Role.AN.value:
                anchor = r.node
        elif r.kind == START:
            starts[r.node] = t
        elif r.kind == ONBOARD:
            onboard[r.node] = (t, r.values[0], r.values[1])
        elif r.kind == TX:
            tx[r.node] = tx.get(r.node, 0) + r.values[0]
        elif r.kind == END:
            end_s, t_max_reached = t, bool(r.values[0])
    parents = {n: p for n, (_, p, _) in onboard.items()}
    sizes = subtree_sizes(parents)
    rows = []
    for n in order:
        if n == anchor:
            continue
        ob = onboard.get(n)
        rows.append(NodeRow(n, pos[n][0], pos[n][1], starts.get(n),
                            None if ob is None else ob[0], tx.get(n, 0), sizes.get(n, 0),
                            None if ob is None else ob[2], None if ob is None else ob[1]))
    return RunReport(tuple(rows), anchor, end_s, t_max_reached, run_id)


def ecdf(values: Iterable[float]) -> list[tuple[float, float]]:
    xs = sorted(values)
    n = len(xs)
    return [(x, (i + 1) / n) for i, x in enumerate(xs)]


def pmf(values: Iterable[int]) -> dict[int, float]:
    vals = list(values)
    if not vals:
        return {}
    counts: dict[int, int] = {}
    for v in vals:
        counts[v] = counts.get(v, 0) + 1
    return {k: counts[k] / len(vals) for k in sorted(counts)}


def sem(values: Sequence[float]) -> float:
    if len(values) < 2:
        return 0.0
    return statistics.stdev(values) / math.sqrt(len(values))


def burden_by_subtree(rows: Iterable[NodeRow]) -> dict[int, tuple[float, float, int]]:
    """subtree size -> (mean tx bytes, standard error, count)."""
    groups: dict[int, list[float]] = {}
    for r in rows:
        groups.setdefault(r.subtree, []).append(r.tx_bytes)
    return {k: (statistics.fmean(v), sem(v), len(v)) for k, v in sorted(groups.items())}


@dataclass(frozen=True)
class Regression:
    slope: float
    intercept: float
    r2: float
    points: int


def burden_regression(reports: Sequence[RunReport]) -> Optional[Regression]:
    """Linear fit of mean burden against subtree size, pooling runs per size."""
    table = burden_by_subtree(r for rep in reports for r in rep.onboarded)
    if len(table) < 2:
        return None
    xs = list(table)
    ys = [table[k][0] for k in xs]
    fit = statistics.linear_regression(xs, ys)
    r = statistics.correlation(xs, ys) if len(set(ys)) > 1 else 0.0
    return Regression(fit.slope, fit.intercept, r * r, len(xs))


# -- CSV output -----------------------------------------------------------------------

def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def _write(path: Path, header: Sequence[str], rows: Iterable[Sequence]):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


NODES_HEADER = ("run_id", "node_id", "x", "y", "start_s", "onboard_s", "tx_bytes", "subtree", "hops")


def _node_rows(reports: Sequence[RunReport]):
    for rep in reports:
        for r in rep.rows:
            yield (rep.run_id, r.node_id, r.x, r.y, r.start_s, r.onboard_s, r.tx_bytes,
                   r.subtree, r.hops)


def write_tables(reports: Sequence[RunReport], outdir: str | Path) -> list[Path]:
    """nodes.csv, ecdf.csv, burden_by_subtree.csv and pmf.csv pooled over ``reports``."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    onboarded = [r for rep in reports for r in rep.onboarded]
    total = sum(len(rep.rows) for rep in reports)
    paths = [out / "nodes.csv", out / "ecdf.csv", out / "burden_by_subtree.csv", out / "pmf.csv"]
    _write(paths[0], NODES_HEADER, _node_rows(reports))
    times = sorted(r.onboard_s for r in onboarded)
    _write(paths[1], ("onboard_s", "fraction_onboarded", "fraction_of_all"),
           ((t, f, (i + 1) / total) for i, (t, f) in enumerate(ecdf(times))))
    _write(paths[2], ("subtree", "mean_tx_bytes", "sem_tx_bytes", "count"),
           ((k, m, s, n) for k, (m, s, n) in burden_by_subtree(onboarded).items()))
    rows = [("subtree", k, p) for k, p in pmf(r.subtree for r in onboarded).items()]
    rows += [("hops", k, p) for k, p in pmf(r.hops for r in onboarded).items()]
    _write(paths[3], ("statistic", "value", "probability"), rows)
    return paths


RUNS_HEADER = ("run_id", "nodes", "onboarded", "convergence_s", "mean_tx_bytes", "t_max_reached")


def write_runs(reports: Sequence[RunReport], outdir: str | Path) -> Path:
    path = Path(outdir) / "runs.csv"

    def rows():
        for rep in reports:
            txs = [r.tx_bytes for r in rep.rows]
            yield (rep.run_id, len(rep.rows), len(rep.onboarded), rep.convergence_s,
                   statistics.fmean(txs) if txs else 0.0, int(rep.t_max_reached))

    _write(path, RUNS_HEADER, rows())
    return path
