import csv
import statistics
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from islands import FAST, random_tree
from laser import scenario as sc
from laser.netsim import Network, NodeSpec
from laser.netsim.metrics import TX
from laser.protocol import ProtocolConfig, Role

SMALL = sc.ExperimentConfig(
    sc.ScenarioSpec(n_nodes=8, area_m=30.0, start_mean_s=10.0, seed=3, t_max_s=600.0),
    protocol=ProtocolConfig(pbkdf2_iterations=4))

GOOD = """
[scenario]
n_nodes = 40
area_m = 50
[radio]
reference_loss_db = 40
path_loss_exponent = 3
tx_power_dbm = 0
rx_sensitivity_dbm = -85
bitrate = 250000
[protocol]
offer_rounds = 1
[crypto]
pbkdf2_iterations = 16
"""


# -- generation ------------------------------------------------------------------------

def test_density_and_area():
    assert sc.ScenarioSpec(n_nodes=40, area_m=50).density_per_km2 == pytest.approx(16_000)
    assert sc.ScenarioSpec(n_nodes=100, area_m=400).area_km2 == pytest.approx(0.16)


def test_generation_is_seeded():
    spec = sc.ScenarioSpec(seed=11)
    assert sc.generate(spec) == sc.generate(spec)
    assert sc.generate(spec) != sc.generate(replace(spec, seed=12))


def test_generated_layout():
    spec = sc.ScenarioSpec(n_nodes=40, area_m=50)
    nodes = sc.generate(spec)
    anchor, sns = nodes[0], nodes[1:]
    assert (anchor.id, anchor.role, anchor.position) == ("an", Role.AN, (25.0, 25.0))
    assert len(sns) == 40 and len({n.id for n in sns}) == 40
    assert all(0 <= n.x <= 50 and 0 <= n.y <= 50 and n.start_s >= 0 for n in sns)


def test_start_times_have_the_configured_mean():
    nodes = sc.generate(sc.ScenarioSpec(n_nodes=10_000, area_m=1000, seed=5))
    mean = statistics.fmean(n.start_s for n in nodes[1:])
    assert mean == pytest.approx(120.0, rel=0.05)


# -- reduction ---------------------------------------------------------------------------

def _chain_log():
    specs = [NodeSpec("an", role=Role.AN), NodeSpec("a", start_s=0.5), NodeSpec("b", start_s=1.0)]
    net = Network(specs, seed=1, protocol=FAST, ideal_links=[("an", "a"), ("a", "b")])
    return net.run(300.0)


def test_chain_subtrees_and_hops():
    report = sc.reduce(_chain_log(), "chain")
    rows = {r.node_id: r for r in report.rows}
    assert report.anchor == "an" and set(rows) == {"a", "b"}
    assert (rows["a"].subtree, rows["b"].subtree) == (1, 0)
    assert (rows["a"].hops, rows["b"].hops) == (1, 2)
    assert (rows["a"].parent, rows["b"].parent) == ("an", "a")
    assert report.all_onboarded and not report.t_max_reached
    assert report.convergence_s == rows["b"].onboard_s
    assert report.ecdf()[-1] == (rows["b"].onboard_s, 1.0)
    assert report.subtree_pmf() == {0: 0.5, 1: 0.5}
    assert report.hop_pmf() == {1: 0.5, 2: 0.5}


def test_reduce_is_a_pure_function_of_the_log():
    log = _chain_log()
    digest = log.digest()
    assert sc.reduce(log, "x") == sc.reduce(log, "x")
    assert log.digest() == digest


def test_burden_matches_raw_octet_counters():
    net = sc.build(SMALL)
    log = net.run(SMALL.scenario.t_max_s)
    report = sc.reduce(log)
    raw = {}
    for r in log.of_kind(TX):
        raw[r.node] = raw.get(r.node, 0) + r.values[0]
    assert all(r.tx_bytes == raw.get(r.node_id, 0) for r in report.rows)
    assert sum(r.tx_bytes for r in report.rows) + raw.get("an", 0) == sum(raw.values())
    assert raw == net.channel.tx_octets


def test_partitioned_node_is_flagged_not_counted():
    specs = [NodeSpec("an", 0, 0, role=Role.AN), NodeSpec("near", 10, 0, 1.0),
             NodeSpec("far", 500, 0, 1.0)]
    log = Network(specs, seed=2, protocol=FAST).run(200.0)
    report = sc.reduce(log)
    assert report.unboarded == ["far"]
    assert report.t_max_reached and report.end_s == pytest.approx(200.0)
    assert [x for x, _ in report.ecdf()] == [report.rows[0].onboard_s]
    far = report.rows[1]
    assert (far.onboard_s, far.hops, far.subtree) == (None, None, 0)
    assert far.tx_bytes > 0


@settings(max_examples=50)
@given(n=st.integers(2, 40), rnd=st.randoms(use_true_random=False))
def test_subtree_sum_equals_depth_sum(n, rnd):
    parents = random_tree(rnd, n)
    sizes = sc.subtree_sizes(parents)
    assert sum(sizes.values()) == sum(sc.depths(parents).values())
    assert sizes["an"] == n - 1


def test_cycle_in_parent_map_rejected():
    with pytest.raises(ValueError):
        sc.subtree_sizes({"a": "b", "b": "a"})


def test_small_run_end_to_end():
    report = sc.reduce(sc.simulate(SMALL), "s3")
    assert report.all_onboarded and len(report.rows) == 8
    sizes = {r.node_id: r.subtree for r in report.rows}
    depth = {r.node_id: r.hops for r in report.rows}
    anchor_subtree = len(report.rows)
    assert sum(sizes.values()) + anchor_subtree == sum(depth.values())
    assert sum(report.subtree_pmf().values()) == pytest.approx(1.0)


def test_statistics_helpers():
    assert sc.ecdf([3.0, 1.0, 2.0]) == [(1.0, 1 / 3), (2.0, 2 / 3), (3.0, 1.0)]
    assert sc.pmf([0, 0, 1, 3]) == {0: 0.5, 1: 0.25, 3: 0.25}
    assert sc.sem([1.0]) == 0.0
    assert sc.sem([1.0, 3.0]) == pytest.approx(1.0)
    rows = [sc.NodeRow(str(i), 0, 0, 0, 1, b, s, 1, "an")
            for i, (b, s) in enumerate([(100, 0), (300, 0), (1000, 2)])]
    assert sc.burden_by_subtree(rows) == {0: (200.0, pytest.approx(100.0), 2), 2: (1000.0, 0.0, 1)}


def test_regression_on_exact_line():
    rows = tuple(sc.NodeRow(str(k), 0, 0, 0, 1, 500 + 250 * k, k, 1, "an") for k in range(5))
    reg = sc.burden_regression([sc.RunReport(rows, "an", 10.0, False)])
    assert reg.slope == pytest.approx(250.0) and reg.intercept == pytest.approx(500.0)
    assert reg.r2 == pytest.approx(1.0) and reg.points == 5


# -- tables -----------------------------------------------------------------------------

def test_tables_have_the_documented_columns(tmp_path):
    report = sc.reduce(_chain_log(), "chain")
    sc.write_tables([report], tmp_path)
    sc.write_runs([report], tmp_path)
    with open(tmp_path / "nodes.csv") as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == sc.NODES_HEADER
    assert [r[1] for r in rows[1:]] == ["a", "b"]
    heads = {name: open(tmp_path / name).readline().strip()
             for name in ("ecdf.csv", "burden_by_subtree.csv", "pmf.csv", "runs.csv")}
    assert heads == {
        "ecdf.csv": "onboard_s,fraction_onboarded,fraction_of_all",
        "burden_by_subtree.csv": "subtree,mean_tx_bytes,sem_tx_bytes,count",
        "pmf.csv": "statistic,value,probability",
        "runs.csv": ",".join(sc.RUNS_HEADER),
    }


def test_unboarded_rows_have_empty_cells(tmp_path):
    rows = (sc.NodeRow("n1", 1.0, 2.0, 3.0, None, 40, 0, None, None),)
    sc.write_tables([sc.RunReport(rows, "an", 1200.0, True, "r")], tmp_path)
    line = open(tmp_path / "nodes.csv").read().splitlines()[1]
    assert line == "r,n1,1.000000,2.000000,3.000000,,40,0,"


# -- config files ---------------------------------------------------------------------------

def test_good_config_parses():
    cfg = sc.parse_config(GOOD)
    assert cfg.scenario.n_nodes == 40 and cfg.scenario.start_mean_s == 120
    assert cfg.protocol.offer_rounds == 1 and cfg.protocol.pbkdf2_iterations == 16
    assert cfg.radio.range_m == pytest.approx(31.62, abs=0.01)


def test_shipped_configs_load():
    from pathlib import Path
    root = Path(__file__).resolve().parent.parent / "configs"
    loaded = {p.stem: sc.load_config(p) for p in sorted(root.glob("*.cfg"))}
    assert {"density40", "density100", "area400"} <= set(loaded)
    assert loaded["density40"].scenario.density_per_km2 == pytest.approx(16_000)
    assert loaded["area400"].scenario.area_km2 == pytest.approx(0.16)


@pytest.mark.parametrize("edit,message", [
    (lambda t: t.replace("reference_loss_db = 40\n", ""), "missing key radio.reference_loss_db"),
    (lambda t: t.replace("n_nodes = 40\n", ""), "missing key scenario.n_nodes"),
    (lambda t: t + "colour = blue\n", "unknown key crypto.colour"),
    (lambda t: t + "[extra]\n", "unknown section [extra]"),
    (lambda t: t.replace("area_m = 50", "area_m = wide"), "bad value for scenario.area_m"),
    (lambda t: t.replace("area_m = 50", "area_m = -5"), "positive"),
    (lambda t: t.replace("offer_rounds = 1", "offer_rounds = -1"), ">= 0"),
    (lambda t: t.split("[radio]")[0], "missing section [radio]"),
])
def test_config_errors_name_the_problem(edit, message):
    with pytest.raises(sc.ConfigError, match=message.replace("[", r"\[").replace("]", r"\]")):
        sc.parse_config(edit(GOOD))


def test_missing_file_is_a_config_error(tmp_path):
    with pytest.raises(sc.ConfigError, match="cannot read"):
        sc.load_config(tmp_path / "nope.cfg")
