import argparse
import csv
import filecmp
from pathlib import Path

import pytest

from laser import cli

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

TINY = """
[scenario]
name = tiny
n_nodes = 6
area_m = 30
start_mean_s = 10
t_max_s = 400
[radio]
reference_loss_db = 40
path_loss_exponent = 3
tx_power_dbm = 0
rx_sensitivity_dbm = -85
bitrate = 250000
[crypto]
pbkdf2_iterations = 8
"""


@pytest.fixture
def tiny(tmp_path):
    path = tmp_path / "tiny.cfg"
    path.write_text(TINY)
    return path


def _rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_run_density40_seed1_writes_forty_rows(tmp_path, capsys):
    out = tmp_path / "run"
    assert cli.main(["run", "--config", str(CONFIGS / "density40.cfg"), "--seed", "1",
                     "--out", str(out)]) == 0
    rows = _rows(out / "nodes.csv")
    assert len(rows) == 40 and all(r["run_id"] == "seed-1" for r in rows)
    assert {"ecdf.csv", "burden_by_subtree.csv", "pmf.csv", "runs.csv"} <= {p.name for p in out.iterdir()}
    assert capsys.readouterr().out.strip() == str(out)


def test_check_config_reports_the_missing_key(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text(TINY.replace("rx_sensitivity_dbm = -85\n", ""))
    assert cli.main(["check-config", "--config", str(bad)]) == cli.EXIT_CONFIG
    assert "missing key radio.rx_sensitivity_dbm" in capsys.readouterr().err


def test_check_config_accepts_shipped_configs(capsys):
    for cfg in sorted(CONFIGS.glob("*.cfg")):
        assert cli.main(["check-config", "--config", str(cfg)]) == 0
    assert "16000 nodes/km2" in capsys.readouterr().out


def test_sweep_writes_one_directory_per_seed_and_merged_tables(tiny, tmp_path):
    out = tmp_path / "sweep"
    assert cli.main(["sweep", "--config", str(tiny), "--seeds", "1..3", "--jobs", "1",
                     "--out", str(out)]) == 0
    assert sorted(p.name for p in out.iterdir() if p.is_dir()) == ["seed-1", "seed-2", "seed-3"]
    merged = _rows(out / "nodes.csv")
    assert len(merged) == 18
    assert [r["run_id"] for r in _rows(out / "runs.csv")] == ["seed-1", "seed-2", "seed-3"]
    per_seed = sum(len(_rows(out / f"seed-{s}" / "nodes.csv")) for s in (1, 2, 3))
    assert per_seed == 18


def test_sweep_is_byte_identical_across_runs_and_worker_counts(tiny, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(["sweep", "--config", str(tiny), "--seeds", "1,2", "--jobs", "1", "--out", str(a)]) == 0
    assert cli.main(["sweep", "--config", str(tiny), "--seeds", "1,2", "--jobs", "2", "--out", str(b)]) == 0
    cmp = filecmp.dircmp(a, b)
    names = [p.relative_to(a) for p in a.rglob("*.csv")]
    assert names and all(filecmp.cmp(a / n, b / n, shallow=False) for n in names)
    assert not cmp.left_only and not cmp.right_only


def test_output_root_comes_from_the_environment(tiny, tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUT_ENV, str(tmp_path / "root"))
    assert cli.main(["run", "--config", str(tiny), "--seed", "2"]) == 0
    assert (tmp_path / "root" / "tiny" / "seed-2" / "nodes.csv").exists()


def test_trace_dumps_events_and_metrics(tiny, tmp_path):
    out = tmp_path / "trace"
    assert cli.main(["-v", "trace", "--config", str(tiny), "--out", str(out)]) == 0
    events = (out / "events.csv").read_text().splitlines()
    assert events[0] == "time_ns,seq,kind,node" and len(events) > 100
    assert (out / "metrics.csv").read_text().startswith("time_ns,kind,node,values")


def test_simulation_failure_exits_with_status_3(tiny, monkeypatch, capsys):
    def boom(config):
        raise RuntimeError("radio on fire")
    monkeypatch.setattr(cli.sc, "simulate", boom)
    assert cli.main(["run", "--config", str(tiny), "--out", "unused"]) == cli.EXIT_ABORT
    assert "radio on fire" in capsys.readouterr().err


def test_unknown_flags_are_rejected(tiny):
    with pytest.raises(SystemExit) as exc:
        cli.main(["run", "--config", str(tiny), "--bogus"])
    assert exc.value.code == 2


def test_verbosity_before_or_after_the_subcommand(tiny):
    parser = cli.build_parser()
    assert parser.parse_args(["-vv", "check-config", "--config", "x"]).verbose == 2
    assert parser.parse_args(["check-config", "-v", "--config", "x"]).verbose == 1
    assert parser.parse_args(["check-config", "--config", "x"]).verbose == 0


@pytest.mark.parametrize("text,seeds", [("7", [7]), ("1..4", [1, 2, 3, 4]), ("3,1,9", [3, 1, 9])])
def test_seed_ranges(text, seeds):
    assert cli.parse_seeds(text) == seeds


@pytest.mark.parametrize("text", ["", "4..1", "a", "1,1", "1..x"])
def test_bad_seed_ranges(text):
    with pytest.raises(argparse.ArgumentTypeError):
        cli.parse_seeds(text)
