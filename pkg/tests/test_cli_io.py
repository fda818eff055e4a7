import json

import numpy as np
import pytest

from entdyn.cli import cli
from entdyn.config import (
    RunConfig,
    parse_config,
    resolve_heavy,
    serialize_config,
    with_overrides,
)
from entdyn.errors import ConfigError
from entdyn.evolution import Trajectory
from entdyn.experiments import SweepTable
from entdyn.io import RunRecord, write_results
from entdyn.spectral_stats import Histogram


# --- config ---------------------------------------------------------------

def test_parse_defaults():
    cfg = parse_config("")
    assert cfg.L == 12 and cfg.runs == 50 and cfg.seed == 0
    assert cfg.prep_T == 4.5 and cfg.prep_W == 0.5
    assert len(cfg.T_list) == 37


def test_parse_values_and_comments():
    text = """
    # comment line
    L = 8
    runs = 4        # trailing comment
    protocol.kind = rqc
    protocol.alpha = 3.14
    protocol.beta = 1.0
    T_list = 0.5, 1.0, 2.0
    prep.local = true
    """
    cfg = parse_config(text)
    assert cfg.L == 8 and cfg.runs == 4
    assert cfg.protocol_kind == "rqc"
    assert cfg.T_list == (0.5, 1.0, 2.0)
    assert cfg.prep_local is True


def test_parse_errors_name_the_key():
    with pytest.raises(ConfigError, match="bogus"):
        parse_config("bogus = 3\n")
    with pytest.raises(ConfigError, match="runs"):
        parse_config("runs = many\n")
    with pytest.raises(ConfigError, match="L"):
        parse_config("L = 8\nL = 10\n")  # duplicate
    with pytest.raises(ConfigError, match="protocol.kind"):
        parse_config("protocol.W = 5.0\n")
    err = None
    try:
        parse_config("protocol.jz = 1.0\n")
    except ConfigError as exc:
        err = exc
    assert err is not None and err.key == "protocol.kind"


def test_parse_rejects_garbage_lines():
    with pytest.raises(ConfigError):
        parse_config("L 8\n")


def test_round_trip_equality():
    texts = [
        "",
        "L = 8\nruns = 2\n",
        "protocol.kind = floquet_mbl\nprotocol.T0 = 0.9\n",
        "protocol.kind = rqc\nprotocol.alpha = 1\nprotocol.beta = 2\nT_list = 1,2,3\n",
    ]
    for text in texts:
        cfg = parse_config(text)
        out = serialize_config(cfg)
        again = parse_config(out)
        assert again == cfg
        assert serialize_config(again) == out


def test_with_overrides_marks_seen():
    cfg = parse_config("")
    cfg2 = with_overrides(cfg, L=8, seed=11)
    assert cfg2.L == 8 and cfg2.seed == 11
    assert "L" in cfg2.seen and "seed" in cfg2.seen
    # None overrides are ignored
    cfg3 = with_overrides(cfg2, L=None)
    assert cfg3.L == 8


def test_resolve_heavy_defaults():
    cfg = resolve_heavy(with_overrides(parse_config(""), heavy=True))
    assert cfg.L == 16 and cfg.runs == 72
    # explicit values win over the heavy defaults
    cfg2 = resolve_heavy(with_overrides(parse_config("L = 10\n"), heavy=True))
    assert cfg2.L == 10 and cfg2.runs == 72
    cfg3 = resolve_heavy(parse_config(""))
    assert cfg3.L == 12 and cfg3.runs == 50


# --- writers ---------------------------------------------------------------

def _record(payload, command="sweep"):
    return RunRecord(
        command=command,
        config_text="L = 6\n",
        code_version="0.0-test",
        master_seed=0,
        payload=payload,
        summary={"note": "test"},
        wall_clock_seconds=1.23,
    )


def test_sweep_csv_header_and_meta(tmp_path):
    table = SweepTable(
        T=np.array([0.5, 1.0]),
        s_initial=np.array([0.1, 0.2]),
        s_sat=np.array([1.0, 0.9]),
        stderr_initial=np.array([0.01, 0.01]),
        stderr_sat=np.array([0.02, 0.02]),
        runs=2,
        meta={"kind": "thermal"},
    )
    paths = write_results(_record(table), tmp_path)
    csv = (tmp_path / "sweep.csv").read_text()
    assert csv.splitlines()[0] == "T,S_initial,S_sat,delta_S,stderr_initial,stderr_sat,runs"
    meta = json.loads((tmp_path / "sweep.meta.json").read_text())
    assert meta["schema_version"] == 1
    assert meta["command"] == "sweep"
    assert "wall_clock" not in json.dumps(meta)
    assert sorted(str(p) for p in paths) == sorted(
        str(p) for p in [tmp_path / "sweep.csv", tmp_path / "sweep.meta.json"]
    )


def test_trajectory_csv_headers(tmp_path):
    traj = Trajectory(times=np.array([0.0, 1.0]), hcee=np.array([0.0, 0.5]))
    write_results(_record(traj, command="evolve"), tmp_path)
    assert (tmp_path / "trajectory.csv").read_text().splitlines()[0] == "time,hcee"
    traj2 = Trajectory(
        times=np.array([0.0, 1.0]),
        hcee=np.array([0.0, 0.5]),
        baee=np.array([0.1, 0.6]),
    )
    write_results(_record(traj2, command="evolve"), tmp_path)
    assert (tmp_path / "trajectory.csv").read_text().splitlines()[0] == "time,hcee,baee"


def test_histogram_csv_header(tmp_path):
    hist = Histogram(
        bin_left=np.array([0.0, 0.5]),
        bin_right=np.array([0.5, 1.0]),
        density=np.array([1.0, 1.0]),
    )
    write_results(_record(hist, command="levelstats"), tmp_path)
    assert (
        tmp_path / "histogram.csv"
    ).read_text().splitlines()[0] == "bin_left,bin_right,density"


def test_rewrite_is_byte_identical(tmp_path):
    table = SweepTable(
        T=np.array([0.5]),
        s_initial=np.array([0.1]),
        s_sat=np.array([1.0]),
        stderr_initial=np.array([0.0]),
        stderr_sat=np.array([0.0]),
        runs=1,
        meta={},
    )
    write_results(_record(table), tmp_path)
    first = {p.name: p.read_bytes() for p in tmp_path.iterdir()}
    # a different wall clock must not leak into any file
    rec = _record(table)
    rec.wall_clock_seconds = 9999.0
    write_results(rec, tmp_path)
    second = {p.name: p.read_bytes() for p in tmp_path.iterdir()}
    assert first == second


def test_floats_survive_round_trip(tmp_path):
    value = 0.1 + 0.2  # not exactly 0.3
    traj = Trajectory(times=np.array([value]), hcee=np.array([1.0 / 3.0]))
    write_results(_record(traj, command="evolve"), tmp_path)
    line = (tmp_path / "trajectory.csv").read_text().splitlines()[1]
    t, h = line.split(",")
    assert float(t) == value
    assert float(h) == 1.0 / 3.0


# --- CLI -------------------------------------------------------------------

def test_cli_markov_and_rerun_bytes(tmp_path, capsys):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    cfg = tmp_path / "cfg.txt"
    cfg.write_text("L = 4\nmarkov.steps = 50000\nmarkov.burn_in = 500\n")
    assert cli(["markov", "--config", str(cfg), "--out", str(out1)]) == 0
    assert cli(["markov", "--config", str(cfg), "--out", str(out2)]) == 0
    stdout = capsys.readouterr().out
    assert len(stdout.strip().splitlines()) == 2  # one line per invocation
    a = json.loads((out1 / "markov_report.json").read_text())
    assert a["N"] == 3
    for name in ("markov_report.json",):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
    # metadata differs only in the out path inside the echoed config
    ma = json.loads((out1 / "markov_report.meta.json").read_text())
    mb = json.loads((out2 / "markov_report.meta.json").read_text())
    ma["config"] = mb["config"] = ""
    assert ma == mb


def test_cli_basis(tmp_path, capsys):
    out = tmp_path / "basis"
    assert cli(["basis", "--L", "6", "--out", str(out)]) == 0
    lines = (out / "basis.csv").read_text().splitlines()
    assert lines[0] == "ordinal,word,bits"
    assert len(lines) == 21
    capsys.readouterr()


def test_cli_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("nonsense = 1\n")
    assert cli(["basis", "--config", str(bad), "--out", str(tmp_path)]) == 2
    missing = tmp_path / "nope.txt"
    assert cli(["basis", "--config", str(missing), "--out", str(tmp_path)]) == 2
    # sweep without protocol.kind
    empty = tmp_path / "empty.txt"
    empty.write_text("L = 6\n")
    assert cli(["sweep", "--config", str(empty), "--out", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert "protocol.kind" in err


def test_cli_evolve_rejects_rqc(tmp_path, capsys):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text(
        "L = 6\nruns = 1\nprotocol.kind = rqc\nprotocol.alpha = 1\nprotocol.beta = 1\n"
    )
    assert cli(["evolve", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert "rqc" in capsys.readouterr().err


def test_cli_rqc_requires_rqc_kind(tmp_path, capsys):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text("L = 6\nruns = 1\nprotocol.kind = thermal\n")
    assert cli(["rqc", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    capsys.readouterr()


def test_cli_sweep_small_end_to_end(tmp_path, capsys):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text(
        "L = 6\nruns = 2\nprotocol.kind = thermal\nT_list = 0.0, 2.0, 16.0\n"
    )
    out = tmp_path / "res"
    assert cli(["sweep", "--config", str(cfg), "--out", str(out)]) == 0
    stdout = capsys.readouterr().out.strip()
    assert stdout.count("\n") == 0
    assert "class=" in stdout
    lines = (out / "sweep.csv").read_text().splitlines()
    assert len(lines) == 4


def test_cli_levelstats_small(tmp_path, capsys):
    out = tmp_path / "ls"
    assert cli(["levelstats", "--L", "8", "--runs", "3", "--out", str(out)]) == 0
    meta = json.loads((out / "histogram.meta.json").read_text())
    assert meta["W"] == 5.0  # disordered chain is the default subject
    capsys.readouterr()


def test_cli_eigensweep_small(tmp_path, capsys):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text("L = 6\nruns = 1\nT_list = 1.0\neigensweep.ranks = 1, 10, 20\n")
    out = tmp_path / "es"
    assert cli(["eigensweep", "--config", str(cfg), "--out", str(out)]) == 0
    lines = (out / "eigensweep.csv").read_text().splitlines()
    assert lines[0] == "rank,energy,S_initial,S_sat,delta_S,stderr_initial,stderr_sat,runs"
    assert len(lines) == 4
    capsys.readouterr()


def test_cli_baee_and_reservoir_small(tmp_path, capsys):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text("L = 6\nruns = 1\nT_list = 0.0, 4.5\n")
    out1 = tmp_path / "b"
    out2 = tmp_path / "r"
    assert cli(["baee", "--config", str(cfg), "--out", str(out1)]) == 0
    assert (out1 / "trajectory.csv").read_text().splitlines()[0] == "time,hcee,baee"
    assert cli(["reservoir", "--config", str(cfg), "--out", str(out2)]) == 0
    assert (out2 / "reservoir.csv").read_text().splitlines()[0] == "T,hcee,baee,excess"
    capsys.readouterr()
