from __future__ import annotations

import io
import json

import pytest

from predwave import cli, cli_io

FAST_GRID = ["--L", "200", "--nx", "256"]


def call(argv, tmp_path):
    buf = io.StringIO()
    code = cli.main(list(argv) + ["--out", str(tmp_path)], stdout=buf)
    return code, buf.getvalue()


def test_thresholds_json(tmp_path):
    code, out = call(["thresholds", "--E", "2", "--alpha", "2"], tmp_path)
    assert code == 0
    data = json.loads(out)
    assert data["h_star"] == pytest.approx(4.3866368, abs=1e-6)
    assert (tmp_path / "thresholds.json").read_text() == out
    m = json.loads((tmp_path / "manifest.json").read_text())
    assert m["command"] == "thresholds" and "thresholds.json" in m["outputs"]


def test_thresholds_rejects_E_below_one(tmp_path, capsys):
    code, _ = call(["thresholds", "--E", "0.5", "--alpha", "1"], tmp_path)
    assert code == 2
    err = capsys.readouterr().err
    assert "E=0.5 <= 1" in err and "unstable" in err


@pytest.mark.parametrize("argv", [["steady", "--E", "2", "--h", "-1"],
                                  ["steady", "--E", "2"],
                                  ["steady", "--E", "two", "--h", "3"],
                                  ["ode", "--E", "2", "--h", "5", "--u0", "2"]])
def test_invalid_input_exit_2(argv, tmp_path):
    assert call(argv, tmp_path)[0] == 2


def test_json_and_csv_round_trip(tmp_path):
    argv = ["steady", "--E", "2", "--h", "4.39", "--alpha", "2", "--r", "0.01"]
    _, js = call(argv + ["--format", "json"], tmp_path / "j")
    _, cs = call(argv + ["--format", "csv"], tmp_path / "c")
    a, b = cli_io.parse_output(js, "json"), cli_io.parse_output(cs, "csv")
    assert a == b
    assert any(r["stability"] == "conditional" and r["r_crit"] > 0 for r in a)


def test_thresholds_csv_round_trip(tmp_path):
    argv = ["thresholds", "--E", "3", "--alpha", "1.5"]
    _, js = call(argv, tmp_path / "j")
    _, cs = call(argv + ["--format", "csv"], tmp_path / "c")
    assert cli_io.parse_output(js, "json") == cli_io.parse_output(cs, "csv")


def test_ode_asymptote(tmp_path):
    code, out = call(["ode", "--E", "2", "--h", "5", "--alpha", "2"], tmp_path)
    data = json.loads(out)
    assert code == 0 and data["converged"]
    assert data["u_final"] == pytest.approx(0.63, abs=0.01)


def test_option_layering(tmp_path):
    cfg = tmp_path / "c.txt"
    cfg.write_text("# comment\nE = 3\nh = 4\nalpha = 1\nr = 0.5\n")
    file_opts = cli_io.read_config_file(cfg)
    o = cli.resolve_options("steady", {"h": "5"}, file_opts, environ={"PREDWAVE_H": "4.5",
                                                                      "PREDWAVE_R": "0.7"})
    assert (o["E"], o["h"], o["alpha"], o["r"]) == (3.0, 5.0, 1.0, 0.7)
    o = cli.resolve_options("steady", {}, file_opts, environ={"PREDWAVE_H": "4.5"})
    assert o["h"] == 4.5 and o["r"] == 0.5


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "c.txt"
    cfg.write_text("E = 2\nbogus = 1\n")
    code, _ = call(["thresholds", "--alpha", "1", "--config", str(cfg)], tmp_path)
    assert code == 2


def test_simulate_replay_and_classify(tmp_path):
    argv = ["simulate", "--E", "2", "--h", "6", "--alpha", "4", "--r", "0.01", *FAST_GRID,
            "--t-end", "150", "--snapshots", "0,final"]
    code, out = call(argv, tmp_path / "a")
    rep = json.loads(out)
    assert code == 0 and rep["regime"] == "ITW"
    first = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert first["determinism_hash"] == rep["diagnostics"]["hash"]
    snaps = sorted(p.name for p in (tmp_path / "a").glob("snapshot_*.csv"))
    assert len(snaps) == 2
    assert (tmp_path / "a" / snaps[0]).read_text().startswith("x,u,v\n")

    code = cli.main(["replay", str(tmp_path / "a" / "manifest.json"),
                     "--out", str(tmp_path / "b")], stdout=io.StringIO())
    assert code == 0
    second = json.loads((tmp_path / "b" / "manifest.json").read_text())
    assert second["outputs"] == first["outputs"]
    assert second["determinism_hash"] == first["determinism_hash"]
    for name in first["outputs"]:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    code, out = call(["classify", "--E", "2", "--h", "6", "--alpha", "4", "--r", "0.01",
                      *FAST_GRID, "--history", str(tmp_path / "a" / "history.npz")],
                     tmp_path / "c")
    assert code == 0 and json.loads(out)["regime"] == "ITW"


def test_undetermined_exit_3(tmp_path):
    code, out = call(["simulate", "--E", "2", "--h", "5.6", "--alpha", "4", *FAST_GRID,
                      "--t-end", "5"], tmp_path)
    assert code == 3
    assert json.loads(out)["regime"] == "undetermined"


def test_classify_grid_mismatch(tmp_path):
    call(["simulate", "--E", "2", "--h", "2.5", "--alpha", "4", *FAST_GRID, "--t-end", "50"],
         tmp_path / "a")
    code, _ = call(["classify", "--E", "2", "--h", "2.5", "--alpha", "4", "--nx", "512",
                    "--history", str(tmp_path / "a" / "history.npz")], tmp_path / "b")
    assert code == 2


def test_hcrit_degenerate(tmp_path):
    code, out = call(["hcrit", "--E", "2", "--alpha", "0"], tmp_path)
    assert code == 0
    assert json.loads(out)["h_crit"] == pytest.approx(3.313407, abs=1e-6)


def test_sweep_writes_schema(tmp_path):
    code, out = call(["sweep", "--E-range", "0.5,3,2", "--h-range", "1,2,2", "--format", "csv"],
                     tmp_path)
    assert code == 0
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert lines[0] == "E,h,alpha,r,d,zone,outcome,regime,front_speed,h1,h_star,h_minus,h_plus"
    assert len(lines) == 5
    rows = cli_io.parse_output(out, "csv")
    assert rows[0]["zone"] == "unstable_control" and rows[-1]["zone"] == "uniform_extinction"


def test_bad_manifest(tmp_path):
    bad = tmp_path / "m.json"
    bad.write_text("{}")
    assert cli.main(["replay", str(bad), "--out", str(tmp_path)], stdout=io.StringIO()) == 2
