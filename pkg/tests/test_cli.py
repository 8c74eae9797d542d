import csv
import io
import json
import subprocess
import sys

import pytest

from kicqb.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_charge_auto_picks_cqca_and_compare_agrees(capsys):
    code, out, err = run(capsys, "charge", "--n", "8", "--m", "8", "--compare")
    assert code == 0
    report = json.loads(err)
    assert report["engines"] == ["cqca", "momentum", "oracle"] and report["max_abs_diff"] < 1e-10
    data = rows(out)
    assert {r["engine"] for r in data} == {"cqca", "momentum", "oracle"}
    assert [float(r["energy_normalized"]) for r in data if r["engine"] == "cqca"][4] == 1.0


def test_charge_large_ring_uses_momentum(capsys):
    code, out, _ = run(capsys, "charge", "--n", "100", "--m", "3", "--J", "0.3", "--b", "-0.5")
    assert code == 0 and rows(out)[0]["engine"] == "momentum"


def test_charge_engine_not_applicable(capsys):
    code, _, err = run(capsys, "charge", "--n", "6", "--variant", "ZZ", "--engine", "momentum")
    assert code == 2 and "momentum" in err


def test_charge_json_output(tmp_path, capsys):
    out = tmp_path / "t.json"
    assert run(capsys, "charge", "--n", "6", "--boundary", "OBC", "--format", "json", "--out", str(out))[0] == 0
    data = json.loads(out.read_text())
    assert data[0]["engine"] == "cqca" and len(data[0]["energy"]) == 7


def test_charge_config_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "charge", "--config", str(bad))
    assert code == 2 and "malformed JSON" in err
    bad.write_text(json.dumps({"n": 5, "boundary": "XYZ"}))
    assert run(capsys, "charge", "--config", str(bad))[0] == 2
    assert run(capsys, "charge", "--config", str(tmp_path / "missing.json"))[0] == 2


def test_sweep_bundle_and_threads(monkeypatch, capsys):
    args = ["sweep", "--n", "6", "--m", "4", "--axis", "disorder", "--values", "0,0.2",
            "--realizations", "4", "--seed", "5"]
    code, serial, _ = run(capsys, *args)
    monkeypatch.setenv("KICQB_THREADS", "3")
    code2, threaded, _ = run(capsys, *args)
    assert code == code2 == 0 and serial == threaded
    data = rows(serial)
    assert {r["param"] for r in data} == {"0.0", "0.2"} and len(data) == 10


def test_sweep_rejects_bad_values(capsys):
    assert run(capsys, "sweep", "--n", "6", "--axis", "alpha", "--values", "a,b")[0] == 2


def test_plot_is_deterministic(tmp_path, capsys):
    trace = tmp_path / "t.csv"
    run(capsys, "charge", "--n", "6", "--m", "6", "--out", str(trace))
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    assert run(capsys, "plot", str(trace), "--out", str(a))[0] == 0
    run(capsys, "plot", str(trace), "--out", str(b))
    svg = a.read_text()
    assert svg == b.read_text() and svg.startswith("<svg") and svg.count("<polyline") == 1


def test_plot_empty_trace_is_error(tmp_path, capsys):
    empty = tmp_path / "e.csv"
    empty.write_text("kick,energy_normalized\n")
    assert run(capsys, "plot", str(empty))[0] == 2


def test_spectrum_verify(capsys):
    code, out, _ = run(capsys, "spectrum", "--n", "5", "--boundary", "PBC", "--verify")
    data = json.loads(out)
    assert code == 0 and data["verified"] is True and len(data["phases"]) == 10


def test_tfim_columns(capsys):
    code, out, _ = run(capsys, "tfim", "--n", "50", "--t-max", "1", "--steps", "4", "--limit")
    data = rows(out)
    assert code == 0 and len(data) == 5 and set(data[0]) == {"t", "energy_normalized", "limit"}


def test_entropy_with_oracle_column(capsys):
    code, out, _ = run(capsys, "entropy", "--n", "6", "--boundary", "PBC", "--oracle")
    for r in rows(out):
        assert float(r["entropy"]) == pytest.approx(float(r["oracle"]), abs=1e-8)
    assert run(capsys, "entropy", "--n", "5")[0] == 2


def test_correlators(capsys):
    code, out, _ = run(capsys, "correlators", "--n", "6", "--variant", "ZZ", "--m", "2", "--site", "3")
    assert code == 0 and len(rows(out)) == 18
    assert run(capsys, "correlators", "--n", "6", "--site", "9")[0] == 2


def test_circuit_verify_and_samples(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"variant": "ZZ", "n": 6, "boundary": "PBC", "schedule": {"kind": "uniform", "m": 3}}))
    circ = tmp_path / "c.txt"
    code, _, err = run(capsys, "circuit", "--spec", str(cfg), "--verify", "--out", str(circ))
    report = json.loads(err)
    assert code == 0 and report["verified"] and report["resources"] == report["closed_form"]
    samples = tmp_path / "s.txt"
    assert run(capsys, "sample", "--config", str(cfg), "--shots", "2000", "--seed", "4", "--out", str(samples))[0] == 0
    code, out, _ = run(capsys, "analyze-samples", str(samples))
    rep = json.loads(out)
    assert code == 0 and rep["basis"] == "Y" and rep["shots"] == 2000
    assert {"p0", "covariance", "energy", "half_cycle"} <= set(rep)
    assert sum(e["observed"] for e in rep["half_cycle"]) == pytest.approx(1.0, abs=0.05)


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "kicqb", "spectrum", "--n", "3"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["n"] == 3
    proc = subprocess.run([sys.executable, "-m", "kicqb", "charge", "--bogus"], capture_output=True, text=True)
    assert proc.returncode == 2
