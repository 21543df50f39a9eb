"""Command-line interface, run in process against temp files."""

import json

import numpy as np
import pytest

from resfluo.cli import main


@pytest.fixture
def cfg3(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text(
        "atoms.n = 3\n"
        "atoms.target_ratio = 3.5\n"
        "mc.samples = 200\n"
        "mc.seed = 11\n"
        "ensemble.samples = 50\n"
    )
    return p


def run(tmp_path, *argv):
    out = tmp_path / "out.txt"
    code = main([*argv, "--out", str(out)])
    return code, out.read_text() if out.exists() else ""


def test_steady_report(tmp_path, cfg3):
    code, text = run(tmp_path, "steady", "--config", str(cfg3))
    assert code == 0
    payload = json.loads(text)
    rep = payload["report"]
    assert rep["coherence_ratio"] == pytest.approx(3.5, rel=1e-12)
    assert rep["sigma22"] == pytest.approx(0.35714285714285715)
    assert rep["rabi_max"]["3"] == pytest.approx(np.sqrt(1.5))
    assert payload["config"]["atoms.n"] == "3"


def test_steady_requires_drive(tmp_path, capsys):
    code = main(["steady"])
    assert code == 2
    assert "atoms.rabi or atoms.target_ratio" in capsys.readouterr().err


def test_unknown_config_key(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("atoms.power = 3\n")
    code = main(["steady", "--config", str(bad)])
    assert code == 2
    assert "unknown" in capsys.readouterr().err


def test_scan_angle_csv(tmp_path, cfg3):
    code, text = run(
        tmp_path, "scan-angle", "--config", str(cfg3), "--format", "csv"
    )
    assert code == 0
    lines = text.splitlines()
    comments = [l for l in lines if l.startswith("#")]
    data = [l for l in lines if not l.startswith("#")]
    assert any("atoms.target_ratio = 3.5" in c for c in comments)
    assert data[0] == "phi2_rad,mu_norm_n3"
    assert len(data) == 1 + 721
    first = data[1].split(",")
    assert float(first[0]) == 0.0
    assert float(first[1]) == 0.0


def test_threshold_csv_columns(tmp_path):
    code, text = run(tmp_path, "threshold", "--format", "csv")
    assert code == 0
    data = [l for l in text.splitlines() if not l.startswith("#")]
    assert data[0] == "n,gamma2,detuning,rabi_max,entangled_possible,squeezed_possible"
    first = dict(zip(data[0].split(","), data[1].split(",")))
    assert first["n"] == "1"
    assert first["entangled_possible"] == "true"
    # closed threshold rows carry an empty rabi_max cell
    assert any(",,false,false" in l for l in data[1:])


def test_trap_report(tmp_path, cfg3):
    code, text = run(tmp_path, "trap", "--config", str(cfg3))
    rep = json.loads(text)["report"]
    assert code == 0
    assert rep["count"] == 3
    assert rep["delta_z_lambda"] == pytest.approx(0.005224801884928264, rel=1e-9)
    assert rep["gamma_max_lambda"] == pytest.approx(51.196495, rel=1e-6)
    assert rep["force_residual_max"] < 1e-12
    assert len(rep["positions"]) == 3


def test_optimize_and_seed_override(tmp_path, cfg3):
    code, text = run(tmp_path, "optimize", "--config", str(cfg3))
    assert code == 0
    rep = json.loads(text)["report"]
    assert rep["gamma_star"] == pytest.approx(2.784953, abs=2e-4)

    code, text = run(tmp_path, "mc", "--config", str(cfg3), "--seed", "77")
    assert code == 0
    rep = json.loads(text)["report"]
    assert rep["seed"] == 77
    assert rep["samples"] == 200


def test_mc_workers_byte_identical(tmp_path, cfg3):
    _, a = run(tmp_path, "mc", "--config", str(cfg3), "--workers", "1")
    _, b = run(tmp_path, "mc", "--config", str(cfg3), "--workers", "5")
    assert a == b


def test_random_subcommand(tmp_path, cfg3):
    code, text = run(tmp_path, "random", "--config", str(cfg3))
    assert code == 0
    rep = json.loads(text)["report"]
    assert rep["samples"] == 50
    assert rep["mean_mu"] > 0


def test_moments_with_oracle(tmp_path, cfg3):
    code, text = run(
        tmp_path, "moments", "--config", str(cfg3),
        "--powers", "1", "0", "0", "1", "--verify",
    )
    assert code == 0
    rep = json.loads(text)["report"]
    assert rep["real"] == pytest.approx(rep["oracle_real"], abs=1e-10)
    assert not rep["exceeds_order"]


def test_moments_over_order_flag(tmp_path, cfg3):
    code, text = run(
        tmp_path, "moments", "--config", str(cfg3), "--powers", "0", "0", "4", "0"
    )
    assert code == 0
    rep = json.loads(text)["report"]
    assert rep["exceeds_order"]
    assert rep["real"] == 0.0 and rep["imag"] == 0.0


def test_verify_subcommand(tmp_path, cfg3):
    code, text = run(tmp_path, "verify", "--config", str(cfg3), "--trials", "5")
    assert code == 0
    rep = json.loads(text)["report"]
    assert rep["ok"] is True


def test_report_as_csv(tmp_path, cfg3):
    code, text = run(
        tmp_path, "steady", "--config", str(cfg3), "--format", "csv"
    )
    assert code == 0
    data = [l for l in text.splitlines() if not l.startswith("#")]
    assert data[0] == "key,value"
    keys = {row.split(",")[0] for row in data[1:]}
    assert "report.sigma22" in keys


def test_multi_n_rejected_where_single_needed(tmp_path, capsys):
    cfg = tmp_path / "multi.cfg"
    cfg.write_text("atoms.n = 2,3\natoms.rabi = 1.0\nmc.seed = 1\n")
    code = main(["optimize", "--config", str(cfg)])
    assert code == 2
    assert "exactly one" in capsys.readouterr().err
