"""End-to-end checks of the command line surface."""

import json
import os

import numpy as np
import pytest

import cpo_sim
from cpo_sim.cli import main


def test_no_subcommand_is_usage_error(capsys):
    assert main([]) == 1
    assert "error:" in capsys.readouterr().err


def test_version_flag():
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0


def test_transmission_sweep_outputs(tmp_path):
    out = tmp_path / "sweep"
    rc = main([
        "transmission-sweep", "--power-min-mw", "0.5", "--power-max-mw", "50",
        "--n-points", "7", "--out", str(out),
    ])
    assert rc == 0
    csv_path = out / "transmission_sweep.csv"
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == "power_W,s0,T_theta0,T_thetaPi2"
    assert len(lines) == 8
    manifest = json.loads((out / "transmission_sweep.manifest.json").read_text())
    assert manifest["subcommand"] == "transmission-sweep"
    assert manifest["parameters"]["n_points"] == 7
    assert manifest["version"] == cpo_sim.__version__
    assert sorted(manifest["outputs"]) == [
        "plot_transmission_sweep.py", "transmission_sweep.csv",
    ]
    # the plot helper is a standalone script, not executed by the CLI
    assert "matplotlib" in (out / "plot_transmission_sweep.py").read_text()


def test_transmission_sweep_is_byte_deterministic(tmp_path):
    args = ["transmission-sweep", "--n-points", "5"]
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(args + ["--out", str(out_a)]) == 0
    assert main(args + ["--out", str(out_b)]) == 0
    csv_a = (out_a / "transmission_sweep.csv").read_bytes()
    csv_b = (out_b / "transmission_sweep.csv").read_bytes()
    assert csv_a == csv_b


def test_sweep_rejects_bad_range(tmp_path, capsys):
    rc = main([
        "transmission-sweep", "--power-min-mw", "10", "--power-max-mw", "1",
        "--out", str(tmp_path),
    ])
    assert rc == 1
    assert "power" in capsys.readouterr().err


def test_sweep_config_and_flag_precedence(tmp_path):
    cfg = tmp_path / "fit.cfg"
    cfg.write_text("optical_depth = 1.0\ns_per_watt = 0.3\n")
    out = tmp_path / "out"
    rc = main([
        "transmission-sweep", "--n-points", "4", "--config", str(cfg),
        "--s-per-watt", "0.5", "--out", str(out),
    ])
    assert rc == 0
    manifest = json.loads((out / "transmission_sweep.manifest.json").read_text())
    # flag wins over file, file wins over default
    assert manifest["parameters"]["s_per_watt"] == 0.5
    assert manifest["parameters"]["optical_depth"] == 1.0
    assert manifest["parameters"]["gamma_ratio"] == 0.096
    assert manifest["config"] == str(cfg)


def test_config_via_environment(tmp_path, monkeypatch):
    cfg = tmp_path / "env.cfg"
    cfg.write_text("optical_depth = 1.7\n")
    monkeypatch.setenv("CPO_SIM_CONFIG", str(cfg))
    out = tmp_path / "out"
    assert main(["transmission-sweep", "--n-points", "4", "--out", str(out)]) == 0
    manifest = json.loads((out / "transmission_sweep.manifest.json").read_text())
    assert manifest["parameters"]["optical_depth"] == 1.7


def test_config_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("not_a_parameter = 3\n")
    rc = main([
        "transmission-sweep", "--config", str(cfg), "--out", str(tmp_path / "o"),
    ])
    assert rc == 1
    assert "not_a_parameter" in capsys.readouterr().err


def test_noise_evolution_all_presets(tmp_path):
    out = tmp_path / "noise"
    rc = main([
        "noise-evolution", "--zeta-max", "3", "--n-points", "11", "--out", str(out),
    ])
    assert rc == 0
    lines = (out / "noise_evolution.csv").read_text().strip().splitlines()
    assert lines[0] == "zeta,nu_over_gamma0,S_P,S_Q,input_preset"
    assert len(lines) == 1 + 3 * 11
    presets = {line.split(",")[-1] for line in lines[1:]}
    assert presets == {"coherent", "p_squeezed_10", "q_squeezed_10"}


def test_noise_evolution_single_preset(tmp_path):
    out = tmp_path / "noise1"
    rc = main([
        "noise-evolution", "--preset", "q_squeezed_10", "--zeta-max", "2",
        "--n-points", "5", "--out", str(out),
    ])
    assert rc == 0
    lines = (out / "noise_evolution.csv").read_text().strip().splitlines()
    assert len(lines) == 6


def test_noise_evolution_unknown_preset(tmp_path, capsys):
    rc = main(["noise-evolution", "--preset", "banana", "--out", str(tmp_path)])
    assert rc == 1
    assert "banana" in capsys.readouterr().err


def test_oracle_deterministic_pass(tmp_path):
    out = tmp_path / "oracle"
    rc = main([
        "oracle", "--mode", "deterministic", "--quadrature", "Q",
        "--nu-over-gamma0", "0.0", "--out", str(out),
    ])
    assert rc == 0
    reports = json.loads((out / "oracle_reports.json").read_text())
    assert len(reports) == 1
    assert reports[0]["rel_error"] < 1e-6
    assert reports[0]["mode"] == "deterministic-integral"


def test_oracle_finite_frequency_breaches_default_tolerance(tmp_path, capsys):
    # the closed form is a small-frequency truncation; at nu = 0.1 gamma0 the
    # full integral sits a couple of percent away, which the oracle reports
    out = tmp_path / "oracle"
    rc = main([
        "oracle", "--mode", "deterministic", "--quadrature", "Q",
        "--nu-over-gamma0", "0.1", "--out", str(out),
    ])
    assert rc == 2
    assert "tolerance breach" in capsys.readouterr().err
    # with an honest tolerance for the truncation it passes
    rc = main([
        "oracle", "--mode", "deterministic", "--quadrature", "Q",
        "--nu-over-gamma0", "0.1", "--tolerance", "0.05", "--out", str(out),
    ])
    assert rc == 0


def test_oracle_monte_carlo_seeded(tmp_path):
    out = tmp_path / "mc"
    args = [
        "oracle", "--mode", "monte-carlo", "--quadrature", "P",
        "--n-trajectories", "4000", "--spatial-steps", "64",
        "--seed", "21", "--out", str(out),
    ]
    assert main(args) == 0
    first = json.loads((out / "oracle_reports.json").read_text())
    assert main(args) == 0
    second = json.loads((out / "oracle_reports.json").read_text())
    assert first == second
    assert first[0]["sigma"] > 0.0
    manifest = json.loads((out / "oracle.manifest.json").read_text())
    assert manifest["seed"] == 21


def test_fit_command(tmp_path):
    powers = np.geomspace(0.5e-3, 80e-3, 8)
    ds = cpo_sim.synthesize_dataset(
        cpo_sim.FitParams.default(), powers, noise=0.0, with_sigma=False
    )
    data = tmp_path / "data.csv"
    ds.to_csv(str(data))
    out = tmp_path / "fit"
    assert main(["fit", str(data), "--out", str(out)]) == 0
    result = json.loads((out / "fit_result.json").read_text())
    assert result["converged"] is True
    assert result["params"]["optical_depth"] == pytest.approx(2.8, rel=1e-6)
    assert result["degenerate_parameters"] == []
    assert set(result) == {
        "params", "covariance", "residuals", "converged", "iterations",
        "degenerate_parameters",
    }
    assert (out / "plot_fit.py").exists()
    manifest = json.loads((out / "fit.manifest.json").read_text())
    assert manifest["parameters"]["data_csv"] == str(data)


def test_fit_command_missing_file(tmp_path, capsys):
    rc = main(["fit", str(tmp_path / "nope.csv"), "--out", str(tmp_path)])
    assert rc == 1
