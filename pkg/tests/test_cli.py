"""Command-line surface: outputs, exit codes, determinism."""

import json
import os

import numpy as np
import pytest

from soslab.cli import ConfigError, main, run_suite


def read(path):
    with open(path) as fh:
        return fh.read()


def test_green_subcommand(tmp_path):
    rc = main(["--out-dir", str(tmp_path), "green", "--box", "2"])
    assert rc == 0
    data = json.loads(read(tmp_path / "green.json"))
    assert data["residual"] < 1e-9
    assert data["quadratic_form"] > 0
    assert len(data["sigma"]) == 25


def test_green_with_domain_and_f_files(tmp_path):
    dom_file = tmp_path / "dom.json"
    dom_file.write_text(json.dumps([[0, 0], [1, 0]]))
    f_file = tmp_path / "f.json"
    f_file.write_text(json.dumps([1.0, 0.0]))
    rc = main(["--out-dir", str(tmp_path), "green", "--domain", str(dom_file),
               "--f", str(f_file)])
    assert rc == 0
    data = json.loads(read(tmp_path / "green.json"))
    assert data["sigma"] == pytest.approx([4.0 / 15.0, 1.0 / 15.0])


def test_verify_potential_subcommand(tmp_path):
    rc = main(["--out-dir", str(tmp_path), "verify-potential", "--p", "1.0",
               "--beta", "0.5", "--grid-x", "10,1.0", "--grid-a", "0.1,0.3",
               "--tol", "1e-6"])
    assert rc == 0
    rep = json.loads(read(tmp_path / "assumptions.json"))
    assert rep["c_beta_fit"] > 0
    lines = read(tmp_path / "assumption_ratios.csv").splitlines()
    assert lines[0] == "x,a,ratio"
    assert len(lines) > 20


def test_charges_subcommand(tmp_path):
    rho_file = tmp_path / "rho.json"
    rho_file.write_text(json.dumps([[0, 0, 1], [3, 0, -1]]))
    rc = main(["--out-dir", str(tmp_path), "charges", "--rho", str(rho_file),
               "--box", "8", "--k", "1"])
    assert rc == 0
    data = json.loads(read(tmp_path / "charges.json"))
    assert data["d_lambda"] == 3
    assert data["cover_k"]["minimal"]


def test_spinwave_check_subcommand(tmp_path):
    rc = main(["--out-dir", str(tmp_path), "spinwave-check", "--ensembles", "3",
               "--box", "16", "--M", "16", "--svg"])
    assert rc == 0
    rep = json.loads(read(tmp_path / "spinwave.json"))
    assert rep["min_energy_ratio"] > 0
    assert (tmp_path / "spinwave.svg").exists()


def test_taylor_check_subcommand(tmp_path):
    rc = main(["--out-dir", str(tmp_path), "taylor-check", "--instances", "5",
               "--beta", "1e-80", "--gamma", "17", "--box", "12"])
    assert rc == 0
    lines = read(tmp_path / "taylor.csv").splitlines()
    assert lines[0] == "instance,lhs,S,bound,slack"
    assert len(lines) == 6


def test_simulate_subcommand(tmp_path):
    rc = main(["--out-dir", str(tmp_path), "simulate", "--box", "3",
               "--sweeps", "400", "--burn-in", "100", "--chains", "8",
               "--zeta-mode", "random"])
    assert rc == 0
    lines = read(tmp_path / "simulate.csv").splitlines()
    assert lines[0] == "N,observable,mean,var,se,tau_int"


def test_growth_subcommand_and_svg(tmp_path):
    rc = main(["--out-dir", str(tmp_path), "growth", "--sizes", "2,4",
               "--sweeps", "400", "--burn-in", "100", "--chains", "8"])
    assert rc == 0
    assert (tmp_path / "growth.csv").exists()
    assert (tmp_path / "growth.json").exists()
    svg = read(tmp_path / "growth.svg")
    assert svg.startswith("<svg") and "polyline" in svg


def test_limits_check_subcommands(tmp_path):
    assert main(["--out-dir", str(tmp_path), "limits-check", "--which", "comb",
                 "--N", "1,2,4"]) == 0
    assert main(["--out-dir", str(tmp_path), "limits-check", "--which",
                 "translate"]) == 0
    assert main(["--out-dir", str(tmp_path), "limits-check", "--which",
                 "bridge", "--p", "1.0", "--beta", "1.0"]) == 0


def test_suite_empty_config(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 0, "items": []}))
    assert main(["--out-dir", str(tmp_path), "suite", "--config", str(cfg)]) == 0
    manifest = json.loads(read(tmp_path / "manifest.json"))
    assert manifest["items"] == []


def test_suite_passing_items_and_determinism(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 11, "items": [
        {"name": "charges.cover-oracle", "params": {"trials": 10}},
        {"name": "potential.interpolation",
         "params": {"p": [1.0], "beta": [0.5]}},
    ]}))
    out1 = tmp_path / "run1"
    out2 = tmp_path / "run2"
    assert main(["--out-dir", str(out1), "suite", "--config", str(cfg)]) == 0
    assert main(["--out-dir", str(out2), "suite", "--config", str(cfg)]) == 0
    m1 = read(out1 / "manifest.json")
    m2 = read(out2 / "manifest.json")
    # byte-identical apart from wall-clock seconds
    scrub = lambda t: "\n".join(l for l in t.splitlines() if '"seconds"' not in l)
    assert scrub(m1) == scrub(m2)


def test_suite_out_of_regime_flags_failure(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 0, "items": [
        {"name": "potential.gamma-regime",
         "params": {"beta": 0.9, "c": 0.05, "C4": 1.0}},
    ]}))
    rc = main(["--out-dir", str(tmp_path), "suite", "--config", str(cfg)])
    assert rc == 1
    manifest = json.loads(read(tmp_path / "manifest.json"))
    assert manifest["items"][0]["status"] == "fail"
    assert manifest["items"][0]["name"] == "potential.gamma-regime"


def test_suite_rejects_unknown_keys(tmp_path):
    with pytest.raises(ConfigError):
        run_suite({"seed": 0, "bogus": 1}, str(tmp_path))
    with pytest.raises(ConfigError):
        run_suite({"seed": 0, "items": [{"name": "nope.check"}]}, str(tmp_path))
    with pytest.raises(ConfigError):
        run_suite({"items": [{"name": "charges.cover-oracle"}]}, str(tmp_path))


def test_io_error_exit_code(tmp_path):
    rc = main(["--out-dir", str(tmp_path), "suite", "--config",
               str(tmp_path / "missing.json")])
    assert rc == 2
