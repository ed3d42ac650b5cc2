"""Config schema validation and the command-line front end, including the
determinism contract and exit codes."""

import json
import subprocess
import sys

import pytest

from chaoscalc.cli import main
from chaoscalc.config import ConfigError, parse_config

BASE = {
    "grid": {"horizon": 1.0, "cells": 8},
    "kernel": {"kind": "ou", "alpha": 1.0},
    "integrand": {"builder": "constant", "value": 1.0},
    "t": 1.0,
    "lambdas": [0.5, 1.0],
    "seed": 7,
}


def cfg_with(**kw):
    obj = json.loads(json.dumps(BASE))
    obj.update(kw)
    return obj


def test_parse_minimal_config():
    cfg = parse_config(BASE)
    assert cfg.grid.cells == 8
    assert cfg.volatility_mode == "none"
    assert cfg.lambdas == (0.5, 1.0)


def test_unknown_fields_rejected():
    with pytest.raises(ConfigError):
        parse_config(cfg_with(bogus=1))
    with pytest.raises(ConfigError):
        parse_config(cfg_with(kernel={"kind": "ou", "alpha": 1.0, "beta": 2.0}))
    with pytest.raises(ConfigError):
        parse_config(cfg_with(integrand={"builder": "constant", "value": 1, "x": 2}))


def test_missing_fields_rejected():
    bad = {k: v for k, v in BASE.items() if k != "seed"}
    with pytest.raises(ConfigError):
        parse_config(bad)


def test_volatility_validation():
    cfg = parse_config(
        cfg_with(volatility={"mode": "wick", "spec": {"builder": "constant", "value": 2.0}})
    )
    assert cfg.volatility_mode == "wick"
    with pytest.raises(ConfigError):
        parse_config(cfg_with(volatility={"mode": "wick"}))
    with pytest.raises(ConfigError):
        parse_config(cfg_with(volatility={"mode": "sideways", "spec": BASE["integrand"]}))


def test_builders_produce_processes():
    cfg = parse_config(cfg_with(integrand={"builder": "brownian"}))
    proc = cfg.integrand()
    assert proc.at(0).is_zero()
    assert proc.at(4).component(1).entries == {(i,): 1.0 for i in range(4)}

    weights = [1.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0]
    cfg = parse_config(cfg_with(integrand={"builder": "wiener", "weights": weights}))
    proc = cfg.integrand()
    assert proc.at(3).component(1).entries == {(0,): 1.0, (2,): 2.0}

    cfg = parse_config(cfg_with(integrand={"builder": "donsker", "order": 4, "eps": 0.25}))
    proc = cfg.integrand()
    assert proc.at(0).is_zero()
    assert not proc.at(2).is_zero()

    cfg = parse_config(cfg_with(integrand={"builder": "random", "max_order": 2}))
    assert cfg.integrand().max_order() <= 2


def test_custom_builder_round_trip():
    from chaoscalc import ChaosVector, make_grid

    g = make_grid(1.0, 8)
    vec = ChaosVector.deterministic(g, 3.0)
    cells = [None] * 7 + [vec.to_json()]
    cfg = parse_config(cfg_with(integrand={"builder": "custom", "cells": cells}))
    proc = cfg.integrand()
    assert proc.at(0).is_zero()
    assert proc.at(7).expectation() == 3.0


def run_cli(args, tmp_path):
    return main(args + ["--out", str(tmp_path)])


def test_cli_identity_suite(tmp_path):
    code = run_cli(["identity-suite", "--draws", "3"], tmp_path)
    assert code == 0
    lines = (tmp_path / "identity_suite.csv").read_text().strip().splitlines()
    assert lines[0] == "identity,max_residual"
    assert len(lines) == 10
    for line in lines[1:]:
        assert float(line.split(",")[1]) <= 1e-10


def test_cli_donsker(tmp_path):
    code = run_cli(
        ["donsker", "--cells", "16", "--order", "6", "--eps", "0.25",
         "--lambda-sweep", "0.5,1,2"],
        tmp_path,
    )
    assert code == 0
    lines = (tmp_path / "donsker.csv").read_text().strip().splitlines()
    assert lines[0] == "lambda,norm_sq,a3_max,bound_max,finite"
    assert len(lines) == 4
    for line in lines[1:]:
        assert line.endswith("True")


def test_cli_fbm_cov_small(tmp_path):
    code = run_cli(["fbm-cov", "--cells", "64", "--hurst", "0.7", "--pairs", "1:0.5"], tmp_path)
    assert code == 0
    lines = (tmp_path / "fbm_cov.csv").read_text().strip().splitlines()
    assert len(lines) == 2


def test_cli_mc_compare(tmp_path):
    code = run_cli(["mc-compare", "--cells", "8", "--paths", "20000", "--seed", "3"], tmp_path)
    assert code == 0
    lines = (tmp_path / "mc_compare.csv").read_text().strip().splitlines()
    assert lines[0].startswith("experiment,")
    assert len(lines) == 6
    for line in lines[1:]:
        z = abs(float(line.split(",")[-1]))
        assert z < 4.0


def test_cli_vmbv_and_determinism(tmp_path):
    cfg_path = tmp_path / "exp.json"
    cfg_path.write_text(json.dumps(cfg_with(
        integrand={"builder": "random", "max_order": 2},
        volatility={"mode": "wick", "spec": {"builder": "constant", "value": 2.0}},
    )))
    out1 = tmp_path / "run1"
    out2 = tmp_path / "run2"
    assert main(["vmbv", "--config", str(cfg_path), "--out", str(out1)]) == 0
    assert main(["vmbv", "--config", str(cfg_path), "--out", str(out2)]) == 0
    b1 = (out1 / "result.json").read_bytes()
    b2 = (out2 / "result.json").read_bytes()
    assert b1 == b2
    payload = json.loads(b1)
    assert payload["config"]["seed"] == 7
    assert "norms" in payload["result"]


def test_cli_sweep_with_threads(tmp_path):
    cfg_path = tmp_path / "exp.json"
    cfg_path.write_text(json.dumps(cfg_with(
        sweep={"lambdas": [0.5, 1.0], "t": [0.5, 1.0], "cells": [4, 8]},
    )))
    out1 = tmp_path / "s1"
    out2 = tmp_path / "s2"
    assert main(["sweep", "--config", str(cfg_path), "--out", str(out1), "--threads", "1"]) == 0
    assert main(["sweep", "--config", str(cfg_path), "--out", str(out2), "--threads", "4"]) == 0
    assert (out1 / "sweep.csv").read_bytes() == (out2 / "sweep.csv").read_bytes()
    lines = (out1 / "sweep.csv").read_text().strip().splitlines()
    assert len(lines) == 1 + 2 * 2 * 2


def test_cli_threads_env(tmp_path, monkeypatch):
    cfg_path = tmp_path / "exp.json"
    cfg_path.write_text(json.dumps(cfg_with(sweep={"cells": [4, 8]})))
    monkeypatch.setenv("CHAOSCALC_THREADS", "2")
    assert main(["sweep", "--config", str(cfg_path), "--out", str(tmp_path)]) == 0


def test_cli_parse_error_exit_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["vmbv", "--config", str(bad), "--out", str(tmp_path)]) == 2
    bad2 = tmp_path / "bad2.json"
    bad2.write_text(json.dumps(cfg_with(bogus=1)))
    assert main(["vmbv", "--config", str(bad2), "--out", str(tmp_path)]) == 2


def test_cli_gate_failure_exit_code(tmp_path):
    cfg_path = tmp_path / "exp.json"
    cfg_path.write_text(json.dumps(cfg_with(
        integrand={"builder": "random", "max_order": 2, "support": [0, 1, 2, 3]},
        volatility={"mode": "strongind",
                    "spec": {"builder": "random", "max_order": 1, "support": [3, 4]}},
    )))
    assert main(["vmbv", "--config", str(cfg_path), "--out", str(tmp_path)]) == 3


def test_cli_overflow_exit_code(tmp_path):
    cfg_path = tmp_path / "exp.json"
    cfg_path.write_text(json.dumps(cfg_with(
        integrand={"builder": "random", "max_order": 2},
        volatility={"mode": "wick", "spec": {"builder": "random", "max_order": 2}},
        truncation=2,
    )))
    assert main(["vmbv", "--config", str(cfg_path), "--out", str(tmp_path)]) == 4


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "chaoscalc.cli", "identity-suite", "--draws", "1",
         "--out", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "identity-suite" in proc.stdout
