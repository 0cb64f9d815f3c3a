import json
import math
from pathlib import Path

import pytest

import convarb

ROOT = Path(__file__).resolve().parents[2]


def test_catalog():
    names = [m["name"] for m in convarb.models()]
    assert len(names) == 8
    assert "survival_claim" in names


def test_simulate_survival_initial_price():
    p = convarb.simulate("survival_claim", {"lambda_x": 0.1, "lambda_y": 0.2}, n_steps=50, seed=3)
    assert len(p["X"]) == len(p["t"]) == len(p["dA"]) + 1
    assert p["X"][0] == pytest.approx(math.exp(-0.1), abs=1e-15)
    assert p["X"][-1] == p["Y"][-1]


def test_analyze_predictable_default():
    r = convarb.analyze("predictable_default_variant", n_steps=100, seed=1)
    assert not r["C1"]
    assert r["window"] is not None
    assert r["monotone"] and r["admissible"] and r["violations"] == 0
    assert r["terminal_value"] > 0


def test_density_risk_attitudes():
    r = convarb.verify_density("risk_attitudes", {"rho": -0.5}, horizon=2.0, n_steps=100, n_paths=2000, seed=9)
    assert r["C3"]["refused"] == 0
    assert r["C3"]["verdict"] in {"pass", "inconclusive"}
    assert set(r["supermartingale"]) == {"X", "Y"}


def test_oracle_examples():
    up = convarb.oracle(str(ROOT / "data" / "trees" / "one_period_up.json"))
    assert up["feasible"] is False and up["verified"] is True
    tree = {
        "nodes": [
            {"id": 0, "t": 0, "parent": None, "prob": "1", "X": "1", "Y": "1"},
            {"id": 1, "t": 1, "parent": 0, "prob": "1/2", "X": "2", "Y": "1"},
            {"id": 2, "t": 1, "parent": 0, "prob": "1/2", "X": "1/2", "Y": "1"},
        ]
    }
    r = convarb.solve_tree(tree)
    assert r["feasible"] is True and r["verified"] is True
    assert r["certificate"] is None
    disc = convarb.discretize("survival_claim", periods=2, branching=1)
    assert convarb.solve_tree(disc)["feasible"] is True


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        convarb.simulate("no_such_model")
    with pytest.raises(convarb.DomainError):
        convarb.simulate("risk_attitudes", {"rho": 3.0})
    with pytest.raises(OSError):
        convarb.validate_config("/nonexistent/config.json")


def test_run_experiment(tmp_path):
    cfg = json.loads((ROOT / "configs" / "survival_claim.json").read_text())
    cfg["n_paths"] = 20
    cfg["analyses"] = ["structure", "arbitrage"]
    cfg.pop("oracle")
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    assert convarb.validate_config(path)["n_paths"] == 20
    report = convarb.run_experiment(path, out_dir=tmp_path / "out", threads=2)
    assert report["analyses"]["structure"]["C1_fails"] == 0
    again = convarb.run_experiment(path, out_dir=tmp_path / "again", threads=1)
    assert (tmp_path / "out" / "report.json").read_bytes() == (tmp_path / "again" / "report.json").read_bytes()
    assert report == again
