import json
import subprocess
import sys

import pytest

from weightlab import cli
from weightlab.config import ConfigError, ExperimentConfig, resolve_catalog_key, weight_from_json
from weightlab.weights import PiecewisePower, PowerWeight, ZeroWeight


def write(tmp_path, body, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(body) if not isinstance(body, str) else body)
    return str(p)


def run(tmp_path, cmd, body, *extra):
    out = tmp_path / "out"
    return cli.main([cmd, "--config", write(tmp_path, body), "--out", str(out), *extra]), out


@pytest.fixture(autouse=True)
def _no_env_threads(monkeypatch):
    monkeypatch.delenv("WEIGHTLAB_THREADS", raising=False)


def test_config_defaults_and_digest():
    a = ExperimentConfig.from_dict({})
    b = ExperimentConfig.from_dict({"seed": 0})
    assert a.digest == b.digest
    assert a.with_seed(3).digest != a.digest
    assert a.setting().delta_tilde == pytest.approx(0.2)


@pytest.mark.parametrize("body", [{"bogus": 1}, {"plan": {"radius": 2}}, {"schema_version": 9},
                                  {"kernel": {"kind": "riesz"}}, {"seed": 1.5},
                                  {"pair": {"catalog": "case-i", "w": 0, "v": 0}}, {"pair": {"w": 0}},
                                  {"setting": {"alpha": "2"}}, {"scan": {"j_max": 1}}])
def test_config_rejects_bad_input(body):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(body)


def test_weight_descriptors():
    assert isinstance(weight_from_json("-1/4"), PowerWeight)
    assert isinstance(weight_from_json({"kind": "piecewise", "inner": 0.1, "outer": 0.2}), PiecewisePower)
    assert isinstance(weight_from_json({"kind": "zero"}), ZeroWeight)
    with pytest.raises(ConfigError):
        weight_from_json({"kind": "power", "exponent": 1, "extra": 2})


def test_catalog_selector_syntax():
    s = ExperimentConfig.from_dict({"setting": {"delta_tilde": "-3/10"}}).setting()
    e = resolve_catalog_key("case-i,k=1", s)
    assert e.name == "power_tooth" and str(e.parameters["k"]) == "1"
    with pytest.raises(ConfigError):
        resolve_catalog_key("case-i,k=2", s)
    with pytest.raises(ConfigError):
        resolve_catalog_key("nothing-like-this", s)


def test_region_map_writes_csv_with_header(tmp_path):
    code, out = run(tmp_path, "region-map", {"region": {"resolution": [3, 4]}})
    assert code == cli.EXIT_OK
    lines = (out / "region_map.csv").read_text().splitlines()
    assert lines[0].startswith("# tool: weightlab")
    assert any(line.startswith("# config_digest: ") for line in lines)
    assert sum(1 for line in lines if not line.startswith("#")) == 1 + 12


def test_check_pair_tooth_member(tmp_path):
    body = {"setting": {"delta_tilde": "-3/10"}, "pair": {"catalog": "case-i,k=1"},
            "plan": {"r_min": 0.01, "r_max": 100, "n_radii": 9, "c_min": 0.01, "c_max": 100, "n_centers": 4}}
    code, out = run(tmp_path, "check-pair", body)
    rep = json.loads((out / "check_pair.json").read_text())
    assert code == cli.EXIT_OK
    assert rep["symbolic"]["status"] == "member" and rep["numeric"]["status"] == "member-consistent"
    assert rep["agreement"] is True and rep["numeric"]["plan_digest"]


def test_check_pair_piecewise_weight_is_decided(tmp_path):
    body = {"pair": {"w": {"kind": "piecewise", "inner": 0, "outer": "1/10"}, "v": 0},
            "plan": {"r_min": 0.1, "r_max": 10, "n_radii": 5, "c_min": 0.1, "c_max": 10, "n_centers": 3}}
    code, out = run(tmp_path, "check-pair", body)
    rep = json.loads((out / "check_pair.json").read_text())
    assert code == cli.EXIT_OK and rep["symbolic"] is not None  # piecewise powers are still decided


def test_verify_theorem_needs_a_member(tmp_path):
    code, _ = run(tmp_path, "verify-theorem", {"pair": {"w": 0, "v": "-1/4"}, "setting": {"delta_tilde": "3/10"}})
    assert code == cli.EXIT_CONFIG


def test_verify_theorem_small_run(tmp_path):
    code, out = run(tmp_path, "verify-theorem", {"pair": {"w": 0, "v": "-7/20"},
                                                  "theorem": {"A": [1], "n_g": 2}})
    rep = json.loads((out / "verify_theorem.json").read_text())
    assert code == cli.EXIT_OK and len(rep["ratios"]) == 2 and rep["pass"]


def test_scan_global_outputs(tmp_path):
    code, out = run(tmp_path, "scan-global", {"pair": {"w": 0, "v": "-1/4"}, "setting": {"delta_tilde": "3/10"},
                                              "scan": {"j_max": 10}})
    summary = json.loads((out / "scan_global.json").read_text())
    assert code == cli.EXIT_OK and summary["fit"]["slope"] > 0
    rows = [r for r in (out / "scan_global.csv").read_text().splitlines() if not r.startswith("#")]
    assert rows[0] == "j,M,value,value_pow_rconj" and len(rows) == 11


def test_catalog_command(tmp_path):
    code, out = run(tmp_path, "catalog", {"setting": {"delta_tilde": "3/10"}})
    rep = json.loads((out / "catalog.json").read_text())
    assert code == cli.EXIT_OK and any(e["name"].startswith("local_not_global") for e in rep["entries"])


def test_exit_codes_for_bad_files(tmp_path):
    assert cli.main(["catalog", "--config", str(tmp_path / "missing.json")]) == cli.EXIT_CONFIG
    assert cli.main(["catalog", "--config", write(tmp_path, "{not json")]) == cli.EXIT_CONFIG
    with pytest.raises(SystemExit):
        cli.main(["no-such-command", "--config", "x"])


def test_seed_override_is_recorded(tmp_path):
    code, out = run(tmp_path, "catalog", {}, "--seed", "17")
    assert json.loads((out / "catalog.json").read_text())["meta"]["seed"] == 17


def test_env_threads_must_be_integer(tmp_path, monkeypatch):
    monkeypatch.setenv("WEIGHTLAB_THREADS", "many")
    code, _ = run(tmp_path, "catalog", {})
    assert code == cli.EXIT_CONFIG


def test_console_entry_point(tmp_path):
    cfg = write(tmp_path, {})
    res = subprocess.run([sys.executable, "-m", "weightlab.cli", "catalog", "--config", cfg,
                          "--out", str(tmp_path / "o")], capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
