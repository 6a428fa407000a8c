import json

import pytest

import main as cli
from src.pipeline import PipelineResult, run_scenarios
from src.scenarios import load_builtin

PAULI = {
    "scenario_id": "pauli_file",
    "kind": "finite_dim",
    "parameters": {"operator_a": "sigma_x", "operator_b": "sigma_y", "states": [[1, 1]]},
}


def write_json(path, data):
    path.write_text(json.dumps(data))
    return path


def test_run_builtin(config, tmp_path, capsys):
    out = tmp_path / "phi.json"
    assert cli.main(["run", "--builtin", "pauli_phi1", "--out", str(out), "--no-timing"]) == 0
    payload = json.loads(out.read_text())
    assert len(payload) == 3
    assert all("wall_time_ms" not in record for record in payload)
    assert "✓ pauli_phi1" in capsys.readouterr().out


def test_run_unknown_builtin(config):
    assert cli.main(["run", "--builtin", "no_such_scenario"]) == 2


def test_run_invalid_scenario_file(config, tmp_path):
    path = write_json(tmp_path / "bad.json", {**PAULI, "unexpected": 1})
    assert cli.main(["run", "--scenario", str(path)]) == 2


def test_run_missing_scenario_file(config, tmp_path):
    assert cli.main(["run", "--scenario", str(tmp_path / "missing.json")]) == 2


def test_run_failed_check_exits_one(config, tmp_path):
    failing = {**PAULI, "parameters": {**PAULI["parameters"], "expect": [{"bound": 1.0}]}}
    path = write_json(tmp_path / "failing.json", failing)
    assert cli.main(["run", "--scenario", str(path)]) == 1


def test_run_empty_list(config, tmp_path, capsys):
    path = write_json(tmp_path / "empty.json", [])
    out = tmp_path / "empty_report.json"
    assert cli.main(["run", "--scenario", str(path), "--out", str(out)]) == 0
    assert json.loads(out.read_text()) == []
    assert "No scenarios" in capsys.readouterr().out


def test_run_combined_report(config, tmp_path):
    path = write_json(tmp_path / "two.json", [PAULI, {**PAULI, "scenario_id": "pauli_again"}])
    out = tmp_path / "combined.csv"
    assert cli.main(["run", "--scenario", str(path), "--out", str(out), "--format", "csv"]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("scenario_id,operation,delta_a")
    assert [line.split(",")[0] for line in lines[1:]] == ["pauli_file", "pauli_again"]


def test_run_writes_to_outputs_dir_by_default(config):
    assert cli.main(["run", "--builtin", "pauli_phi1"]) == 0
    assert (config.outputs_dir / "pauli_phi1.json").exists()


def test_list(capsys):
    assert cli.main(["list"]) == 0
    out = capsys.readouterr().out
    assert "pauli_phi1" in out
    assert "xm_bound_cos_ground" in out


def test_check_runs_bundled_scenarios(config, monkeypatch, capsys):
    subset = [load_builtin("pauli_phi1"), load_builtin("pt_two_level_unbroken")]
    monkeypatch.setattr(cli, "load_builtin_scenarios", lambda: subset)
    assert cli.main(["check", "--workers", "2"]) == 0
    assert "All 2 scenarios passed" in capsys.readouterr().out
    assert not config.outputs_dir.exists()


def test_check_exits_two_on_invalid_scenario(config, monkeypatch, capsys):
    subset = [load_builtin("pauli_phi1"), load_builtin("pt_two_level_unbroken")]
    invalid = PipelineResult(success=False, scenario_id="pauli_phi1", error="bad seed", error_kind="schema")

    def run_with_invalid(scenarios, workers=None, write=True):
        return [invalid, *run_scenarios(scenarios[1:], workers=workers, progress=False, write=write)]

    monkeypatch.setattr(cli, "load_builtin_scenarios", lambda: subset)
    monkeypatch.setattr(cli, "run_scenarios", run_with_invalid)
    assert cli.main(["check"]) == 2
    assert "1 bundled scenarios are invalid" in capsys.readouterr().out


def test_check_reports_config_issues(config):
    config.workers = 0
    assert cli.main(["check"]) == 2


def test_run_requires_a_source():
    with pytest.raises(SystemExit) as info:
        cli.main(["run"])
    assert info.value.code == 2
