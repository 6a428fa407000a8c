import json

import pytest

from src.errors import ScenarioError
from src.pipeline import ScenarioPipeline, run_scenario, run_scenarios
from src.scenarios import list_builtin_scenarios, load_builtin, parse_scenarios

BUILTIN_IDS = [scenario_id for scenario_id, _ in list_builtin_scenarios()]


def pauli(scenario_id="pauli", **parameters):
    data = {
        "scenario_id": scenario_id,
        "kind": "finite_dim",
        "parameters": {"operator_a": "sigma_x", "operator_b": "sigma_y", "states": [[1, 1]], **parameters},
    }
    return parse_scenarios(data)[0]


@pytest.mark.parametrize("scenario_id", BUILTIN_IDS)
def test_builtin_scenario_passes_its_checks(config, scenario_id):
    result = ScenarioPipeline(config).run(load_builtin(scenario_id), write=False)
    assert result.success, result.error
    assert result.records
    assert result.checks_passed, result.failed_checks


def test_run_writes_default_report(config):
    result = ScenarioPipeline(config).run(pauli())
    assert result.output_path == config.outputs_dir / "pauli.json"
    payload = json.loads(result.output_path.read_text())
    assert payload[0]["module"] == "observable-core"
    assert payload[0]["outputs"]["bound"] == pytest.approx(0.0, abs=1e-12)


def test_run_writes_csv(config, tmp_path):
    result = ScenarioPipeline(config).run(pauli(), output_path=tmp_path / "pauli.csv", fmt="csv")
    header = result.output_path.read_text().splitlines()[0]
    assert header.startswith("scenario_id,operation,delta_a")


def test_seeded_runs_are_reproducible(config):
    scenario = load_builtin("gellmann_complex_counter")
    pipeline = ScenarioPipeline(config)
    first = pipeline.run(scenario, write=False)
    second = pipeline.run(scenario, write=False)
    assert [r.payload(include_timing=False) for r in first.records] == [
        r.payload(include_timing=False) for r in second.records
    ]


def test_seed_override_changes_the_draws(config):
    scenario = load_builtin("gellmann_real_family")
    pipeline = ScenarioPipeline(config)
    declared = pipeline.run(scenario, write=False)
    overridden = pipeline.run(scenario, seed=5, write=False)
    assert overridden.checks_passed
    assert declared.records[0].outputs["witness_states"] != overridden.records[0].outputs["witness_states"]


def test_module_error_is_reported(config):
    scenario = pauli(operator_a=[[0, 1], [0, 0]])
    result = ScenarioPipeline(config).run(scenario, write=False)
    assert not result.success
    assert result.error_kind == "module"
    assert result.error.startswith("[pauli]")
    with pytest.raises(ScenarioError):
        run_scenario(scenario, write=False)


def test_io_error_is_reported(config, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    result = ScenarioPipeline(config).run(pauli(), output_path=blocker / "report.json")
    assert not result.success
    assert result.error_kind == "io"
    assert result.records
    with pytest.raises(OSError):
        run_scenario(pauli(), output_path=blocker / "report.json")


def test_failed_expectation_is_a_failed_check(config):
    scenario = pauli(expect=[{"bound": 1.0}])
    result = ScenarioPipeline(config).run(scenario, write=False)
    assert result.success
    assert not result.checks_passed
    assert result.failed_checks == ["robertson_report:expect_bound"]


def test_run_scenarios_keeps_order_and_isolates_failures(config):
    scenarios = [pauli("first"), pauli("broken", operator_a=[[0, 1], [0, 0]]), pauli("last")]
    results = run_scenarios(scenarios, workers=2, progress=False, write=False)
    assert [r.scenario_id for r in results] == ["first", "broken", "last"]
    assert [r.success for r in results] == [True, False, True]


def test_run_scenarios_empty():
    assert run_scenarios([]) == []
