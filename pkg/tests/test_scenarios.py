import json

import pytest

from src.errors import SchemaError
from src.scenarios import (
    BoxParameters,
    ScenarioKind,
    list_builtin_scenarios,
    load_builtin,
    load_builtin_scenarios,
    load_scenarios,
    parse_scenarios,
)


def finite_dim(**overrides):
    data = {
        "scenario_id": "phi",
        "kind": "finite_dim",
        "parameters": {"operator_a": "sigma_x", "operator_b": "sigma_y", "states": [[1, 1]]},
    }
    data.update(overrides)
    return data


def test_parse_single_object():
    [scenario] = parse_scenarios(finite_dim())
    assert scenario.kind is ScenarioKind.FINITE_DIM
    assert scenario.seed is None
    assert not scenario.stochastic
    assert scenario.output.format == "json"


def test_unknown_top_level_key():
    with pytest.raises(SchemaError):
        parse_scenarios(finite_dim(colour="blue"))


def test_unknown_parameter_key():
    data = finite_dim()
    data["parameters"]["operator_c"] = "sigma_z"
    with pytest.raises(SchemaError):
        parse_scenarios(data)


def test_missing_operators():
    with pytest.raises(SchemaError):
        parse_scenarios(finite_dim(parameters={"states": [[1, 0]]}))


def test_expect_needs_one_entry_per_state():
    data = finite_dim()
    data["parameters"]["expect"] = [{"bound": 0.0}, {"bound": 1.0}]
    with pytest.raises(SchemaError):
        parse_scenarios(data)


@pytest.mark.parametrize(
    "kind, parameters",
    [
        ("finite_dim", {"random_trials": 10}),
        ("family_scan", {"operator_a": "lambda_3", "operator_b": "lambda_4", "family": {"kind": "real"}}),
        ("search", {"operator_a": "sigma_x", "operator_b": "sigma_y"}),
        ("box_symmetric", {"operation": "xm_formula", "state": "random_phase", "random_states": 5}),
        ("pt_model", {"operation": "random_sweep", "model": "random"}),
        ("pt_non_universality", {}),
    ],
)
def test_stochastic_kinds_need_a_seed(kind, parameters):
    data = {"scenario_id": "draws", "kind": kind, "parameters": parameters}
    with pytest.raises(SchemaError, match="seed"):
        parse_scenarios(data)
    [scenario] = parse_scenarios({**data, "seed": 3})
    assert scenario.stochastic


def test_duplicate_ids():
    with pytest.raises(SchemaError, match="duplicate"):
        parse_scenarios([finite_dim(), finite_dim()])


def test_bad_scenario_id():
    with pytest.raises(SchemaError):
        parse_scenarios(finite_dim(scenario_id="has space"))


def test_box_parameters_validation():
    with pytest.raises(ValueError):
        BoxParameters(operation="eigenpairs", thetas=[7.0])
    with pytest.raises(ValueError):
        BoxParameters(operation="eigenpairs", grid_points=64)


@pytest.mark.parametrize("state", ["random_phase", "random_smooth"])
def test_canonical_report_rejects_random_states(state):
    with pytest.raises(ValueError, match="canonical_report"):
        BoxParameters(operation="canonical_report", state=state)
    assert BoxParameters(operation="canonical_report", state="wall_vanishing").state.value == "wall_vanishing"


def test_pt_random_models_need_even_dims():
    data = {
        "scenario_id": "odd",
        "kind": "pt_model",
        "seed": 1,
        "parameters": {"operation": "random_sweep", "model": "random", "dims": [3]},
    }
    with pytest.raises(SchemaError):
        parse_scenarios(data)


def test_with_seed():
    [scenario] = parse_scenarios(finite_dim())
    assert scenario.with_seed(None) is scenario
    reseeded = scenario.with_seed(99)
    assert reseeded.seed == 99
    assert reseeded.scenario_id == scenario.scenario_id


def test_load_scenarios_from_file(tmp_path):
    path = tmp_path / "two.json"
    path.write_text(json.dumps([finite_dim(), finite_dim(scenario_id="other")]))
    assert [s.scenario_id for s in load_scenarios(path)] == ["phi", "other"]


def test_load_scenarios_invalid_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(SchemaError, match="invalid JSON"):
        load_scenarios(path)


def test_builtin_catalog():
    ids = [scenario_id for scenario_id, _ in list_builtin_scenarios()]
    for expected in ("pauli_phi1", "gellmann_real_family", "xm_bound_cos_ground", "pt_non_universality"):
        assert expected in ids
    assert len(ids) == len(set(ids))
    assert all(s.params is not None for s in load_builtin_scenarios())


def test_load_builtin_unknown():
    with pytest.raises(SchemaError, match="unknown builtin"):
        load_builtin("no_such_scenario")
