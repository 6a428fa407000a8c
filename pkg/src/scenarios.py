"""
Scenario Schema Module for uncertainty-lab.
Declarative JSON scenario files validated with pydantic; unknown keys are
rejected.
"""

import json
import logging
from enum import Enum
from pathlib import Path
from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .config import get_config
from .errors import SchemaError
from .zero_bound import FamilyKind, Objective

logger = logging.getLogger(__name__)


class ScenarioKind(str, Enum):
    FINITE_DIM = "finite_dim"
    FAMILY_SCAN = "family_scan"
    SEARCH = "search"
    BOX_STANDARD = "box_standard"
    BOX_SYMMETRIC = "box_symmetric"
    PT_MODEL = "pt_model"
    PT_NON_UNIVERSALITY = "pt_non_universality"


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


# Operators are catalog names ("sigma_x", "lambda_4", ...) or explicit matrices
# whose entries use any complex spelling accepted by serialization.decode_complex.
OperatorSpec = Union[str, list[list[Any]]]


class FiniteDimParameters(StrictModel):
    operator_a: Optional[OperatorSpec] = None
    operator_b: Optional[OperatorSpec] = None
    states: list[list[Any]] = Field(default_factory=list)
    expect: list[dict[str, float]] = Field(default_factory=list)
    expect_tolerance: float = 1e-12
    random_trials: int = Field(default=0, ge=0)
    random_dims: list[int] = Field(default_factory=lambda: [2, 3, 4, 5, 6, 7, 8])

    @model_validator(mode="after")
    def check_inputs(self):
        if self.random_trials == 0:
            if self.operator_a is None or self.operator_b is None:
                raise ValueError("operator_a and operator_b are required without random_trials")
            if not self.states:
                raise ValueError("at least one state is required without random_trials")
        if self.expect and len(self.expect) != len(self.states):
            raise ValueError("expect needs one entry per state")
        if any(dim < 1 for dim in self.random_dims):
            raise ValueError("random_dims must be positive")
        return self


class FamilySpec(StrictModel):
    kind: FamilyKind
    dim: int = 3
    amplitude_range: tuple[float, float] = (-1.0, 1.0)
    beta_range: tuple[float, float] = (-2.0, 2.0)
    include_beta_zero: bool = True
    anchors: list[list[Any]] = Field(default_factory=list)


class FamilyScanParameters(StrictModel):
    operator_a: OperatorSpec
    operator_b: OperatorSpec
    family: FamilySpec
    samples: Optional[int] = Field(default=None, ge=1)
    expect_bound_zero: Optional[bool] = None
    expect_anchor_bound_above: Optional[float] = None


class SearchParameters(StrictModel):
    operator_a: OperatorSpec
    operator_b: OperatorSpec
    objective: Objective = Objective.PRODUCT
    restarts: Optional[int] = Field(default=None, ge=1)
    expect_max_value: Optional[float] = None
    brute_force: bool = False
    brute_force_points: Optional[int] = Field(default=None, ge=2)
    brute_force_tolerance: float = 1e-6


class BoxOperation(str, Enum):
    EIGENPAIRS = "eigenpairs"
    DOMAIN_PATHOLOGY = "domain_pathology"
    DOMAIN_SHIFT = "domain_shift"
    XM_FORMULA = "xm_formula"
    XM_BOUND = "xm_bound"
    CANONICAL_REPORT = "canonical_report"


class BoxState(str, Enum):
    EIGENFUNCTION = "eigenfunction"
    WALL_VANISHING = "wall_vanishing"
    RANDOM_PHASE = "random_phase"
    RANDOM_SMOOTH = "random_smooth"


class BoxParameters(StrictModel):
    operation: BoxOperation
    length: Optional[float] = Field(default=None, gt=0)
    hbar: Optional[float] = Field(default=None, gt=0)
    ns: list[int] = Field(default_factory=lambda: [-2, -1, 0, 1, 2])
    thetas: list[float] = Field(default_factory=lambda: [0.0, 1.0, 3.0])
    alphas: list[float] = Field(default_factory=lambda: [0.5, 1.0, 2.0])
    state: BoxState = BoxState.EIGENFUNCTION
    random_states: int = Field(default=0, ge=0)
    grid_points: Optional[int] = Field(default=None, ge=5)

    @model_validator(mode="after")
    def check_angles(self):
        for theta in self.thetas:
            if not 0.0 <= theta < 6.283185307179586:
                raise ValueError(f"theta {theta} outside [0, 2pi)")
        if self.grid_points is not None and self.grid_points % 2 == 0:
            raise ValueError("grid_points must be odd")
        if self.operation is BoxOperation.CANONICAL_REPORT and self.state not in (
            BoxState.EIGENFUNCTION,
            BoxState.WALL_VANISHING,
        ):
            raise ValueError("canonical_report takes eigenfunction or wall_vanishing states")
        return self

    @property
    def stochastic(self) -> bool:
        return self.random_states > 0 or self.state in (BoxState.RANDOM_PHASE, BoxState.RANDOM_SMOOTH)


class PTOperation(str, Enum):
    SPECTRUM = "spectrum"
    C_OPERATOR = "c_operator"
    HERMITIAN_LIMIT = "hermitian_limit"
    RANDOM_SWEEP = "random_sweep"


class PTModelParameters(StrictModel):
    operation: PTOperation
    model: Literal["two_level", "matrix", "random"] = "two_level"
    r: float = 1.0
    s: float = 2.0
    theta: float = 0.5
    H: Optional[list[list[Any]]] = None
    parity: Optional[list[list[int]]] = None
    dims: list[int] = Field(default_factory=lambda: [2, 4])
    count: int = Field(default=100, ge=1)
    path_points: int = Field(default=10, ge=3)
    expect_phase: Optional[Literal["unbroken", "broken"]] = None

    @model_validator(mode="after")
    def check_model(self):
        if self.model == "matrix" and self.H is None:
            raise ValueError("model 'matrix' needs H")
        if any(dim < 2 or dim % 2 for dim in self.dims):
            raise ValueError("random PT models need even dims >= 2")
        return self

    @property
    def stochastic(self) -> bool:
        return self.model == "random" or self.operation is PTOperation.RANDOM_SWEEP


class PTNonUniversalityParameters(StrictModel):
    pairs: int = Field(default=3, ge=1)
    dim: int = Field(default=2, ge=2)
    operators: list[Literal["h1", "c1", "identity", "h2"]] = Field(
        default_factory=lambda: ["h1", "identity", "h2"]
    )
    min_violation: float = 1e-3


PARAMETER_MODELS: dict[ScenarioKind, type[StrictModel]] = {
    ScenarioKind.FINITE_DIM: FiniteDimParameters,
    ScenarioKind.FAMILY_SCAN: FamilyScanParameters,
    ScenarioKind.SEARCH: SearchParameters,
    ScenarioKind.BOX_STANDARD: BoxParameters,
    ScenarioKind.BOX_SYMMETRIC: BoxParameters,
    ScenarioKind.PT_MODEL: PTModelParameters,
    ScenarioKind.PT_NON_UNIVERSALITY: PTNonUniversalityParameters,
}

ALWAYS_STOCHASTIC = {ScenarioKind.FAMILY_SCAN, ScenarioKind.SEARCH, ScenarioKind.PT_NON_UNIVERSALITY}


class OutputSpec(StrictModel):
    format: Literal["json", "csv"] = "json"
    path: Optional[str] = None


class ScenarioConfig(StrictModel):
    """One declarative scenario."""
    scenario_id: str = Field(pattern=r"^[A-Za-z0-9_\-]+$")
    description: str = ""
    kind: ScenarioKind
    parameters: dict[str, Any] = Field(default_factory=dict)
    seed: Optional[int] = None
    output: OutputSpec = Field(default_factory=OutputSpec)
    provenance: Optional[str] = None

    @model_validator(mode="after")
    def check_parameters(self):
        params = self.params
        if self._is_stochastic(params) and self.seed is None:
            raise ValueError(f"scenario kind '{self.kind.value}' draws random numbers and needs a seed")
        return self

    @property
    def params(self) -> StrictModel:
        """Parameters validated against the model of this kind."""
        return PARAMETER_MODELS[self.kind].model_validate(self.parameters)

    @property
    def stochastic(self) -> bool:
        return self._is_stochastic(self.params)

    def _is_stochastic(self, params: StrictModel) -> bool:
        if self.kind in ALWAYS_STOCHASTIC:
            return True
        if self.kind is ScenarioKind.FINITE_DIM:
            return params.random_trials > 0
        return bool(getattr(params, "stochastic", False))

    def with_seed(self, seed: Optional[int]) -> "ScenarioConfig":
        """Copy with the seed replaced (None keeps the declared one)."""
        if seed is None:
            return self
        data = self.model_dump(mode="json")
        data["seed"] = seed
        return ScenarioConfig.model_validate(data)


def parse_scenarios(data: Any, source: str = "<data>") -> list[ScenarioConfig]:
    """
    Validate one scenario object or a list of them.

    Raises:
        SchemaError: invalid scenario or duplicate scenario_id
    """
    items = data if isinstance(data, list) else [data]
    scenarios = []
    for index, item in enumerate(items):
        try:
            scenarios.append(ScenarioConfig.model_validate(item))
        except ValidationError as e:
            raise SchemaError(f"{source}[{index}]: {e}") from e

    seen = set()
    for scenario in scenarios:
        if scenario.scenario_id in seen:
            raise SchemaError(f"{source}: duplicate scenario_id '{scenario.scenario_id}'")
        seen.add(scenario.scenario_id)
    return scenarios


def load_scenarios(path: Union[str, Path]) -> list[ScenarioConfig]:
    """Load a scenario file (JSON object or list)."""
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise SchemaError(f"{path}: invalid JSON ({e})") from e
    return parse_scenarios(data, source=str(path))


def _builtin_files() -> list[Path]:
    return sorted(get_config().scenarios_dir.glob("*.json"))


def load_builtin_scenarios() -> list[ScenarioConfig]:
    """Every bundled scenario, in file-name order."""
    scenarios = []
    for path in _builtin_files():
        scenarios.extend(load_scenarios(path))
    ids = [s.scenario_id for s in scenarios]
    duplicates = {i for i in ids if ids.count(i) > 1}
    if duplicates:
        raise SchemaError(f"duplicate builtin scenario ids: {sorted(duplicates)}")
    return scenarios


def list_builtin_scenarios() -> list[tuple[str, str]]:
    """(scenario_id, description) of every bundled scenario."""
    return [(s.scenario_id, s.description) for s in load_builtin_scenarios()]


def load_builtin(scenario_id: str) -> ScenarioConfig:
    for scenario in load_builtin_scenarios():
        if scenario.scenario_id == scenario_id:
            return scenario
    raise SchemaError(f"unknown builtin scenario '{scenario_id}'")
