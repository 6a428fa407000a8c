"""
Report Records Module for uncertainty-lab.
Machine-readable scenario results and their JSON/CSV writers.
"""

import csv
import io
import json
import logging
import os
import tempfile
from enum import Enum
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .serialization import encode_complex, encode_float

logger = logging.getLogger(__name__)


def to_plain(value: Any) -> Any:
    """
    Convert numpy scalars/arrays, complex numbers and domain values into
    JSON-ready Python objects.
    """
    if hasattr(value, "to_dict") and callable(value.to_dict):
        return to_plain(value.to_dict())
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_plain(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return encode_complex(value)
    if isinstance(value, (float, np.floating)):
        return encode_float(value)
    return value


class Check(BaseModel):
    """One embedded assertion with the tolerance it was held to."""
    model_config = ConfigDict(extra="forbid")

    name: str
    value: Any = None
    expected: Any = None
    tolerance: Optional[float] = None
    passed: bool


class ReportRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scenario_id: str
    module: str
    operation: str
    inputs: dict[str, Any] = Field(default_factory=dict)
    outputs: dict[str, Any] = Field(default_factory=dict)
    checks: list[Check] = Field(default_factory=list)
    provenance: Optional[str] = None
    notes: list[str] = Field(default_factory=list)
    wall_time_ms: Optional[float] = None

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def add_check(
        self,
        name: str,
        passed: bool,
        value: Any = None,
        expected: Any = None,
        tolerance: Optional[float] = None,
    ) -> "ReportRecord":
        self.checks.append(Check(
            name=name,
            value=to_plain(value),
            expected=to_plain(expected),
            tolerance=tolerance,
            passed=bool(passed),
        ))
        return self

    def payload(self, include_timing: bool = True) -> dict:
        exclude = None if include_timing else {"wall_time_ms"}
        return self.model_dump(mode="json", exclude=exclude)


# CSV projections: fixed columns per scenario kind, values pulled from outputs.
CSV_COLUMNS: dict[str, list[str]] = {
    "finite_dim": ["delta_a", "delta_b", "product", "bound", "gap", "sum_of_squares", "bound_is_zero"],
    "family_scan": [
        "family_descriptor", "bound_zero_on_family", "witness_count",
        "counter_count", "max_bound", "sample_count",
    ],
    "search": ["objective", "best_value", "iterations", "restarts", "brute_force_value"],
    "box_standard": [
        "n", "theta", "in_domain", "residual", "shifted_theta",
        "delta_x", "delta_p", "product", "bound", "bound_formula",
    ],
    "box_symmetric": [
        "n", "theta", "alpha", "in_domain", "residual", "shifted_theta",
        "delta_x", "delta_p", "product", "bound", "bound_formula", "commutator_expectation",
    ],
    "pt_model": [
        "theta", "phase", "spectrum", "c_squared", "c_commutes_with_h",
        "c_commutes_with_pt", "c_minus_p", "max_residual",
    ],
    "pt_non_universality": [
        "pair", "operator_label", "model_1_residual", "model_2_residual", "verdicts_differ",
    ],
}

CSV_LEADING = ["scenario_id", "operation"]
CSV_TRAILING = ["passed"]


def csv_columns(kind: str) -> list[str]:
    return CSV_LEADING + CSV_COLUMNS.get(kind, []) + CSV_TRAILING


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True)
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def render_csv(records: list[ReportRecord], kind: str) -> str:
    columns = csv_columns(kind)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for record in records:
        row = {"scenario_id": record.scenario_id, "operation": record.operation, "passed": record.passed}
        for column in CSV_COLUMNS.get(kind, []):
            row[column] = record.outputs.get(column, record.inputs.get(column))
        writer.writerow([_csv_cell(row.get(column)) for column in columns])
    return buffer.getvalue()


def render_json(records: list[ReportRecord], include_timing: bool = True) -> str:
    payload = [record.payload(include_timing) for record in records]
    return json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"


def atomic_write(path: Union[str, Path], text: str) -> Path:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, temp_name = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(temp_name, path)
    except BaseException:
        if os.path.exists(temp_name):
            os.unlink(temp_name)
        raise
    return path


def write_records(
    records: list[ReportRecord],
    output_path: Union[str, Path],
    fmt: str = "json",
    kind: Optional[str] = None,
    include_timing: bool = True,
) -> Path:
    """
    Write records as JSON (lossless) or CSV (fixed projection per kind).

    Returns:
        The written path
    """
    if fmt == "csv":
        text = render_csv(records, kind or "")
    elif fmt == "json":
        text = render_json(records, include_timing)
    else:
        raise ValueError(f"unknown report format: {fmt}")
    path = atomic_write(output_path, text)
    logger.info(f"Wrote {len(records)} records to {path}")
    return path
