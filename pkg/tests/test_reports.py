import csv
import io
import json
import math

import numpy as np
import pytest

from src.reports import (
    ReportRecord,
    atomic_write,
    csv_columns,
    render_csv,
    render_json,
    to_plain,
    write_records,
)
from src.scenarios import ScenarioKind
from src.serialization import decode_complex, decode_matrix, encode_complex, encode_float


def record(**outputs):
    rec = ReportRecord(scenario_id="demo", module="observable-core", operation="robertson_report", outputs=outputs)
    return rec


def test_to_plain_handles_numpy_and_complex():
    value = {
        "a": np.float64(1.5),
        "b": np.int64(3),
        "c": np.bool_(True),
        "d": 1 + 2j,
        "e": np.array([1.0, 2.0]),
        "f": (np.nan, math.inf),
        "g": ScenarioKind.SEARCH,
    }
    assert to_plain(value) == {
        "a": 1.5,
        "b": 3,
        "c": True,
        "d": {"re": 1.0, "im": 2.0},
        "e": [1.0, 2.0],
        "f": [None, None],
        "g": "search",
    }


def test_encode_float_keeps_shortest_round_trip():
    assert encode_float(0.1) == 0.1
    assert json.dumps(encode_float(0.1)) == "0.1"
    assert encode_float(None) is None


@pytest.mark.parametrize(
    "spelling, expected",
    [(2, 2 + 0j), (-0.5, -0.5 + 0j), ([1, -2], 1 - 2j), ({"re": 0, "im": 1}, 1j), ({"im": 3}, 3j), ("1 - 2j", 1 - 2j)],
)
def test_decode_complex_spellings(spelling, expected):
    assert decode_complex(spelling) == expected


@pytest.mark.parametrize("spelling", [True, [1, 2, 3], None])
def test_decode_complex_rejects(spelling):
    with pytest.raises(ValueError):
        decode_complex(spelling)


def test_decode_matrix():
    assert np.array_equal(decode_matrix([[0, [0, -1]], [{"im": 1}, 0]]), np.array([[0, -1j], [1j, 0]]))
    assert encode_complex(-1j) == {"re": 0.0, "im": -1.0}


def test_record_checks_and_payload():
    rec = record(bound=0.0)
    rec.add_check("bound_zero", True, value=np.float64(0.0), expected=0.0, tolerance=1e-12)
    rec.add_check("gap_non_negative", False, value=-1.0)
    rec.wall_time_ms = 12.5
    assert not rec.passed
    assert rec.checks[0].value == 0.0
    assert "wall_time_ms" in rec.payload()
    assert "wall_time_ms" not in rec.payload(include_timing=False)


def test_render_json_is_sorted_and_strict():
    text = render_json([record(z=1.0, a=2.0)], include_timing=False)
    payload = json.loads(text)
    assert payload[0]["outputs"] == {"a": 2.0, "z": 1.0}
    assert text.index('"a"') < text.index('"z"')
    assert json.loads(render_json([record(bad=to_plain(math.nan))]))[0]["outputs"]["bad"] is None


def test_render_csv_projection():
    rec = record(delta_a=0.0, delta_b=1.0, product=0.0, bound=0.0, gap=0.0, bound_is_zero=True, extra="dropped")
    text = render_csv([rec], "finite_dim")
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == csv_columns("finite_dim")
    row = dict(zip(rows[0], rows[1]))
    assert row["scenario_id"] == "demo"
    assert row["bound_is_zero"] == "true"
    assert row["sum_of_squares"] == ""
    assert row["passed"] == "true"
    assert "extra" not in row


def test_csv_cells_serialize_nested_values():
    rec = ReportRecord(
        scenario_id="pt",
        module="pt-symmetry",
        operation="spectrum",
        outputs={"spectrum": [{"re": 1.0, "im": 0.0}]},
    )
    rows = list(csv.DictReader(io.StringIO(render_csv([rec], "pt_model"))))
    assert json.loads(rows[0]["spectrum"]) == [{"im": 0.0, "re": 1.0}]


def test_atomic_write_replaces_file(tmp_path):
    path = tmp_path / "nested" / "report.json"
    atomic_write(path, "first")
    atomic_write(path, "second")
    assert path.read_text() == "second"
    assert [p.name for p in path.parent.iterdir()] == ["report.json"]


def test_write_records_formats(tmp_path):
    records = [record(bound=0.0)]
    json_path = write_records(records, tmp_path / "out.json", "json")
    assert json.loads(json_path.read_text())[0]["scenario_id"] == "demo"
    csv_path = write_records(records, tmp_path / "out.csv", "csv", kind="finite_dim")
    assert csv_path.read_text().startswith("scenario_id,operation,")
    with pytest.raises(ValueError):
        write_records(records, tmp_path / "out.xml", "xml")
