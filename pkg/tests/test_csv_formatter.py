import json

import numpy as np
import pytest

from utils.csv_formatter import TableFormatter


def test_unknown_format() -> None:
    with pytest.raises(ValueError):
        TableFormatter("xml")


def test_value_rendering() -> None:
    formatter = TableFormatter(digits=6)
    assert formatter.format_value(None) == ""
    assert formatter.format_value(True) == "true"
    assert formatter.format_value(np.int64(7)) == "7"
    assert formatter.format_value(1 / 3) == "0.333333"
    assert formatter.format_value(np.float64(np.inf)) == "inf"
    assert formatter.format_value(0.5 - 0.25j) == "0.5-0.25i"
    assert formatter.format_value("family-1") == "family-1"


def test_csv_rows_union_columns() -> None:
    rows = [{"family": 1, "N": 2.5}, {"family": 2, "status": "ok"}]
    text = TableFormatter().format_rows(rows)
    assert text.splitlines() == ["family,N,status", "1,2.5,", "2,,ok"]


def test_text_rows_are_aligned() -> None:
    text = TableFormatter("text").format_rows([{"a": 1, "long_name": 22}, {"a": 333, "long_name": 4}])
    lines = text.splitlines()
    assert len({len(line) for line in lines}) == 1
    assert lines[0].split() == ["a", "long_name"]


def test_empty_rows() -> None:
    assert TableFormatter().format_rows([]) == ""


def test_matrix() -> None:
    text = TableFormatter().format_matrix(np.eye(2), ["-", "+"])
    assert text.splitlines() == ["row,-,+", "-,1,0", "+,0,1"]


def test_defect_rows_and_summary() -> None:
    result = {
        "suite": "all", "success": False, "status": "failed", "failures": ["zrep.rotor"],
        "suites": {
            "zrep": {"suite": "zrep", "defects": {"rotor": 1e-3, "evaluation": 0.0},
                     "tolerances": {"rotor": 1e-10, "evaluation": 1e-10}, "failures": ["rotor"]},
            "unity": {"suite": "unity", "success": False, "status": "error", "error": "boom"},
        },
    }
    formatter = TableFormatter()
    rows = formatter.defect_rows(result)
    assert [(row["suite"], row["check"], row["passed"]) for row in rows] == [
        ("zrep", "rotor", False), ("zrep", "evaluation", True), ("unity", "run", False)]
    summary = json.loads(formatter.defect_summary(result))
    assert summary == {"success": False, "status": "failed", "failures": ["zrep.rotor"]}
