import io
import csv
import json
import math
import logging
from typing import Any, Dict, List, Sequence

import numpy as np

logger = logging.getLogger(__name__)

FORMATS = ("csv", "text")


class TableFormatter:
    """Renders row dicts as CSV or as aligned text columns."""

    def __init__(self, output_format: str = "csv", digits: int = 12):
        if output_format not in FORMATS:
            raise ValueError(f"Unknown output format '{output_format}' (expected one of {FORMATS})")
        self.output_format = output_format
        self.digits = digits

    def format_value(self, value: Any) -> str:
        if value is None:
            return ""
        if isinstance(value, (bool, np.bool_)):
            return "true" if value else "false"
        if isinstance(value, (int, np.integer)):
            return str(int(value))
        if isinstance(value, (float, np.floating)):
            value = float(value)
            if math.isnan(value) or math.isinf(value):
                return str(value)
            return f"{value:.{self.digits}g}"
        if isinstance(value, (complex, np.complexfloating)):
            value = complex(value)
            sign = "-" if value.imag < 0 else "+"
            return f"{value.real:.{self.digits}g}{sign}{abs(value.imag):.{self.digits}g}i"
        return str(value)

    def _columns(self, rows: Sequence[Dict[str, Any]]) -> List[str]:
        columns: List[str] = []
        for row in rows:
            for key in row:
                if key not in columns:
                    columns.append(key)
        return columns

    def format_rows(self, rows: Sequence[Dict[str, Any]]) -> str:
        if not rows:
            return ""
        columns = self._columns(rows)
        cells = [[self.format_value(row.get(column)) for column in columns] for row in rows]
        if self.output_format == "csv":
            buffer = io.StringIO()
            writer = csv.writer(buffer, lineterminator="\n")
            writer.writerow(columns)
            writer.writerows(cells)
            return buffer.getvalue()
        widths = [max(len(column), *(len(line[index]) for line in cells)) for index, column in enumerate(columns)]
        lines = ["  ".join(column.rjust(width) for column, width in zip(columns, widths))]
        lines.extend("  ".join(cell.rjust(width) for cell, width in zip(line, widths)) for line in cells)
        return "\n".join(lines) + "\n"

    def format_matrix(self, matrix: np.ndarray, labels: Sequence[str]) -> str:
        rows = []
        for label, values in zip(labels, np.asarray(matrix)):
            row: Dict[str, Any] = {"row": label}
            for column, value in zip(labels, values):
                row[column] = complex(value) if np.iscomplexobj(values) else float(value)
            rows.append(row)
        return self.format_rows(rows)

    def defect_rows(self, result: Dict[str, Any]) -> List[Dict[str, Any]]:
        """One row per (suite, check) with its defect, tolerance and pass flag."""
        if "suites" in result:
            rows = []
            for suite_result in result["suites"].values():
                rows.extend(self.defect_rows(suite_result))
            return rows
        if "defects" not in result:
            return [{"suite": result.get("suite"), "check": "run", "defect": None, "tolerance": None,
                     "passed": False, "error": result.get("error")}]
        return [{"suite": result["suite"], "check": name, "defect": value,
                 "tolerance": result["tolerances"][name], "passed": name not in result["failures"]}
                for name, value in result["defects"].items()]

    def defect_summary(self, result: Dict[str, Any]) -> str:
        """Machine-readable summary printed when a tolerance check fails."""
        summary = {
            "success": result.get("success", False),
            "status": result.get("status"),
            "failures": result.get("failures", []),
        }
        if "error" in result:
            summary["error"] = result["error"]
        return json.dumps(summary, sort_keys=True)
