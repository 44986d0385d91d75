"""Report assembly: verdicts, provenance, deterministic serialization, and
CSV emission of table data."""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from . import __version__

__all__ = ["Verdict", "Report", "Table", "write_report"]

SCHEMA_VERSION = 1


@dataclass
class Verdict:
    name: str
    measured: float
    threshold: float
    comparator: str  # "<=", ">=", "=="

    @property
    def passed(self) -> bool:
        if self.comparator == "<=":
            return self.measured <= self.threshold
        if self.comparator == ">=":
            return self.measured >= self.threshold
        if self.comparator == "==":
            return self.measured == self.threshold
        raise ValueError(f"unknown comparator {self.comparator!r}")

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "measured": self.measured,
            "threshold": self.threshold,
            "comparator": self.comparator,
            "pass": self.passed,
        }


@dataclass
class Table:
    """Delimited table data: one x column followed by named series."""

    name: str
    columns: List[str]
    rows: List[List[float]]

    def to_json(self) -> dict:
        return {"name": self.name, "columns": self.columns, "rows": self.rows}

    def write_csv(self, directory: str) -> str:
        path = os.path.join(directory, f"{self.name}.csv")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.columns)
            writer.writerows(self.rows)
        return path


@dataclass
class Report:
    scenario: dict
    results: dict
    verdicts: List[Verdict] = field(default_factory=list)
    tables: List[Table] = field(default_factory=list)
    seed: int = 0
    settings: Dict[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "tool": {"name": "flatlab", "version": __version__},
            "scenario": self.scenario,
            "provenance": {"seed": self.seed, "settings": self.settings},
            "results": self.results,
            "tables": [t.to_json() for t in self.tables],
            "verdicts": [v.to_json() for v in self.verdicts],
            "pass": self.passed,
        }

    def serialize(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"

    def summary_lines(self) -> List[str]:
        lines = []
        for v in self.verdicts:
            status = "PASS" if v.passed else "FAIL"
            lines.append(f"[{status}] {v.name}: measured {v.measured:.6g} "
                         f"{v.comparator} {v.threshold:.6g}")
        lines.append(f"verdicts: {sum(v.passed for v in self.verdicts)}"
                     f"/{len(self.verdicts)} pass")
        return lines


def write_report(report: Report, out_path: Optional[str], fmt: str = "json",
                 figures_dir: Optional[str] = None) -> Optional[str]:
    """Serialize the report; optionally emit CSV tables and figure files."""
    text = report.serialize()
    if out_path:
        os.makedirs(os.path.dirname(os.path.abspath(out_path)), exist_ok=True)
        with open(out_path, "w") as fh:
            fh.write(text)
    if fmt == "csv" and out_path:
        directory = os.path.dirname(os.path.abspath(out_path))
        for table in report.tables:
            table.write_csv(directory)
    if figures_dir:
        from .figures import render_report_figures

        render_report_figures(report, figures_dir)
    return out_path
