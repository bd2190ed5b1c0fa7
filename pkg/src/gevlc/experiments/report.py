"""Experiment reports: check rows, time series, JSON and CSV writers.

Reports never contain wall-clock data; runtimes are written to a separate
``timings.json`` so that identical inputs give byte-identical reports.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

SCHEMA_VERSION = 1

ASSERT, MONITOR, REGRESSION = "assert", "monitor", "self-regression"


def _clean(x: Any) -> Any:
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if hasattr(x, "item"):
        return _clean(x.item())
    return x


@dataclass
class CheckRow:
    name: str
    claim: str
    measured: float
    target: str
    passed: bool
    kind: str = ASSERT
    note: str = ""

    def as_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "claim": self.claim,
            "kind": self.kind,
            "measured": _clean(float(self.measured)),
            "target": self.target,
            "passed": bool(self.passed),
            "note": self.note,
        }


@dataclass
class ExperimentReport:
    suite: str
    seed: int
    config: dict[str, Any]
    rows: list[CheckRow] = field(default_factory=list)
    series: list[tuple[float, str, float]] = field(default_factory=list)
    runtime: float = 0.0

    def check(self, name, claim, measured, target, passed, kind=ASSERT, note="") -> CheckRow:
        if any(r.name == name for r in self.rows):
            raise ValueError(f"duplicate check {name!r}")
        row = CheckRow(name, claim, float(measured), target, bool(passed), kind, note)
        self.rows.append(row)
        return row

    def monitor(self, name, claim, measured, note="") -> CheckRow:
        return self.check(name, claim, measured, "logged", True, MONITOR, note)

    def regression(self, name, claim, measured, note="") -> CheckRow:
        return self.check(name, claim, measured, "frozen by tests", True, REGRESSION, note)

    def record(self, t: float, name: str, value: float) -> None:
        self.series.append((float(t), name, float(value)))

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows if r.kind == ASSERT)

    @property
    def failures(self) -> list[CheckRow]:
        return [r for r in self.rows if r.kind == ASSERT and not r.passed]

    def to_json(self) -> str:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "suite": self.suite,
            "seed": self.seed,
            "passed": self.passed,
            "config": _clean(self.config),
            "checks": [r.as_dict() for r in self.rows],
            "series": [[t, n, _clean(v)] for t, n, v in self.series],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def checks_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "claim", "kind", "measured", "target", "passed", "note"])
        for r in self.rows:
            d = r.as_dict()
            w.writerow([d["name"], d["claim"], d["kind"], repr(d["measured"]), d["target"], d["passed"], d["note"]])
        return buf.getvalue()

    def series_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "norm_name", "value"])
        for t, n, v in self.series:
            w.writerow([repr(t), n, repr(v)])
        return buf.getvalue()

    def summary_lines(self) -> list[str]:
        out = []
        for r in self.rows:
            flag = "PASS" if r.passed else "FAIL"
            if r.kind != ASSERT:
                flag = "LOG "
            out.append(f"[{flag}] {self.suite}:{r.name} = {r.measured:.6g} ({r.target})")
        return out


def write_report(report: ExperimentReport, out_dir: Path, csv_files: bool = True) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = [out_dir / f"report_{report.suite}.json"]
    paths[0].write_text(report.to_json())
    if csv_files:
        p = out_dir / f"checks_{report.suite}.csv"
        p.write_text(report.checks_csv())
        paths.append(p)
        if report.series:
            p = out_dir / f"series_{report.suite}.csv"
            p.write_text(report.series_csv())
            paths.append(p)
    timings = out_dir / "timings.json"
    data = json.loads(timings.read_text()) if timings.exists() else {}
    data[report.suite] = round(report.runtime, 3)
    timings.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    return paths
