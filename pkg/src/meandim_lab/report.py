"""Report documents: named scalars with tolerances, tables, and checks.

A report serialises to JSON (sorted keys) and to one CSV file per table.
The `meta` block carries the timestamp and runtimes and is the only part
excluded by comparison mode, so two runs with the same configuration and
seed produce byte-identical comparable payloads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

__all__ = ["Scalar", "Table", "Check", "ReportDocument", "comparable_json"]

_PROVENANCES = ("reference", "derived", "trivial", "config")


def _py(x):
    """Coerce numpy scalars to plain Python types for JSON."""
    if hasattr(x, "item") and not isinstance(x, (str, bytes)):
        return x.item()
    return x


def _fmt(x) -> str:
    x = _py(x)
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


@dataclass(frozen=True)
class Scalar:
    """A named result; `tolerance` is what the value was checked against."""

    name: str
    value: float
    tolerance: float | None = None
    target: float | None = None
    provenance: str = "derived"
    passed: bool | None = None
    note: str = ""

    def __post_init__(self):
        if self.provenance not in _PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")

    def to_dict(self) -> dict:
        doc = {"name": self.name, "value": float(self.value),
               "provenance": self.provenance}
        if self.tolerance is not None:
            doc["tolerance"] = float(self.tolerance)
        if self.target is not None:
            doc["target"] = float(self.target)
        if self.passed is not None:
            doc["passed"] = bool(self.passed)
        if self.note:
            doc["note"] = self.note
        return doc


@dataclass(frozen=True)
class Table:
    name: str
    columns: tuple
    rows: tuple

    def to_dict(self) -> dict:
        return {"name": self.name, "columns": list(self.columns),
                "rows": [[_py(x) for x in r] for r in self.rows]}

    def write_csv(self, path: Path) -> Path:
        lines = [",".join(self.columns)]
        for row in self.rows:
            lines.append(",".join(_fmt(x) for x in row))
        path.write_text("\n".join(lines) + "\n")
        return path


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str = ""

    def to_dict(self) -> dict:
        doc = {"name": self.name, "ok": bool(self.ok)}
        if self.detail:
            doc["detail"] = self.detail
        return doc


@dataclass
class ReportDocument:
    command: str
    scalars: list = field(default_factory=list)
    tables: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)
    # Non-serialised side payloads (figure data etc.); never written out.
    artifacts: dict = field(default_factory=dict, repr=False)

    def add_scalar(self, *args, **kwargs):
        self.scalars.append(Scalar(*args, **kwargs))

    def add_check(self, *args, **kwargs):
        self.checks.append(Check(*args, **kwargs))

    def add_table(self, name, columns, rows):
        self.tables.append(Table(name=name, columns=tuple(columns),
                                 rows=tuple(tuple(r) for r in rows)))

    @property
    def all_ok(self) -> bool:
        scalars_ok = all(bool(s.passed) for s in self.scalars
                         if s.passed is not None)
        return scalars_ok and all(bool(c.ok) for c in self.checks)

    def to_dict(self, include_meta: bool = True) -> dict:
        doc = {
            "command": self.command,
            "scalars": [s.to_dict() for s in self.scalars],
            "tables": [t.to_dict() for t in self.tables],
            "checks": [c.to_dict() for c in self.checks],
            "all_ok": self.all_ok,
        }
        if include_meta:
            doc["meta"] = dict(self.meta)
        return doc

    def to_json(self, include_meta: bool = True) -> str:
        return json.dumps(self.to_dict(include_meta), sort_keys=True,
                          indent=2) + "\n"

    def write_json(self, path: Path) -> Path:
        path.write_text(self.to_json())
        return path

    def write_csv_tables(self, outdir: Path) -> list[Path]:
        paths = []
        for table in self.tables:
            paths.append(table.write_csv(
                outdir / f"{self.command}_{table.name}.csv"))
        return paths


def comparable_json(report_json: str) -> str:
    """Report JSON with the meta block removed (comparison mode)."""
    doc = json.loads(report_json)
    doc.pop("meta", None)
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"
