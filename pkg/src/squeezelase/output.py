"""Result tables and their deterministic CSV / JSON renderings."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import DomainError

# column formats for CSV; anything unlisted is written as the shortest round-trip repr
DB = "db"  # two decimals
MW = "mw"  # three significant figures
RAW = "raw"


def format_value(value, kind=RAW):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if kind == DB:
        text = f"{value:.2f}"
        return "0.00" if text == "-0.00" else text
    if kind == MW:
        return f"{float(f'{value:.3g}')!r}"
    return repr(value)


def _json_value(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


@dataclass(frozen=True)
class Column:
    name: str
    unit: str = ""
    kind: str = RAW


@dataclass
class ResultTable:
    columns: list
    rows: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    def add(self, *values):
        if len(values) != len(self.columns):
            raise DomainError(f"row has {len(values)} values for {len(self.columns)} columns")
        self.rows.append(tuple(values))

    @property
    def names(self):
        return [c.name for c in self.columns]

    def column(self, name):
        i = self.names.index(name)
        return [row[i] for row in self.rows]

    def to_csv(self):
        lines = [f"# {k}={format_value(self.provenance[k])}" for k in sorted(self.provenance)]
        lines.append("# units: " + ",".join(c.unit or "-" for c in self.columns))
        lines.append(",".join(self.names))
        for row in self.rows:
            lines.append(",".join(format_value(v, c.kind) for v, c in zip(row, self.columns)))
        return "\n".join(lines) + "\n"

    def to_dict(self):
        return {
            "columns": self.names,
            "units": [c.unit for c in self.columns],
            "rows": [[_json_value(v) for v in row] for row in self.rows],
            "provenance": dict(self.provenance),
        }

    def to_json(self):
        return dumps(self.to_dict())

    def render(self, fmt):
        if fmt == "json":
            return self.to_json()
        if fmt == "csv":
            return self.to_csv()
        raise DomainError(f"unknown output format {fmt!r}")


def _sanitize(obj):
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    return _json_value(obj)


def dumps(obj):
    """Stable JSON: sorted keys, non-finite floats as null, trailing newline."""
    return json.dumps(_sanitize(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"
