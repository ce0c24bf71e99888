"""Report container and its JSON / CSV serialization.

JSON output is one object ``{"meta": {...}, "rows": [...]}``.  CSV output is a
header row followed by data rows (RFC 4180 quoting, CRLF line ends).  Floats
are written with ``repr``, the shortest decimal that round-trips.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass, field

FORMATS = ("json", "csv")
_INT = re.compile(r"[+-]?\d+")


@dataclass
class Report:
    name: str
    meta: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)
    columns: tuple = ()

    def column_names(self) -> list[str]:
        if self.columns:
            return list(self.columns)
        names: list[str] = []
        for row in self.rows:
            for key in row:
                if key not in names:
                    names.append(key)
        return names

    def __eq__(self, other) -> bool:
        if not isinstance(other, Report):
            return NotImplemented
        return (
            self.name == other.name
            and _same(self.meta, other.meta)
            and _same(self.rows, other.rows)
            and list(self.columns) == list(other.columns)
        )


def _same(a, b) -> bool:
    # equality that treats nan as equal to nan
    if isinstance(a, float) and isinstance(b, float):
        return a == b or (math.isnan(a) and math.isnan(b))
    if isinstance(a, dict) and isinstance(b, dict):
        return a.keys() == b.keys() and all(_same(a[k], b[k]) for k in a)
    if isinstance(a, (list, tuple)) and isinstance(b, (list, tuple)):
        return len(a) == len(b) and all(_same(x, y) for x, y in zip(a, b))
    return type(a) is type(b) and a == b


def _plain(value):
    """Convert numpy scalars and tuples to JSON-native values."""
    if hasattr(value, "item") and not isinstance(value, (list, dict)):
        value = value.item()
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def to_json(report: Report) -> bytes:
    meta = dict(_plain(report.meta))
    meta["report"] = report.name
    meta["columns"] = report.column_names()
    doc = {"meta": meta, "rows": [_plain(r) for r in report.rows]}
    return (json.dumps(doc, indent=2, sort_keys=False, ensure_ascii=False) + "\n").encode("utf-8")


def from_json(data: bytes | str) -> Report:
    doc = json.loads(data)
    meta = dict(doc["meta"])
    name = meta.pop("report", "")
    columns = tuple(meta.pop("columns", ()))
    return Report(name, meta, list(doc["rows"]), columns)


def _cell(value) -> str:
    value = _plain(value)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, dict)):
        return json.dumps(value)
    return str(value)


def _parse_cell(text: str):
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    if _INT.fullmatch(text):
        return int(text)
    try:
        return float(text)
    except ValueError:
        return text


def to_csv(report: Report) -> bytes:
    names = report.column_names()
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(names)
    for row in report.rows:
        writer.writerow([_cell(row.get(k)) for k in names])
    return buf.getvalue().encode("utf-8")


def from_csv(data: bytes | str, name: str = "") -> Report:
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    reader = csv.reader(io.StringIO(text, newline=""))
    lines = list(reader)
    if not lines:
        return Report(name)
    header = lines[0]
    rows = [{k: _parse_cell(v) for k, v in zip(header, line)} for line in lines[1:]]
    return Report(name, {}, rows, tuple(header))


def serialize(report: Report, fmt: str = "json") -> bytes:
    if fmt == "json":
        return to_json(report)
    if fmt == "csv":
        return to_csv(report)
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")


def parse(data: bytes | str, fmt: str = "json") -> Report:
    if fmt == "json":
        return from_json(data)
    if fmt == "csv":
        return from_csv(data)
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")
