"""Versioned line-oriented report documents.

A document looks like::

    bdsiw-report 1
    command = "fit"

    [fit]
    model = "bdsiw"
    neg_log_lik = 61.96058...
    columns = ["x1", "x2", "value"]
    row = [0, 0, 0.0123]

The first line carries the format version. Every other non-blank line is a
``[section]`` header, a ``key = <json>`` field, or a ``row = <json list>``
table row belonging to the current section. Lines starting with ``#`` are
comments. Values are JSON scalars or lists, so floats round-trip exactly.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field

from .errors import BdsiwError

FORMAT_VERSION = 1
MAGIC = "bdsiw-report"
_RESERVED = ("columns", "row")
_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_.:-]*$")
_FIELD_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_.-]*)\s*=\s*(.*)$")


class ReportParseError(BdsiwError, ValueError):
    """A report document could not be parsed."""


def _normalise(value):
    if isinstance(value, (list, tuple)):
        return [_normalise(v) for v in value]
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, int) or hasattr(value, "__index__"):
        return int(value)
    if isinstance(value, float) or hasattr(value, "__float__"):
        return float(value)
    raise TypeError(f"unsupported report value {value!r}")


@dataclass
class Section:
    name: str
    fields: dict = field(default_factory=dict)
    columns: list | None = None
    rows: list = field(default_factory=list)

    def __post_init__(self):
        if not _NAME_RE.match(self.name):
            raise ValueError(f"bad section name {self.name!r}")
        for key in self.fields:
            if key in _RESERVED or not _FIELD_RE.match(f"{key} = 0"):
                raise ValueError(f"bad field name {key!r}")
        self.fields = {k: _normalise(v) for k, v in self.fields.items()}
        if self.columns is not None:
            self.columns = [str(c) for c in self.columns]
        self.rows = [_normalise(r) for r in self.rows]
        if self.rows and self.columns is None:
            raise ValueError("rows need column names")
        for r in self.rows:
            if len(r) != len(self.columns):
                raise ValueError(f"row {r} does not match columns {self.columns}")

    def column(self, name: str) -> list:
        j = self.columns.index(name)
        return [r[j] for r in self.rows]

    def records(self) -> list[dict]:
        return [dict(zip(self.columns, r)) for r in self.rows]


@dataclass
class ReportDocument:
    command: str
    sections: list[Section] = field(default_factory=list)
    version: int = FORMAT_VERSION

    def section(self, name: str) -> Section:
        for s in self.sections:
            if s.name == name:
                return s
        raise KeyError(name)

    def add(self, name, fields=None, columns=None, rows=()) -> Section:
        sec = Section(name, dict(fields or {}), columns, list(rows))
        self.sections.append(sec)
        return sec


def _dump(value) -> str:
    return json.dumps(value, ensure_ascii=False)


def serialize(doc: ReportDocument) -> str:
    lines = [f"{MAGIC} {doc.version}", f"command = {_dump(doc.command)}"]
    for sec in doc.sections:
        lines += ["", f"[{sec.name}]"]
        lines += [f"{k} = {_dump(v)}" for k, v in sec.fields.items()]
        if sec.columns is not None:
            lines.append(f"columns = {_dump(sec.columns)}")
            lines += [f"row = {_dump(r)}" for r in sec.rows]
    return "\n".join(lines) + "\n"


def parse(text: str) -> ReportDocument:
    lines = text.splitlines()
    if not lines:
        raise ReportParseError("empty report")
    head = lines[0].split()
    if len(head) != 2 or head[0] != MAGIC or not head[1].isdigit():
        raise ReportParseError(f"line 1: expected '{MAGIC} <version>', got {lines[0]!r}")
    version = int(head[1])
    if version > FORMAT_VERSION:
        raise ReportParseError(f"report version {version} is newer than supported {FORMAT_VERSION}")

    command = None
    sections: list[dict] = []
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            sections.append({"name": line[1:-1], "fields": {}, "columns": None, "rows": []})
            continue
        m = _FIELD_RE.match(line)
        if not m:
            raise ReportParseError(f"line {lineno}: cannot parse {raw!r}")
        key, payload = m.groups()
        try:
            value = json.loads(payload)
        except json.JSONDecodeError as exc:
            raise ReportParseError(f"line {lineno}: bad value for {key!r}: {exc}") from None
        if not sections:
            if key != "command":
                raise ReportParseError(f"line {lineno}: field {key!r} outside any section")
            command = value
            continue
        cur = sections[-1]
        if key == "columns":
            cur["columns"] = value
        elif key == "row":
            if cur["columns"] is None:
                raise ReportParseError(f"line {lineno}: row before columns")
            cur["rows"].append(value)
        else:
            cur["fields"][key] = value
    if command is None:
        raise ReportParseError("missing command field")
    try:
        secs = [Section(**s) for s in sections]
    except (ValueError, TypeError) as exc:
        raise ReportParseError(str(exc)) from None
    return ReportDocument(command, secs, version)


# ---------------------------------------------------------------------------
# human-readable rendering


def format_value(v) -> str:
    if isinstance(v, bool) or v is None:
        return str(v).lower()
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if v != 0 and (abs(v) < 1e-4 or abs(v) >= 1e6):
            return f"{v:.4e}"
        return f"{v:.4f}"
    if isinstance(v, list):
        return ", ".join(format_value(x) for x in v)
    return str(v)


def render_table(doc: ReportDocument) -> str:
    out = []
    for sec in doc.sections:
        out.append(f"== {sec.name} ==")
        if sec.fields:
            width = max(len(k) for k in sec.fields)
            out += [f"  {k.ljust(width)}  {format_value(v)}" for k, v in sec.fields.items()]
        if sec.columns is not None:
            cells = [[format_value(v) for v in r] for r in sec.rows]
            widths = [max([len(c)] + [len(r[j]) for r in cells]) for j, c in enumerate(sec.columns)]
            out.append("  " + "  ".join(c.rjust(w) for c, w in zip(sec.columns, widths)))
            out += ["  " + "  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
        out.append("")
    return "\n".join(out)
