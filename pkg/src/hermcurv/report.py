"""Verification reports and sweep tables, with JSON/CSV/text emission."""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .errors import ConfigError, ReportIOError

SCHEMA_VERSION = "1.0"
STATUSES = ("pass", "fail", "skipped")
FORMATS = ("json", "csv", "text")

CHECK_FIELDS = ("id", "description", "anchor", "residual", "tolerance", "comparison", "status", "detail")


@dataclass
class Check:
    """One verified quantity.

    ``comparison`` is ``"<="`` for residuals that must stay below the
    tolerance and ``">="`` for witnesses that must exceed a threshold.
    """

    id: str
    description: str
    anchor: str
    residual: float | None
    tolerance: float
    comparison: str = "<="
    status: str = "pass"
    detail: str = ""
    seconds: float = 0.0

    @classmethod
    def evaluate(cls, id, description, anchor, residual, tolerance, comparison="<=", detail=""):
        if residual is None or not math.isfinite(residual):
            ok = False
        elif comparison == "<=":
            ok = residual <= tolerance
        elif comparison == ">=":
            ok = residual >= tolerance
        else:
            raise ValueError(f"unknown comparison {comparison!r}")
        return cls(id, description, anchor, residual, tolerance, comparison, "pass" if ok else "fail", detail)

    def as_dict(self, stable: bool = False) -> dict:
        out = {k: _plain(getattr(self, k)) for k in CHECK_FIELDS}
        if not stable:
            out["seconds"] = round(self.seconds, 6)
        return out


@dataclass
class VerificationReport:
    config: dict
    checks: list = field(default_factory=list)
    version: str = __version__
    created: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds"))

    def __post_init__(self):
        ids = [c.id for c in self.checks]
        if len(ids) != len(set(ids)):
            dup = sorted({i for i in ids if ids.count(i) > 1})
            raise ConfigError(f"duplicate check ids: {dup}")

    @property
    def status(self) -> str:
        return "fail" if any(c.status == "fail" for c in self.checks) else "pass"

    @property
    def failed(self) -> list:
        return [c for c in self.checks if c.status == "fail"]

    def counts(self) -> dict:
        return {s: sum(c.status == s for c in self.checks) for s in STATUSES}

    def as_dict(self, stable: bool = False) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "kind": "verification_report",
            "tool_version": self.version,
            "status": self.status,
            "counts": self.counts(),
            "config": _plain(self.config),
            "checks": [c.as_dict(stable) for c in sorted(self.checks, key=lambda c: c.id)],
        }
        if not stable:
            out["created"] = self.created
            out["total_seconds"] = round(sum(c.seconds for c in self.checks), 6)
        return out


@dataclass
class SweepTable:
    model: str
    quantity: str
    grid: list
    values: list
    per_point: list | None = None  # per_point[k] holds the values at grid[k]

    def __post_init__(self):
        self.grid = [float(x) for x in self.grid]
        self.values = [float(x) for x in self.values]
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ConfigError("sweep grid must be strictly increasing")
        if len(self.values) != len(self.grid):
            raise ConfigError(f"{len(self.values)} values for a grid of {len(self.grid)}")
        if self.per_point is not None and len(self.per_point) != len(self.grid):
            raise ConfigError("per-point breakdown does not match the grid")

    @property
    def point_count(self) -> int:
        return len(self.per_point[0]) if self.per_point else 0

    def as_dict(self, stable: bool = False) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "kind": "sweep_table",
            "tool_version": __version__,
            "model": self.model,
            "quantity": self.quantity,
            "t": self.grid,
            "values": _plain(self.values),
        }
        if self.per_point is not None:
            out["per_point"] = _plain(self.per_point)
        return out


def _plain(x):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if hasattr(x, "tolist"):
        return _plain(x.tolist())
    if isinstance(x, complex):
        return [_plain(x.real), _plain(x.imag)]
    if isinstance(x, float):
        return x if math.isfinite(x) else None
    return x


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def render(obj, fmt: str = "json", stable: bool = False) -> str:
    if fmt not in FORMATS:
        raise ConfigError(f"format must be one of {FORMATS}")
    if fmt == "json":
        return json.dumps(obj.as_dict(stable), indent=2, allow_nan=False) + "\n"
    if fmt == "csv":
        return _csv(obj, stable)
    return _text(obj, stable)


def _csv(obj, stable: bool) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if isinstance(obj, SweepTable):
        header = ["t", obj.quantity] + [f"point_{k}" for k in range(obj.point_count)]
        w.writerow(header)
        for k, (t, v) in enumerate(zip(obj.grid, obj.values)):
            extra = [_fmt(x) for x in obj.per_point[k]] if obj.per_point else []
            w.writerow([_fmt(t), _fmt(v)] + extra)
        return buf.getvalue()
    header = list(CHECK_FIELDS) + ([] if stable else ["seconds"])
    w.writerow(header)
    for c in sorted(obj.checks, key=lambda c: c.id):
        d = c.as_dict(stable)
        w.writerow([_fmt(d[k]) for k in header])
    return buf.getvalue()


def _text(obj, stable: bool) -> str:
    lines = []
    if isinstance(obj, SweepTable):
        lines.append(f"{obj.quantity} on {obj.model}")
        for t, v in zip(obj.grid, obj.values):
            lines.append(f"  t = {t:+.6g}  {v:.12g}")
        return "\n".join(lines) + "\n"
    for c in sorted(obj.checks, key=lambda c: c.id):
        res = "n/a" if c.residual is None else f"{c.residual:.3e}"
        line = f"[{c.status.upper():4s}] {c.id}: {res} {c.comparison} {c.tolerance:.1e}"
        if c.detail:
            line += f"  ({c.detail})"
        lines.append(line)
    n = obj.counts()
    lines.append(f"{obj.status.upper()}: {n['pass']} passed, {n['fail']} failed, {n['skipped']} skipped")
    return "\n".join(lines) + "\n"


def emit_report(obj, fmt: str = "json", destination=None, stable: bool = False) -> str:
    """Write a report or table to ``destination`` (path) or stdout; returns the text."""
    text = render(obj, fmt, stable)
    if destination is None or str(destination) == "-":
        sys.stdout.write(text)
        return text
    try:
        Path(destination).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ReportIOError(f"cannot write {destination}: {exc}") from exc
    return text


def exit_code(report: VerificationReport) -> int:
    return 1 if report.status == "fail" else 0
