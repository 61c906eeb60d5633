"""Report rows, CSV/JSON emission and exponent fitting."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

BASE_COLUMNS = ("p", "nu", "h", "s", "count", "reference", "ratio", "ms")


@dataclass(frozen=True)
class ReportRow:
    """One instance. Integer fields may be ``None`` when the target has no such parameter.

    ``reference`` is an exact rational; ``extra`` holds target-specific
    JSON scalars in a fixed key order.
    """

    p: int | None
    nu: int | None
    h: int | None
    s: int | None
    count: int
    reference: Fraction
    ms: float | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.count < 0:
            raise ValueError("count must be >= 0")
        object.__setattr__(self, "reference", Fraction(self.reference))

    @property
    def ratio(self) -> float:
        if self.reference == 0:
            return math.inf if self.count else 0.0
        return float(Fraction(self.count) / self.reference)

    @property
    def sort_key(self) -> tuple:
        return tuple(-1 if v is None else v for v in (self.p, self.nu, self.h, self.s))

    def field_value(self, name: str):
        if name in BASE_COLUMNS:
            return getattr(self, name)
        return self.extra[name]


def _columns(rows: Sequence[ReportRow]) -> list[str]:
    cols = list(BASE_COLUMNS)
    for r in rows:
        for k in r.extra:
            if k not in cols:
                cols.append(k)
    return cols


def _opt(v) -> str:
    return "" if v is None else str(v)


def _row_strings(row: ReportRow, cols: Sequence[str]) -> dict[str, str]:
    out = {
        "p": _opt(row.p),
        "nu": _opt(row.nu),
        "h": _opt(row.h),
        "s": _opt(row.s),
        "count": str(row.count),
        "reference": str(row.reference),
        "ratio": repr(row.ratio),
        "ms": "" if row.ms is None else repr(row.ms),
    }
    for c in cols[len(BASE_COLUMNS):]:
        out[c] = json.dumps(row.extra[c]) if c in row.extra else ""
    return out


def to_csv(rows: Sequence[ReportRow]) -> str:
    cols = _columns(rows)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(_row_strings(r, cols))
    return buf.getvalue()


def to_json(rows: Sequence[ReportRow]) -> str:
    objs = []
    for r in rows:
        objs.append({
            "p": r.p,
            "nu": r.nu,
            "h": r.h,
            "s": r.s,
            "count": str(r.count),
            "reference": str(r.reference),
            "ratio": r.ratio,
            "ms": r.ms,
            **r.extra,
        })
    return json.dumps(objs, indent=1) + "\n"


def emit(rows: Sequence[ReportRow], fmt: str, path) -> None:
    if fmt == "csv":
        text = to_csv(rows)
    elif fmt == "json":
        text = to_json(rows)
    else:
        raise ValueError("format must be csv or json")
    Path(path).write_text(text)


def _int_or_none(v: str):
    return None if v == "" else int(v)


def parse_csv(text: str) -> list[ReportRow]:
    rows = []
    for d in csv.DictReader(io.StringIO(text)):
        extra = {k: json.loads(v) for k, v in d.items() if k not in BASE_COLUMNS and v != ""}
        rows.append(ReportRow(
            p=_int_or_none(d["p"]),
            nu=_int_or_none(d["nu"]),
            h=_int_or_none(d["h"]),
            s=_int_or_none(d["s"]),
            count=int(d["count"]),
            reference=Fraction(d["reference"]),
            ms=None if d["ms"] == "" else float(d["ms"]),
            extra=extra,
        ))
    return rows


def parse_json(text: str) -> list[ReportRow]:
    rows = []
    for d in json.loads(text):
        extra = {k: v for k, v in d.items() if k not in BASE_COLUMNS}
        rows.append(ReportRow(d["p"], d["nu"], d["h"], d["s"], int(d["count"]), Fraction(d["reference"]), d["ms"], extra))
    return rows


def load(path) -> list[ReportRow]:
    path = Path(path)
    text = path.read_text()
    return parse_json(text) if path.suffix == ".json" else parse_csv(text)


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    residual: float
    n: int


def fit_exponent(rows: Iterable, x_field: str, y_field: str) -> ExponentFit:
    """Least-squares slope of ``ln y`` against ``ln x``; ``residual`` is the RMS error."""
    xs, ys = [], []
    for r in rows:
        x = r.field_value(x_field) if isinstance(r, ReportRow) else r[x_field]
        y = r.field_value(y_field) if isinstance(r, ReportRow) else r[y_field]
        x, y = float(x), float(y)
        if x <= 0 or y <= 0:
            raise ValueError(f"fields must be positive, got x={x}, y={y}")
        xs.append(math.log(x))
        ys.append(math.log(y))
    if len(xs) < 3:
        raise ValueError("need at least 3 rows")
    lx = np.array(xs)
    if np.ptp(lx) == 0:
        raise ValueError("all x values coincide")
    slope, intercept = np.polyfit(lx, np.array(ys), 1)
    resid = np.array(ys) - (slope * lx + intercept)
    return ExponentFit(float(slope), float(intercept), float(np.sqrt(np.mean(resid**2))), len(xs))


def max_over_s(rows: Iterable[ReportRow]) -> list[ReportRow]:
    """Keep, per ``(p, nu, h)``, the row with the largest count (first ``s`` on ties)."""
    best: dict[tuple, ReportRow] = {}
    for r in sorted(rows, key=lambda r: r.sort_key):
        key = (r.p, r.nu, r.h)
        if key not in best or r.count > best[key].count:
            best[key] = r
    return [best[k] for k in sorted(best, key=lambda k: tuple(-1 if v is None else v for v in k))]
