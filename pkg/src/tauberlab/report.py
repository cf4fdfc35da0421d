"""Bound-report rows and their CSV/JSON serialization.

A row pairs one inequality evaluation with its exact counterpart.  One-sided
bounds leave the missing side as None.  Floats are printed with 12
significant digits so regression diffs are meaningful; writers emit rows in
the order given, which callers keep deterministic.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path

CSV_COLUMNS = ["quantity", "lambda", "epsilon", "x", "lower", "upper",
               "exact", "margin", "paper_eq"]


def fmt12(value) -> str:
    if value is None:
        return ""
    return f"{float(value):.12g}"


@dataclass(frozen=True)
class BoundRow:
    quantity: str
    lam: float | None
    epsilon: float | None
    x: tuple | None
    lower: float | None
    upper: float | None
    exact: float
    margin: float
    eq_tag: str = ""

    def contains_exact(self, slack: float = 0.0) -> bool:
        pad = self.margin + slack
        if self.lower is not None and self.exact < self.lower - pad:
            return False
        if self.upper is not None and self.exact > self.upper + pad:
            return False
        return True

    def violation(self) -> float:
        """How far the exact value escapes the bounds (<= 0 when contained)."""
        worst = -float("inf")
        if self.lower is not None:
            worst = max(worst, self.lower - self.exact)
        if self.upper is not None:
            worst = max(worst, self.exact - self.upper)
        return worst if worst != -float("inf") else 0.0

    def as_record(self) -> dict:
        return {
            "quantity": self.quantity,
            "lambda": self.lam,
            "epsilon": self.epsilon,
            "x": list(self.x) if self.x is not None else None,
            "lower": self.lower,
            "upper": self.upper,
            "exact": self.exact,
            "margin": self.margin,
            "paper_eq": self.eq_tag,
        }


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow([
            r.quantity,
            fmt12(r.lam),
            fmt12(r.epsilon),
            ";".join(fmt12(c) for c in r.x) if r.x is not None else "",
            fmt12(r.lower),
            fmt12(r.upper),
            fmt12(r.exact),
            fmt12(r.margin),
            r.eq_tag,
        ])
    return buf.getvalue()


def write_csv(rows, path) -> None:
    Path(path).write_text(rows_to_csv(rows))


def write_json(rows, path, meta: dict | None = None) -> None:
    payload = {"meta": meta or {}, "rows": [r.as_record() for r in rows]}
    Path(path).write_text(json.dumps(payload, indent=1, sort_keys=True))
