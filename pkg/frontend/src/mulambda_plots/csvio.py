"""Schema-checked readers for the harness CSV outputs.

The plot layer consumes files only; every number it draws comes verbatim
from these rows (values are kept as the original strings alongside their
parsed floats).
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

TRACE_SUMMARY_COLUMNS = ["fitness", "median_rate", "p95_rate"]
TRACE_SUMMARY_OPTIONAL = ["overlay_rate"]
SUMMARY_COLUMNS = ["algorithm", "function", "n", "k", "trials", "success_count",
                   "median", "q1", "q3", "p95", "normalized_median"]


class SchemaError(ValueError):
    """Input file does not carry the expected column schema."""


@dataclass(frozen=True)
class TraceSummaryRow:
    fitness: float
    median_rate: float
    p95_rate: float
    overlay_rate: float | None
    raw: dict


@dataclass(frozen=True)
class SummaryRow:
    algorithm: str
    k: float
    median: float
    q1: float
    q3: float
    trials: int
    success_count: int
    normalized_median: float
    raw: dict


def _read_rows(path: str | Path, required: list[str], optional: list[str]
               ) -> tuple[list[dict], list[str]]:
    path = Path(path)
    with path.open(newline="") as handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames or []
        missing = [c for c in required if c not in header]
        if missing:
            raise SchemaError(
                f"{path}: missing columns {missing}; expected "
                f"{required + ['?' + c for c in optional]}, found {header}")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows, header


def read_trace_summary(path: str | Path) -> tuple[list[TraceSummaryRow], bool]:
    """Rows plus a flag telling whether an overlay column is present."""
    rows, header = _read_rows(path, TRACE_SUMMARY_COLUMNS, TRACE_SUMMARY_OPTIONAL)
    has_overlay = "overlay_rate" in header
    out = []
    for raw in rows:
        overlay = None
        if has_overlay and raw["overlay_rate"] not in ("", None):
            overlay = float(raw["overlay_rate"])
        out.append(TraceSummaryRow(
            fitness=float(raw["fitness"]),
            median_rate=float(raw["median_rate"]),
            p95_rate=float(raw["p95_rate"]),
            overlay_rate=overlay,
            raw=dict(raw)))
    out.sort(key=lambda r: r.fitness)
    return out, has_overlay and any(r.overlay_rate is not None for r in out)


def read_summary(path: str | Path) -> list[SummaryRow]:
    rows, _ = _read_rows(path, SUMMARY_COLUMNS, [])
    out = []
    for raw in rows:
        out.append(SummaryRow(
            algorithm=raw["algorithm"],
            k=float(raw["k"]),
            median=float(raw["median"]),
            q1=float(raw["q1"]),
            q3=float(raw["q3"]),
            trials=int(raw["trials"]),
            success_count=int(raw["success_count"]),
            normalized_median=float(raw["normalized_median"]),
            raw=dict(raw)))
    out.sort(key=lambda r: (r.algorithm, r.k))
    return out
