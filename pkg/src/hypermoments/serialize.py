"""JSON / CSV formats.

Rationals are written as ``"num/den"`` strings next to a decimal rendering.
Floats go through :func:`json.dumps`, which writes the shortest repr and so
re-parses bit-exactly; NaN is written as ``null``.  Every JSON document
carries ``"schema": 1``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction
from typing import Sequence

import numpy as np

SCHEMA_VERSION = 1


def frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_frac(text: str) -> Fraction:
    return Fraction(text)


def decimal(x: Fraction) -> float:
    return float(x)


def moment_rows(m: Sequence[Fraction]) -> list[dict]:
    return [{"k": k, "exact": frac_str(v), "decimal": decimal(v)} for k, v in enumerate(m)]


def moments_document(m: Sequence[Fraction], meta: dict) -> dict:
    return {"schema": SCHEMA_VERSION, "kind": "moments", **meta, "moments": moment_rows(m)}


def rows_to_csv(rows: list[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({c: _csv_cell(row.get(c)) for c in columns})
    return buf.getvalue()


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return v


def read_moment_table(text: str) -> list[Fraction]:
    """Parse a moment table written as JSON or CSV back into exact rationals."""
    text = text.strip()
    if text.startswith("{"):
        doc = json.loads(text)
        if doc.get("schema") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema {doc.get('schema')!r}")
        rows = doc["moments"]
    else:
        rows = list(csv.DictReader(io.StringIO(text)))
    rows = sorted(rows, key=lambda r: int(r["k"]))
    if [int(r["k"]) for r in rows] != list(range(len(rows))):
        raise ValueError("moment table rows are not k = 0, 1, 2, ...")
    return [parse_frac(r["exact"]) for r in rows]


def float_list(a) -> list:
    return [None if (isinstance(x, float) and math.isnan(x)) else x for x in np.asarray(a, dtype=float).tolist()]


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=1, allow_nan=False) + "\n"


def simrun_document(run, reference: Sequence[Fraction] | None = None, include_trials: bool = True) -> dict:
    """JSON-ready dict for a :class:`~hypermoments.simulation.SimRun`."""
    cfg = run.config
    agg = {
        "mean": float_list(run.mean),
        "stderr": float_list(run.stderr),
        "correlators": None if run.correlators is None else [float_list(r) for r in run.correlators],
        "mean_edge_count": float(np.mean(run.edge_counts)),
    }
    if reference is not None:
        agg["limit"] = [frac_str(x) for x in reference]
        agg["z"] = [json_float(z_score(run.mean[k], run.stderr[k], reference[k])) for k in range(len(reference))]
    doc = {
        "schema": SCHEMA_VERSION,
        "kind": "simulation",
        "config": {
            "N": cfg.N, "q": cfg.q, "p": frac_str(cfg.p), "dist": cfg.dist.spec,
            "trials": cfg.trials, "k_max": cfg.k_max, "seed": cfg.seed, "method": cfg.method,
        },
        "aggregate": agg,
    }
    if include_trials:
        doc["trials"] = [float_list(row) for row in run.moments]
    return doc


def json_float(x):
    """Floats that JSON cannot carry become strings ``"inf"`` / ``"-inf"`` / ``None`` for NaN."""
    if x is None or math.isnan(x):
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def z_score(mean: float, se: float, target: Fraction) -> float | None:
    """``(mean - target) / se``; ``None`` when no standard error is available."""
    if se is None or math.isnan(se):
        return None
    diff = mean - float(target)
    if se == 0:
        return 0.0 if diff == 0 else math.copysign(math.inf, diff)
    return diff / se
