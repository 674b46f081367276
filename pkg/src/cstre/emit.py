"""JSON and CSV serialization of results."""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Iterable, Sequence

from .separability import ThresholdReport


def fmt_number(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int,)):
        return str(v)
    return format(float(v) + 0.0, ".10g")


def _clean(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def to_json(obj) -> str:
    """Deterministic JSON text; non-finite floats become ``null``."""
    return json.dumps(_clean(obj), indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def to_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else fmt_number(v) for v in row])
    return buf.getvalue()


REPORT_CSV_HEADER = ("family", "n_qubits", "partition", "criterion", "kind", "q", "x_star", "converged")


def reports_json(reports: Sequence[ThresholdReport]) -> str:
    return to_json([r.to_dict() for r in reports])


def reports_csv(reports: Sequence[ThresholdReport]) -> str:
    """One ``sample`` row per (q, x*) pair and one ``summary`` row per report."""
    rows = []
    for r in reports:
        head = (r.family.value, r.n_qubits, r.partition.label, r.criterion.value)
        for q, x in r.samples:
            rows.append(head + ("sample", q, x, ""))
        rows.append(head + ("summary", r.q_at_convergence, r.x_star, r.converged))
    return to_csv(REPORT_CSV_HEADER, rows)
