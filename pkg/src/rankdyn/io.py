"""Deterministic CSV and JSON writers for panels, rank vectors and results.

Floats are written with ``repr`` so that values round-trip exactly and reruns
produce identical bytes.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .panel import Panel

__all__ = ["fmt", "write_json", "write_panel_csv", "write_rank_csv", "write_table_csv"]


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (str, int, np.integer)) and not isinstance(x, bool):
        return str(x)
    v = float(x)
    if math.isnan(v):
        return ""
    return repr(v)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def write_json(path: Path, obj) -> None:
    text = json.dumps(_jsonable(obj), sort_keys=True, indent=2)
    Path(path).write_text(text + "\n", encoding="utf-8")


def write_table_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def write_panel_csv(path: Path, p: Panel, values: Optional[np.ndarray] = None) -> None:
    """Wide CSV readable by ``load_panel``: a period column then one column per entity."""
    v = np.asarray(p.values if values is None else values)
    write_table_csv(path, ["period", *p.entities], ([t, *row] for t, row in zip(p.times, v)))


def write_rank_csv(path: Path, columns: dict) -> None:
    """One row per rank; ``columns`` maps header to a vector (or None for blanks).

    Vectors may differ in length (N for alpha, N-1 for gaps); short ones are
    padded with blanks.
    """
    n = max(len(v) for v in columns.values() if v is not None)
    cols = {k: (None if v is None else np.asarray(v, dtype=float)) for k, v in columns.items()}
    rows = []
    for i in range(n):
        row = [i + 1]
        for v in cols.values():
            row.append(v[i] if v is not None and i < len(v) else None)
        rows.append(row)
    write_table_csv(path, ["rank", *cols.keys()], rows)
