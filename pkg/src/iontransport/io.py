"""CSV output with round-trip float formatting."""

from __future__ import annotations

import csv
import math
from pathlib import Path

__all__ = ["format_value", "write_csv"]


def format_value(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, int):
        return str(v)
    try:
        f = float(v)
    except (TypeError, ValueError):
        return str(v)
    if math.isnan(f):
        return "nan"
    return format(f, ".17g")


def write_csv(path, header, rows) -> Path:
    """Write ``rows`` under ``header``; every float gets 17 significant digits."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format_value(v) for v in row])
    return path
