"""Deterministic CSV emission shared by report types and the CLI.

Numbers are written with 17 significant digits ('%.17g'), which
round-trips IEEE doubles exactly, so a fixed input always produces a
byte-identical file: comma separators, '.' decimal point, LF line
endings, one mandatory header row, optional '# ' metadata lines above
it.
"""

from __future__ import annotations

import numpy as np

__all__ = ["format_csv", "format_number", "parse_csv"]


def format_number(x: float) -> str:
    return "%.17g" % float(x)


def format_csv(names, columns, metadata=()) -> str:
    """Render named columns (equal-length 1-D arrays) as CSV text."""
    cols = [np.asarray(c) for c in columns]
    if len(cols) != len(names) or not cols:
        raise ValueError("need one name per column")
    n = len(cols[0])
    if any(len(c) != n for c in cols):
        raise ValueError("columns must share a length")
    lines = [f"# {m}" for m in metadata]
    lines.append(",".join(names))
    for k in range(n):
        lines.append(",".join(format_number(c[k]) for c in cols))
    return "\n".join(lines) + "\n"


def parse_csv(text: str):
    """Inverse of format_csv: (metadata, names, column arrays)."""
    metadata, names, rows = [], None, []
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            metadata.append(line.lstrip("#").strip())
            continue
        if names is None:
            names = line.split(",")
            continue
        rows.append([float(v) for v in line.split(",")])
    if names is None:
        raise ValueError("CSV has no header row")
    data = np.array(rows, dtype=float) if rows else np.empty((0, len(names)))
    if rows and data.shape[1] != len(names):
        raise ValueError("CSV row width does not match header")
    return metadata, names, [data[:, j] for j in range(len(names))]
