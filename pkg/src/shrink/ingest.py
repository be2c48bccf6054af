"""Loading series from CSV / UCR-style TSV files with precision detection.

The parser records the maximum number of decimal places seen in the text,
which later feeds exact-recovery mode.  Non-numeric cells fail loudly with
their row numbers; silent NaN coercion is exactly what we do not want.
"""

from __future__ import annotations

import csv
import re
from pathlib import Path

import numpy as np

from .datasets import make
from .model import TimeSeries

__all__ = ["ingest", "parse_synth_spec"]

_NUMBER = re.compile(r"^[+-]?(\d+)(\.(\d*))?([eE][+-]?\d+)?$")


def _decimals_of(text: str) -> int:
    m = _NUMBER.match(text)
    if m is None:
        raise ValueError(f"not a plain number: {text!r}")
    frac = m.group(3) or ""
    exp = int(m.group(4)[1:]) if m.group(4) else 0
    return max(0, len(frac) - exp)


def ingest(path: str | Path, format: str = "csv", column: int = 0, name: str | None = None) -> TimeSeries:
    """Parse one numeric column (csv) or one row-series (ucr-tsv) from a file.

    csv:      one sample per row, `column` selects the field.
    ucr-tsv:  one whole series per row (tab/space separated, UCR layout);
              `column` selects the row, and a leading class label column,
              when integer-valued, is kept as data -- slicing is the
              caller's business.
    """
    path = Path(path)
    if format not in ("csv", "ucr-tsv"):
        raise ValueError(f"unknown format {format!r}; use 'csv' or 'ucr-tsv'")

    cells: list[tuple[int, str]] = []
    if format == "csv":
        with path.open(newline="") as fh:
            for row_no, row in enumerate(csv.reader(fh), start=1):
                if not row or all(not c.strip() for c in row):
                    continue
                if column >= len(row):
                    raise ValueError(f"row {row_no}: no column {column} (row has {len(row)})")
                cell = row[column].strip()
                if row_no == 1 and not _NUMBER.match(cell):
                    continue  # header line
                cells.append((row_no, cell))
    else:
        with path.open() as fh:
            rows = [line for line in fh if line.strip()]
        if column >= len(rows):
            raise ValueError(f"file has {len(rows)} series rows, no row {column}")
        for field_no, cell in enumerate(rows[column].replace(",", "\t").split(), start=1):
            cells.append((field_no, cell.strip()))

    if not cells:
        raise ValueError(f"{path}: no numeric data found")

    values = np.empty(len(cells), dtype=np.float64)
    decimals = 0
    for i, (row_no, cell) in enumerate(cells):
        if not _NUMBER.match(cell):
            raise ValueError(f"{path}: non-numeric cell {cell!r} at row {row_no}")
        values[i] = float(cell)
        decimals = max(decimals, _decimals_of(cell))

    series_name = name if name is not None else path.stem
    return TimeSeries(values=values, name=series_name, decimals=decimals)


def parse_synth_spec(spec: str) -> TimeSeries:
    """Build a synthetic series from a 'synth:NAME[:key=value...]' spec string."""
    parts = spec.split(":")
    if parts[0] != "synth" or len(parts) < 2:
        raise ValueError(f"bad synthetic spec {spec!r}; expected synth:NAME[:key=value...]")
    kwargs = {}
    for part in parts[2:]:
        if "=" not in part:
            raise ValueError(f"bad key=value in spec: {part!r}")
        key, value = part.split("=", 1)
        try:
            kwargs[key] = int(value)
        except ValueError:
            try:
                kwargs[key] = float(value)
            except ValueError:
                kwargs[key] = value
    return make(parts[1], **kwargs)


def load_input(spec: str | Path, format: str = "csv", column: int = 0) -> TimeSeries:
    """Dispatch between file paths and synth: specs (the CLI entry path)."""
    if isinstance(spec, str) and spec.startswith("synth:"):
        return parse_synth_spec(spec)
    return ingest(spec, format=format, column=column)
