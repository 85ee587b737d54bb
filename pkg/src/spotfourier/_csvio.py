"""Shared CSV helpers: locale-independent, full round-trip precision."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Sequence


def fmt(value) -> str:
    """Shortest decimal string that round-trips the float exactly."""
    return repr(float(value))


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # newline='' defers line-ending handling to csv; '\n' keeps output
    # byte-identical across platforms
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def read_rows(path, expected_columns: int, header: Sequence[str] | None = None):
    """Yield (line_number, fields) for each non-empty row, validating width."""
    path = Path(path)
    with open(path, "r", newline="") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if not row or all(not field.strip() for field in row):
                continue
            if header is not None and lineno == 1:
                if [f.strip() for f in row] != list(header):
                    raise ValueError(
                        f"{path}: line 1: expected header {','.join(header)!r}, "
                        f"got {','.join(row)!r}"
                    )
                continue
            if len(row) < expected_columns:
                raise ValueError(
                    f"{path}: line {lineno}: expected {expected_columns} columns, "
                    f"got {len(row)}"
                )
            yield lineno, row
