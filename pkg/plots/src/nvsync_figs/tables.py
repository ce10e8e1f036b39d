"""Reader for the simulator CLI's delimited output files.

The files are plain CSV with a leading ``#`` metadata block, then a column
name row, a unit row, and data rows.  Cells are kept as the strings that
were written; conversion happens on demand so that optional integer columns
(empty cells on searched operating points) stay distinguishable from zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class SchemaError(Exception):
    """An input file does not match the layout a figure kind expects."""


@dataclass(frozen=True)
class Table:
    """One parsed output file: metadata block, column names, units, rows."""

    metadata: dict[str, str]
    columns: tuple[str, ...]
    units: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> tuple[str, ...]:
        """Raw string cells of one column, exactly as written."""
        try:
            i = self.columns.index(name)
        except ValueError:
            raise SchemaError(f"no column {name!r}") from None
        return tuple(row[i] for row in self.rows)

    def floats(self, name: str) -> np.ndarray:
        cells = self.column(name)
        try:
            return np.array([float(c) for c in cells], dtype=float)
        except ValueError:
            raise SchemaError(f"column {name!r} is not numeric") from None

    def flags(self, name: str) -> np.ndarray:
        """A 0/1 column as a boolean array."""
        cells = self.column(name)
        bad = sorted({c for c in cells} - {"0", "1"})
        if bad:
            raise SchemaError(f"column {name!r} is not a 0/1 flag (found {bad[0]!r})")
        return np.array([c == "1" for c in cells], dtype=bool)


def read_table(path) -> Table:
    with open(path, newline="") as fh:
        lines = [line.rstrip("\n") for line in fh]

    metadata: dict[str, str] = {}
    body = 0
    for line in lines:
        if not line.startswith("#"):
            break
        body += 1
        text = line.lstrip("#").strip()
        if ": " in text:
            key, value = text.split(": ", 1)
            metadata[key] = value
        elif text:
            metadata.setdefault("generator", text)

    data = [line for line in lines[body:] if line]
    if len(data) < 2:
        raise SchemaError(f"{path}: missing header or unit row")
    columns = tuple(data[0].split(","))
    units = tuple(data[1].split(","))
    if len(units) != len(columns):
        raise SchemaError(f"{path}: unit row has {len(units)} cells for {len(columns)} columns")

    rows = []
    for k, line in enumerate(data[2:], start=3):
        cells = tuple(line.split(","))
        if len(cells) != len(columns):
            raise SchemaError(f"{path}: row {k} has {len(cells)} cells for {len(columns)} columns")
        rows.append(cells)
    return Table(metadata, columns, units, tuple(rows))


def require_columns(table: Table, names, source) -> None:
    missing = [n for n in names if n not in table.columns]
    if missing:
        raise SchemaError(f"{source}: missing column(s) {', '.join(missing)}")
