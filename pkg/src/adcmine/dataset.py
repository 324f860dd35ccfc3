"""CSV ingestion with column type inference and typed columnar storage.

A column is numeric iff every non-null cell parses as a finite decimal
number; otherwise it is a string column.  Cells equal to the configured
null token become a distinguished null that never satisfies any
predicate.  Numeric columns are stored as float64 with NaN for null;
string columns are stored as int32 codes into a table shared by all
string columns (so cross-column equality compares consistently), with
-1 for null.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np


class DataError(Exception):
    """Unreadable or malformed input data."""


class ColumnKind(Enum):
    STRING = "string"
    NUMERIC = "numeric"


@dataclass(frozen=True)
class Column:
    name: str
    kind: ColumnKind
    values: np.ndarray  # float64 (NaN null) or int32 codes (-1 null)

    @property
    def null_mask(self) -> np.ndarray:
        if self.kind is ColumnKind.NUMERIC:
            return np.isnan(self.values)
        return self.values < 0


class Dataset:
    """An immutable typed relation with stable 0-based row ids."""

    def __init__(self, columns: list[Column], strings: list[str], n_rows: int):
        self.columns = columns
        self.strings = strings  # code -> string, shared by all string columns
        self.n_rows = n_rows

    @property
    def n_columns(self) -> int:
        return len(self.columns)

    @property
    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]

    def cell(self, row: int, col: int):
        """Python-level cell value: str, float, or None for null."""
        c = self.columns[col]
        v = c.values[row]
        if c.kind is ColumnKind.NUMERIC:
            return None if math.isnan(v) else float(v)
        return None if v < 0 else self.strings[v]

    def row(self, i: int) -> tuple:
        return tuple(self.cell(i, j) for j in range(self.n_columns))

    def distinct_nonnull(self, col: int) -> set:
        """Distinct non-null values (floats or string codes)."""
        c = self.columns[col]
        vals = c.values[~c.null_mask]
        return set(vals.tolist())

    def take_rows(self, rows: np.ndarray) -> "Dataset":
        """Row subset preserving order; string table is shared."""
        cols = [Column(c.name, c.kind, c.values[rows]) for c in self.columns]
        return Dataset(cols, self.strings, len(rows))

    def to_csv(self, path, null_token: str = "") -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(self.column_names)
            for i in range(self.n_rows):
                w.writerow([_render_cell(v, null_token) for v in self.row(i)])

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        if self.column_names != other.column_names or self.n_rows != other.n_rows:
            return False
        if [c.kind for c in self.columns] != [c.kind for c in other.columns]:
            return False
        return all(
            self.row(i) == other.row(i) for i in range(self.n_rows)
        )


def _render_cell(v, null_token: str) -> str:
    if v is None:
        return null_token
    if isinstance(v, float):
        return str(int(v)) if v.is_integer() and abs(v) < 1e15 else repr(v)
    return v


def _parse_numeric(cell: str):
    """Finite decimal or None; inf/nan spellings do not count."""
    try:
        v = float(cell)
    except ValueError:
        return None
    return v if math.isfinite(v) else None


def from_cells(names: list[str], cells: list[list[str]], null_token: str = "") -> Dataset:
    """Build a Dataset from raw text cells, inferring column types."""
    n_rows = len(cells)
    for i, row in enumerate(cells):
        if len(row) != len(names):
            raise DataError(
                f"row {i}: expected {len(names)} cells, got {len(row)}"
            )
    columns = []
    strings: list[str] = []
    codes: dict[str, int] = {}
    for j, name in enumerate(names):
        raw = [cells[i][j] for i in range(n_rows)]
        nulls = [c == null_token for c in raw]
        parsed = [None if isnull else _parse_numeric(c) for c, isnull in zip(raw, nulls)]
        if all(p is not None or isnull for p, isnull in zip(parsed, nulls)):
            vals = np.array(
                [math.nan if p is None else p for p in parsed], dtype=np.float64
            )
            columns.append(Column(name, ColumnKind.NUMERIC, vals))
        else:
            enc = np.empty(n_rows, dtype=np.int32)
            for i, (c, isnull) in enumerate(zip(raw, nulls)):
                if isnull:
                    enc[i] = -1
                else:
                    code = codes.get(c)
                    if code is None:
                        code = codes[c] = len(strings)
                        strings.append(c)
                    enc[i] = code
            columns.append(Column(name, ColumnKind.STRING, enc))
    return Dataset(columns, strings, n_rows)


def load_csv(path, has_header: bool = True, null_token: str = "") -> Dataset:
    """Load an RFC-4180 CSV file into a typed Dataset."""
    try:
        with open(path, "r", newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if has_header:
        if not rows:
            raise DataError(f"{path}: empty file, expected a header row")
        names, body = rows[0], rows[1:]
    else:
        body = rows
        width = len(rows[0]) if rows else 0
        names = [f"c{j}" for j in range(width)]
    return from_cells(names, body, null_token)
