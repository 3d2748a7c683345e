"""CSV ingestion, missing-value handling, and label encoding.

The entry path is load_csv -> handle_missing -> encode, producing an immutable
numeric Dataset plus the EncodingMap needed to decode category codes back to
the original strings.

CSV dialect: comma separated, double-quote escaping, UTF-8, first row is the
header. An empty cell or the literal string "NA" counts as missing.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError

MISSING_TOKENS = ("", "NA")

CATEGORICAL = "categorical"
NUMERIC = "numeric"


@dataclass(frozen=True)
class ColumnSchema:
    """Name, kind and position of one feature column."""

    name: str
    kind: str  # CATEGORICAL or NUMERIC
    index: int

    def __post_init__(self):
        if self.kind not in (CATEGORICAL, NUMERIC):
            raise DataError(f"unknown column kind {self.kind!r} for {self.name!r}")


@dataclass
class RawTable:
    """Header plus rows of optional text cells (None = missing)."""

    header: list[str]
    rows: list[list[str | None]]
    target_column: str

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_columns(self) -> int:
        return len(self.header)

    @property
    def target_index(self) -> int:
        return self.header.index(self.target_column)

    def column(self, j: int) -> list[str | None]:
        return [row[j] for row in self.rows]


@dataclass(frozen=True)
class EncodingMap:
    """Category -> code tables for every categorical column and the target.

    Codes are positions in the sorted list of distinct category strings, so
    they are dense (0..cardinality-1) and platform independent.
    """

    columns: dict[str, tuple[str, ...]]
    classes: tuple[str, ...]

    def encode_value(self, column: str, value: str) -> int:
        try:
            return self.columns[column].index(value)
        except ValueError:
            raise DataError(f"unseen category {value!r} in column {column!r}") from None

    def decode_value(self, column: str, code: int) -> str:
        return self.columns[column][code]

    def encode_class(self, name: str) -> int:
        try:
            return self.classes.index(name)
        except ValueError:
            raise DataError(f"unknown class {name!r}") from None

    def decode_class(self, code: int) -> str:
        return self.classes[code]

    def to_json_dict(self) -> dict:
        return {
            "columns": {name: list(cats) for name, cats in self.columns.items()},
            "classes": list(self.classes),
        }


@dataclass(frozen=True)
class Dataset:
    """Immutable numeric feature matrix with integer class codes.

    X is row-major (n rows, d features), y holds class codes in
    0..len(classes)-1, and schema describes the d feature columns.
    """

    X: np.ndarray
    y: np.ndarray
    schema: tuple[ColumnSchema, ...]
    classes: tuple[str, ...]

    def __post_init__(self):
        X = np.ascontiguousarray(np.asarray(self.X, dtype=float))
        y = np.asarray(self.y, dtype=np.int64)
        if X.ndim != 2:
            raise DataError("X must be a 2-d matrix")
        if y.ndim != 1 or y.shape[0] != X.shape[0]:
            raise DataError("y length must match the number of rows in X")
        if X.shape[1] != len(self.schema):
            raise DataError("schema length must match the number of feature columns")
        if not np.all(np.isfinite(X)):
            raise DataError("X contains missing or non-finite entries")
        if y.size and (y.min() < 0 or y.max() >= len(self.classes)):
            raise DataError("y contains codes outside 0..n_classes-1")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "schema", tuple(self.schema))
        object.__setattr__(self, "classes", tuple(self.classes))

    @property
    def n_rows(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    def feature_names(self) -> list[str]:
        return [c.name for c in self.schema]

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.y, minlength=self.n_classes)


def load_csv(path: str, target_column: str) -> RawTable:
    """Parse a CSV file into a RawTable with the target column identified.

    Raises DataError for a missing file, an absent target column, or a row
    whose cell count differs from the header (the message names the line).
    """
    try:
        fh = open(path, "r", encoding="utf-8-sig", newline="")
    except OSError as exc:
        raise DataError(f"cannot open {path!r}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path!r} is empty (no header row)") from None
        if target_column not in header:
            raise DataError(
                f"target column not found: {target_column!r} is not in the header"
            )
        rows: list[list[str | None]] = []
        for row in reader:
            if not row:
                continue  # skip blank lines
            if len(row) != len(header):
                raise DataError(
                    f"line {reader.line_num}: expected {len(header)} cells, "
                    f"got {len(row)}"
                )
            rows.append([None if cell in MISSING_TOKENS else cell for cell in row])
    return RawTable(header=header, rows=rows, target_column=target_column)


def _parse_number(cell: str) -> float | None:
    """Float value of a cell, or None when it is not a finite number."""
    try:
        value = float(cell)
    except ValueError:
        return None
    return value if math.isfinite(value) else None


def _column_is_numeric(values: list[str | None]) -> bool:
    present = [v for v in values if v is not None]
    return bool(present) and all(_parse_number(v) is not None for v in present)


def handle_missing(table: RawTable, policy: str = "fill_mean") -> RawTable:
    """Resolve missing cells by mean/mode imputation or row dropping.

    fill_mean replaces missing numeric cells with the mean of the present
    cells and missing categorical cells with the modal category (ties go to
    the lexicographically smallest). drop_rows removes any row containing a
    missing cell. Present cells are never altered.
    """
    if policy not in ("fill_mean", "drop_rows"):
        raise DataError(f"unknown missing-value policy {policy!r}")

    if policy == "drop_rows":
        kept = [row for row in table.rows if all(c is not None for c in row)]
        return RawTable(list(table.header), [list(r) for r in kept], table.target_column)

    fills: dict[int, str] = {}
    for j, name in enumerate(table.header):
        values = table.column(j)
        if all(v is not None for v in values):
            continue
        present = [v for v in values if v is not None]
        if not present:
            raise DataError(f"column {name!r} is entirely missing; cannot fill")
        if _column_is_numeric(values):
            mean = float(np.mean([_parse_number(v) for v in present]))
            fills[j] = repr(mean)
        else:
            counts: dict[str, int] = {}
            for v in present:
                counts[v] = counts.get(v, 0) + 1
            top = max(counts.values())
            fills[j] = min(v for v, c in counts.items() if c == top)

    rows = [
        [cell if cell is not None else fills[j] for j, cell in enumerate(row)]
        for row in table.rows
    ]
    return RawTable(list(table.header), rows, table.target_column)


def encode(
    table: RawTable,
    target_column: str | None = None,
    kind_overrides: dict[str, str] | None = None,
) -> tuple[Dataset, EncodingMap]:
    """Label-encode categorical columns and parse numeric ones.

    A column is treated as categorical when any present cell fails to parse
    as a finite real number; kind_overrides forces a column either way.
    Category codes follow sorted-unique order, and the target is encoded the
    same way. All cells must be present (run handle_missing first).

    Raises DataError when a column forced numeric contains an unparsable
    cell (naming the column and row), or when any cell is missing.
    """
    target_column = target_column or table.target_column
    if target_column not in table.header:
        raise DataError(f"target column not found: {target_column!r}")
    overrides = kind_overrides or {}
    for name in overrides:
        if name not in table.header:
            raise DataError(f"schema override names unknown column {name!r}")

    for i, row in enumerate(table.rows):
        for j, cell in enumerate(row):
            if cell is None:
                raise DataError(
                    f"column {table.header[j]!r}, row {i}: missing cell; "
                    "apply a missing-value policy before encoding"
                )

    target_idx = table.header.index(target_column)
    target_values = [str(v) for v in table.column(target_idx)]
    classes = tuple(sorted(set(target_values)))
    y = np.array([classes.index(v) for v in target_values], dtype=np.int64)

    schema: list[ColumnSchema] = []
    columns: list[np.ndarray] = []
    cat_maps: dict[str, tuple[str, ...]] = {}
    feature_idx = 0
    for j, name in enumerate(table.header):
        if j == target_idx:
            continue
        values = [str(v) for v in table.column(j)]
        kind = overrides.get(name)
        if kind is None:
            kind = NUMERIC if _column_is_numeric(values) else CATEGORICAL
        if kind == NUMERIC:
            parsed = np.empty(len(values), dtype=float)
            for i, cell in enumerate(values):
                num = _parse_number(cell)
                if num is None:
                    raise DataError(
                        f"column {name!r}, row {i}: cannot parse {cell!r} as a number"
                    )
                parsed[i] = num
            columns.append(parsed)
        elif kind == CATEGORICAL:
            cats = tuple(sorted(set(values)))
            cat_maps[name] = cats
            columns.append(np.array([cats.index(v) for v in values], dtype=float))
        else:
            raise DataError(f"schema override for {name!r} must be "
                            f"{CATEGORICAL!r} or {NUMERIC!r}, got {kind!r}")
        schema.append(ColumnSchema(name=name, kind=kind, index=feature_idx))
        feature_idx += 1

    n = len(table.rows)
    X = np.column_stack(columns) if columns else np.zeros((n, 0))
    dataset = Dataset(X=X, y=y, schema=tuple(schema), classes=classes)
    return dataset, EncodingMap(columns=cat_maps, classes=classes)
