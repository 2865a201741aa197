"""Reading delimited tables and turning them into numeric datasets.

The flow is ``parse_table -> drop_missing -> encode -> split``.  Cells stay
as text until :func:`encode`, so the missing-value filter and the value
summaries see exactly what was in the file.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    DataError,
    EmptyDatasetError,
    EncodeError,
    LabelError,
    ParseError,
    SchemaError,
    StratificationError,
)

KINDS = ("categorical", "numeric", "label")
STRATEGIES = ("ordinal", "one_hot")
DEFAULT_MISSING = frozenset({""})


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    kind: str

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name:
            raise SchemaError("column names must be non-empty strings")
        if self.kind not in KINDS:
            raise SchemaError(f"column {self.name!r}: unknown kind {self.kind!r}, expected one of {KINDS}")


def validate_schema(schema: Sequence[ColumnSpec]) -> list[ColumnSpec]:
    schema = list(schema)
    names = [c.name for c in schema]
    dupes = sorted(n for n, c in Counter(names).items() if c > 1)
    if dupes:
        raise SchemaError(f"duplicate column names: {dupes}")
    labels = [c.name for c in schema if c.kind == "label"]
    if len(labels) != 1:
        raise SchemaError(f"schema must have exactly one label column, found {len(labels)}: {labels}")
    return schema


def label_column(schema: Sequence[ColumnSpec]) -> str:
    return next(c.name for c in schema if c.kind == "label")


def load_schema(path) -> list[ColumnSpec]:
    """Load a schema file: a JSON list of ``{"name": ..., "kind": ...}`` objects.

    A document of the form ``{"columns": [...]}`` is accepted too.
    """
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return schema_from_json(doc)


def schema_from_json(doc) -> list[ColumnSpec]:
    if isinstance(doc, dict):
        doc = doc.get("columns")
    if not isinstance(doc, list):
        raise SchemaError("schema must be a list of {name, kind} objects")
    try:
        return validate_schema(ColumnSpec(str(c["name"]), str(c["kind"])) for c in doc)
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed schema entry: {exc}") from None


@dataclass(frozen=True)
class RawTable:
    columns: tuple[ColumnSpec, ...]
    rows: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        width = len(self.columns)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise ParseError(f"row {i + 1} has {len(row)} cells, expected {width}")

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.columns]

    def column_index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown column {name!r}") from None

    def column(self, name: str) -> list[str]:
        j = self.column_index(name)
        return [row[j] for row in self.rows]

    def take(self, indices) -> "RawTable":
        return RawTable(self.columns, tuple(self.rows[i] for i in indices))


def parse_table(data: bytes, schema: Sequence[ColumnSpec], delimiter: str = ",") -> RawTable:
    """Parse delimited UTF-8 text whose header must match ``schema`` in order."""
    schema = validate_schema(schema)
    try:
        text = data.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise ParseError(f"input is not valid UTF-8: {exc}") from None
    reader = csv.reader(io.StringIO(text, newline=""), delimiter=delimiter)
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("input is empty, expected a header row") from None

    expected = [c.name for c in schema]
    for pos in range(max(len(header), len(expected))):
        got = header[pos] if pos < len(header) else None
        want = expected[pos] if pos < len(expected) else None
        if got != want:
            if got is None:
                raise SchemaError(f"header is missing column {want!r} at position {pos + 1}")
            raise SchemaError(f"header column {got!r} at position {pos + 1} does not match schema (expected {want!r})")

    rows = []
    try:
        for record in reader:
            if not record:
                continue
            if len(record) != len(expected):
                raise ParseError(
                    f"row {len(rows) + 1} (line {reader.line_num}) has {len(record)} cells, expected {len(expected)}"
                )
            rows.append(tuple(record))
    except csv.Error as exc:
        raise ParseError(f"line {reader.line_num}: {exc}") from None
    return RawTable(tuple(schema), tuple(rows))


def read_table(path, schema: Sequence[ColumnSpec], delimiter: str = ",") -> RawTable:
    return parse_table(Path(path).read_bytes(), schema, delimiter)


def drop_missing(table: RawTable, missing_tokens=DEFAULT_MISSING) -> RawTable:
    """Keep only rows in which no cell equals a missing token."""
    tokens = frozenset(missing_tokens)
    kept = tuple(row for row in table.rows if tokens.isdisjoint(row))
    if not kept:
        raise EmptyDatasetError("no rows left after removing rows with missing values")
    return RawTable(table.columns, kept)


@dataclass(frozen=True)
class Dataset:
    """Numeric feature matrix plus integer labels.

    ``X`` has shape (n, d), ``y`` holds class indices into ``class_names``.
    """

    X: np.ndarray
    y: np.ndarray
    feature_names: tuple[str, ...]
    class_names: tuple[str, ...]

    def __post_init__(self):
        X = np.array(self.X, dtype=np.float64)
        y = np.array(self.y, dtype=np.int64)
        if X.ndim != 2:
            raise DataError(f"X must be 2-D, got shape {X.shape}")
        n, d = X.shape
        if n < 1 or d < 1:
            raise DataError(f"dataset needs at least one row and one feature, got {X.shape}")
        if y.shape != (n,):
            raise DataError(f"y has shape {y.shape}, expected ({n},)")
        if len(self.feature_names) != d:
            raise DataError(f"{len(self.feature_names)} feature names for {d} columns")
        if not np.all(np.isfinite(X)):
            raise DataError("X contains non-finite values")
        k = len(self.class_names)
        if y.min() < 0 or y.max() >= k:
            raise DataError(f"labels must lie in 0..{k - 1}")
        X.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "class_names", tuple(self.class_names))

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    @property
    def k(self) -> int:
        return len(self.class_names)

    def take(self, rows) -> "Dataset":
        rows = np.asarray(rows, dtype=np.intp)
        return Dataset(self.X[rows], self.y[rows], self.feature_names, self.class_names)

    def with_features(self, X, feature_names) -> "Dataset":
        return Dataset(X, self.y, feature_names, self.class_names)


@dataclass(frozen=True)
class EncodingMap:
    """Per-column coding used by :func:`encode`.

    ``categories[col]`` lists the sorted category strings of a categorical
    column; the code of a category is its position in that list.  Numeric
    columns appear in ``numeric`` and pass through unchanged.
    """

    strategy: str
    categories: dict = field(default_factory=dict)
    numeric: tuple = ()
    label: str = ""
    classes: tuple = ()

    def code(self, column: str, value: str) -> int:
        return self.categories[column].index(value)

    def value(self, column: str, code: int) -> str:
        return self.categories[column][int(code)]

    def to_json(self) -> dict:
        return {
            "strategy": self.strategy,
            "categories": {k: list(v) for k, v in self.categories.items()},
            "numeric": list(self.numeric),
            "label": self.label,
            "classes": list(self.classes),
        }


def _parse_real(cell: str, row: int, column: str) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise EncodeError(f"row {row}, column {column!r}: cannot parse {cell!r} as a real number") from None
    if not math.isfinite(value):
        raise EncodeError(f"row {row}, column {column!r}: non-finite value {cell!r}")
    return value


def encode(table: RawTable, schema: Sequence[ColumnSpec] | None = None, strategy: str = "ordinal"):
    """Encode a text table into a :class:`Dataset`.

    Categories are coded in lexicographic order of their strings.  With
    ``strategy="one_hot"`` a categorical column with c categories becomes c
    indicator columns named ``col=value``.

    Returns
    -------
    (Dataset, EncodingMap)
    """
    if strategy not in STRATEGIES:
        raise EncodeError(f"unknown encoding strategy {strategy!r}")
    schema = validate_schema(schema if schema is not None else table.columns)
    if [c.name for c in schema] != table.names:
        raise SchemaError("schema does not match the table's columns")
    if table.n_rows < 1:
        raise EmptyDatasetError("cannot encode an empty table")

    blocks, names, categories, numeric = [], [], {}, []
    y = None
    classes = ()
    label = ""
    for j, spec in enumerate(schema):
        cells = [row[j] for row in table.rows]
        if spec.kind == "label":
            classes = tuple(sorted(set(cells)))
            if len(classes) < 2:
                raise LabelError(f"label column {spec.name!r} has a single distinct value {classes}")
            lookup = {c: i for i, c in enumerate(classes)}
            y = np.array([lookup[c] for c in cells], dtype=np.int64)
            label = spec.name
        elif spec.kind == "numeric":
            col = [_parse_real(c, i + 1, spec.name) for i, c in enumerate(cells)]
            blocks.append(np.array(col, dtype=np.float64)[:, None])
            names.append(spec.name)
            numeric.append(spec.name)
        else:
            cats = tuple(sorted(set(cells)))
            categories[spec.name] = cats
            lookup = {c: i for i, c in enumerate(cats)}
            codes = np.array([lookup[c] for c in cells], dtype=np.int64)
            if strategy == "ordinal":
                blocks.append(codes.astype(np.float64)[:, None])
                names.append(spec.name)
            else:
                blocks.append((codes[:, None] == np.arange(len(cats))[None, :]).astype(np.float64))
                names.extend(f"{spec.name}={c}" for c in cats)

    if not blocks:
        raise SchemaError("schema has no feature columns")
    emap = EncodingMap(strategy, categories, tuple(numeric), label, classes)
    return Dataset(np.hstack(blocks), y, tuple(names), classes), emap


def decode(data: Dataset, emap: EncodingMap) -> list[dict]:
    """Invert an ordinal encoding back to per-row ``{column: text}`` records.

    Numeric columns come back as ``repr`` of the stored float; the label is
    restored under its original column name.
    """
    if emap.strategy != "ordinal":
        raise EncodeError("decode is only defined for the ordinal strategy")
    records = []
    for i in range(data.n):
        rec = {}
        for j, name in enumerate(data.feature_names):
            v = data.X[i, j]
            rec[name] = emap.value(name, v) if name in emap.categories else repr(float(v))
        rec[emap.label] = emap.classes[data.y[i]]
        records.append(rec)
    return records


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def split_indices(y, test_fraction: float, seed: int, stratified: bool = True):
    """Return sorted (train_idx, test_idx) index arrays."""
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    y = np.asarray(y)
    n = y.shape[0]
    rng = np.random.default_rng(seed)
    if stratified:
        test = []
        for cls in np.unique(y):
            members = np.flatnonzero(y == cls)
            if members.size < 2:
                raise StratificationError(f"class {cls} has {members.size} member(s); stratification needs at least 2")
            n_test = min(max(_round_half_up(test_fraction * members.size), 1), members.size - 1)
            test.append(rng.permutation(members)[:n_test])
        test = np.concatenate(test)
    else:
        n_test = _round_half_up(test_fraction * n)
        if n_test < 1 or n_test > n - 1:
            raise EmptyDatasetError(f"a test fraction of {test_fraction} on {n} rows leaves an empty part")
        test = rng.permutation(n)[:n_test]
    mask = np.zeros(n, dtype=bool)
    mask[test] = True
    return np.flatnonzero(~mask), np.flatnonzero(mask)


def split(data: Dataset, test_fraction: float = 0.3, seed: int = 42, stratified: bool = True):
    train_idx, test_idx = split_indices(data.y, test_fraction, seed, stratified)
    return data.take(train_idx), data.take(test_idx)


def summarize(table: RawTable, column: str) -> list[tuple[str, int]]:
    """Value counts of ``column``, most frequent first (ties by value)."""
    counts = Counter(table.column(column))
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))


def write_counts_csv(path, counts) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["value", "count"])
        w.writerows(counts)
