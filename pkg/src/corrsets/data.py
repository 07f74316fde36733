"""CSV ingestion, categorical encoding, and equal-frequency discretization.

Raw tables hold text tokens; encoding maps each column to dense integer
codes in first-occurrence order and records the observed domain size and
marginal entropy per attribute. Domain sizes are always observed
distinct-value counts, never declared schemas, because every downstream
correction term is a function of the empirical table.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .estimators import entropy

__all__ = [
    "DataError",
    "ParseError",
    "RawTable",
    "Attribute",
    "EncodedDataset",
    "parse_csv",
    "discretize_equal_frequency",
    "encode",
]


class DataError(ValueError):
    """Input data cannot be parsed or encoded."""


class ParseError(DataError):
    """Malformed CSV input."""


@dataclass(frozen=True)
class RawTable:
    """Column-major text table. ``rejected_rows`` counts rows dropped for
    containing empty fields (missing values are not imputed)."""

    column_names: tuple[str, ...]
    columns: tuple[tuple[str, ...], ...]
    row_count: int
    rejected_rows: int = 0


@dataclass(frozen=True, eq=False)
class Attribute:
    """One encoded column: dense codes in [0, domain_size) plus its
    observed domain size and plug-in entropy in bits."""

    name: str
    codes: np.ndarray
    domain_size: int
    entropy: float


@dataclass(frozen=True, eq=False)
class EncodedDataset:
    attributes: tuple[Attribute, ...]
    n: int

    @property
    def d(self) -> int:
        return len(self.attributes)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.attributes)

    def index_of(self, name: str) -> int:
        for i, a in enumerate(self.attributes):
            if a.name == name:
                return i
        raise DataError(
            f"unknown attribute {name!r}; available: {', '.join(self.names)}"
        )

    def drop_constant(self) -> "EncodedDataset":
        """Remove attributes with a single observed value (entropy 0)."""
        kept = tuple(a for a in self.attributes if a.domain_size > 1)
        return EncodedDataset(attributes=kept, n=self.n)

    @classmethod
    def from_codes(cls, names, code_columns, n: int) -> "EncodedDataset":
        """Build a dataset from raw integer code columns, compacting each
        column so codes are dense in [0, observed domain size)."""
        attrs = []
        for name, codes in zip(names, code_columns):
            attrs.append(_make_attribute(name, np.asarray(codes, dtype=np.int64), n))
        return cls(attributes=tuple(attrs), n=n)


def _make_attribute(name: str, codes: np.ndarray, n: int) -> Attribute:
    values, dense = np.unique(codes, return_inverse=True)
    dense = dense.astype(np.int64, copy=False)
    counts = np.bincount(dense, minlength=len(values))
    return Attribute(
        name=name,
        codes=dense,
        domain_size=int(len(values)),
        entropy=entropy(counts, n),
    )


def parse_csv(data: bytes | str, has_header: bool = True) -> RawTable:
    """Parse comma-separated UTF-8 text into a RawTable.

    Without a header, column names X1..Xd are synthesized. Rows whose field
    count differs from the first row raise a ParseError naming the line;
    rows containing empty fields are dropped and counted.
    """
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not UTF-8: {exc}") from exc
    else:
        text = data
    reader = csv.reader(io.StringIO(text))
    rows = []
    names = None
    width = None
    rejected = 0
    for row in reader:
        if not row:
            continue  # blank line
        if width is None:
            width = len(row)
            if has_header:
                names = tuple(row)
                continue
            names = tuple(f"X{i + 1}" for i in range(width))
        if len(row) != width:
            raise ParseError(
                f"ragged row at line {reader.line_num}: "
                f"expected {width} fields, got {len(row)}"
            )
        if any(field == "" for field in row):
            rejected += 1
            continue
        rows.append(row)
    if width is None or names is None:
        raise ParseError("empty input")
    if len(set(names)) != len(names):
        raise ParseError("duplicate column names")
    columns = tuple(tuple(row[j] for row in rows) for j in range(width))
    return RawTable(
        column_names=names,
        columns=columns,
        row_count=len(rows),
        rejected_rows=rejected,
    )


def discretize_equal_frequency(values, bins: int) -> np.ndarray:
    """Cut values into ``bins`` rank-contiguous groups of near-equal size.

    Group sizes before tie handling differ by at most one. All occurrences
    of a tied value take the group of its lowest stable-sort rank (the
    lower bin), so the returned code is a function of the value; codes are
    then compacted to remove bins emptied by that rule.
    """
    vals = np.asarray(values, dtype=np.float64)
    if vals.size == 0:
        raise DataError("cannot discretize an empty column")
    if bins < 1:
        raise ValueError("bins must be >= 1")
    if not np.all(np.isfinite(vals)):
        raise DataError("cannot discretize non-finite values")
    n = vals.size
    order = np.argsort(vals, kind="stable")
    base, rem = divmod(n, bins)
    sizes = np.full(bins, base, dtype=np.int64)
    sizes[:rem] += 1
    group_of_rank = np.repeat(np.arange(bins, dtype=np.int64), sizes)
    sorted_vals = vals[order]
    first_rank = np.searchsorted(sorted_vals, sorted_vals, side="left")
    codes_by_rank = group_of_rank[first_rank]
    codes = np.empty(n, dtype=np.int64)
    codes[order] = codes_by_rank
    _, compact = np.unique(codes, return_inverse=True)
    return compact.astype(np.int64, copy=False)


def _parse_numeric(tokens, name: str) -> np.ndarray:
    out = np.empty(len(tokens), dtype=np.float64)
    for i, tok in enumerate(tokens):
        try:
            out[i] = float(tok)
        except ValueError as exc:
            raise DataError(f"column {name!r}: non-numeric value {tok!r}") from exc
    if not np.all(np.isfinite(out)):
        raise DataError(f"column {name!r}: non-finite numeric value")
    return out


def _is_numeric(tokens) -> bool:
    try:
        for tok in tokens:
            if not math.isfinite(float(tok)):
                return False  # "inf"/"nan" tokens stay categorical
    except ValueError:
        return False
    return True


def encode(
    table: RawTable,
    discretize_numeric: bool = True,
    bins: int = 5,
    numeric_cols="auto",
) -> EncodedDataset:
    """Encode a RawTable into dense integer attributes.

    Text columns map to codes in first-occurrence order. When
    ``discretize_numeric`` is set, columns named in ``numeric_cols`` (or
    detected when it is "auto") are parsed as floats and equal-frequency
    binned; otherwise numerals are just distinct tokens.
    """
    if table.row_count < 2:
        raise DataError("need at least 2 rows: correction terms divide by n - 1")
    if discretize_numeric and numeric_cols not in ("auto", None):
        unknown = set(numeric_cols) - set(table.column_names)
        if unknown:
            raise DataError(f"unknown numeric columns: {sorted(unknown)}")
    attrs = []
    for name, column in zip(table.column_names, table.columns):
        numeric = discretize_numeric and (
            _is_numeric(column) if numeric_cols in ("auto", None)
            else name in numeric_cols
        )
        if numeric:
            codes = discretize_equal_frequency(_parse_numeric(column, name), bins)
        else:
            mapping: dict[str, int] = {}
            codes = np.fromiter(
                (mapping.setdefault(tok, len(mapping)) for tok in column),
                count=len(column),
                dtype=np.int64,
            )
        attrs.append(_make_attribute(name, codes, table.row_count))
    return EncodedDataset(attributes=tuple(attrs), n=table.row_count)
