"""Dataset container and CSV ingestion.

Data enters the system as an n x d matrix of finite reals. By default every
column is shifted and scaled to zero mean and unit variance at ingestion so
that the unconstrained unit-Gaussian background starts on the same scale as
the data; otherwise the first views only show the scale mismatch.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import IngestError

__all__ = ["DataMatrix", "parse_csv", "load_csv", "standardize", "to_csv"]


@dataclass(frozen=True)
class DataMatrix:
    """An n x d real dataset with stable row identifiers.

    The value matrix is held read-only; build a new instance to change data.
    ``class_labels`` is an optional per-row categorical tag used for
    selection statistics and saved groupings.
    """

    values: np.ndarray
    column_names: tuple[str, ...]
    row_ids: tuple[str, ...]
    class_labels: tuple[str, ...] | None = None

    def __post_init__(self):
        values = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        if values.ndim != 2:
            raise IngestError(f"expected a 2-D matrix, got shape {values.shape}")
        n, d = values.shape
        if n < 1 or d < 1:
            raise IngestError(f"need at least one row and one column, got {n}x{d}")
        if not np.all(np.isfinite(values)):
            bad = np.argwhere(~np.isfinite(values))[0]
            raise IngestError(f"non-finite value at row {bad[0]}, column {bad[1]}")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "column_names", tuple(str(c) for c in self.column_names))
        object.__setattr__(self, "row_ids", tuple(str(r) for r in self.row_ids))
        if len(self.column_names) != d:
            raise IngestError(f"{len(self.column_names)} column names for {d} columns")
        if len(self.row_ids) != n:
            raise IngestError(f"{len(self.row_ids)} row ids for {n} rows")
        if len(set(self.row_ids)) != n:
            raise IngestError("row ids are not unique")
        if self.class_labels is not None:
            labels = tuple(str(x) for x in self.class_labels)
            if len(labels) != n:
                raise IngestError(f"{len(labels)} class labels for {n} rows")
            object.__setattr__(self, "class_labels", labels)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    @classmethod
    def from_array(cls, values, column_names=None, row_ids=None, class_labels=None) -> "DataMatrix":
        values = np.asarray(values, dtype=np.float64)
        if values.ndim == 1:
            values = values[:, None]
        n, d = values.shape
        if column_names is None:
            column_names = tuple(f"x{j}" for j in range(d))
        if row_ids is None:
            row_ids = tuple(f"r{i}" for i in range(n))
        return cls(values, tuple(column_names), tuple(row_ids), class_labels)

    def label_rows(self, label: str) -> np.ndarray:
        """Row indices carrying the given class label."""
        if self.class_labels is None:
            return np.array([], dtype=np.intp)
        return np.flatnonzero(np.asarray(self.class_labels, dtype=object) == label)


def standardize(data: DataMatrix) -> DataMatrix:
    """Shift and scale each column to zero mean, unit variance.

    Columns with zero variance are centered only; their scale is left at 1
    so the transform stays invertible.
    """
    mean = data.values.mean(axis=0)
    std = data.values.std(axis=0)
    std = np.where(std > 0.0, std, 1.0)
    return DataMatrix(
        (data.values - mean) / std, data.column_names, data.row_ids, data.class_labels
    )


def parse_csv(text: str, label_column: str | None = None) -> DataMatrix:
    """Parse CSV text into a DataMatrix.

    The first row is the header. One column may be designated as the class
    label; every other cell must parse as a decimal real. Any parse failure
    aborts with the offending row and column in the message.
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise IngestError("empty input: no header row") from None
    header = [h.strip() for h in header]
    label_idx = None
    if label_column is not None:
        if label_column not in header:
            raise IngestError(f"label column {label_column!r} not found in header {header}")
        label_idx = header.index(label_column)
    value_cols = [j for j in range(len(header)) if j != label_idx]
    if not value_cols:
        raise IngestError("no numeric columns left after removing the label column")

    rows: list[list[float]] = []
    labels: list[str] = []
    for i, rec in enumerate(reader):
        if not rec or (len(rec) == 1 and not rec[0].strip()):
            continue  # tolerate trailing blank lines
        if len(rec) != len(header):
            raise IngestError(f"row {i + 1}: expected {len(header)} fields, got {len(rec)}")
        out = []
        for j in value_cols:
            cell = rec[j].strip()
            try:
                val = float(cell)
            except ValueError:
                raise IngestError(
                    f"row {i + 1}, column {header[j]!r}: could not parse {cell!r} as a number"
                ) from None
            if not np.isfinite(val):
                raise IngestError(f"row {i + 1}, column {header[j]!r}: non-finite value {cell!r}")
            out.append(val)
        rows.append(out)
        if label_idx is not None:
            labels.append(rec[label_idx].strip())
    if not rows:
        raise IngestError("no data rows")
    values = np.asarray(rows, dtype=np.float64)
    return DataMatrix(
        values,
        tuple(header[j] for j in value_cols),
        tuple(f"r{i}" for i in range(len(rows))),
        tuple(labels) if label_idx is not None else None,
    )


def load_csv(text: str, label_column: str | None = None, scale: bool = True) -> DataMatrix:
    """Parse CSV text and (by default) standardize every column."""
    data = parse_csv(text, label_column=label_column)
    return standardize(data) if scale else data


def to_csv(data: DataMatrix, extra_labels: dict[str, list[str]] | None = None) -> str:
    """Serialize a DataMatrix to CSV, optionally with extra label columns."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = list(data.column_names)
    if data.class_labels is not None:
        header.append("label")
    for name in extra_labels or {}:
        header.append(name)
    writer.writerow(header)
    for i in range(data.n):
        rec = [repr(float(v)) for v in data.values[i]]
        if data.class_labels is not None:
            rec.append(data.class_labels[i])
        for name, col in (extra_labels or {}).items():
            rec.append(col[i])
        writer.writerow(rec)
    return buf.getvalue()
