"""Rectangular numeric datasets with CSV import/export."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DagError, UnknownNode


class CsvError(DagError):
    pass


@dataclass(frozen=True, eq=False)
class Dataset:
    """``n`` rows of real values over named columns.

    ``latent`` names columns that exist in memory (for checking estimators
    against the truth) but are dropped from exports.
    """

    columns: tuple[str, ...]
    values: np.ndarray
    seed: int | None = None
    latent: frozenset[str] = frozenset()

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 2 or vals.shape[1] != len(self.columns):
            raise ValueError("dataset values must be an n x len(columns) array")
        if vals.shape[0] < 1:
            raise ValueError("dataset needs at least one row")
        if len(set(self.columns)) != len(self.columns):
            raise ValueError("duplicate column names")
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "latent", frozenset(self.latent))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def __len__(self) -> int:
        return self.n

    def column(self, name: str) -> np.ndarray:
        try:
            return self.values[:, self.columns.index(name)]
        except ValueError:
            raise UnknownNode(name, "dataset columns") from None

    def matrix(self, names) -> np.ndarray:
        return np.column_stack([self.column(v) for v in names])

    def observed(self) -> Dataset:
        keep = [c for c in self.columns if c not in self.latent]
        return Dataset(tuple(keep), self.matrix(keep) if keep else self.values[:, :0], self.seed)

    def with_columns(self, **new) -> Dataset:
        """Copy with columns added, or replaced when the name already exists."""
        cols = list(self.columns)
        vals = self.values.copy()
        for name, v in new.items():
            col = np.asarray(v, dtype=float).reshape(-1)
            if name in cols:
                vals[:, cols.index(name)] = col
            else:
                cols.append(name)
                vals = np.column_stack([vals, col])
        return Dataset(tuple(cols), vals, self.seed, self.latent)

    def to_csv(self, dest=None) -> str:
        """Write the observed columns as CSV (one header line); return the text."""
        obs = self.observed()
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(obs.columns)
        for row in obs.values:
            w.writerow([repr(float(x)) for x in row])
        text = buf.getvalue()
        if dest is not None:
            Path(dest).write_text(text, encoding="utf-8")
        return text

    @classmethod
    def from_csv(cls, source) -> Dataset:
        """Read a CSV file path (or a file-like object) with a header line."""
        if hasattr(source, "read"):
            text = source.read()
        else:
            text = Path(source).read_text(encoding="utf-8")
        rows = list(csv.reader(io.StringIO(text)))
        rows = [r for r in rows if r]
        if not rows:
            raise CsvError("empty CSV")
        header, body = rows[0], rows[1:]
        if not body:
            raise CsvError("CSV has a header but no rows")
        data = []
        for lineno, r in enumerate(body, start=2):
            if len(r) != len(header):
                raise CsvError(f"line {lineno}: expected {len(header)} fields, got {len(r)}")
            try:
                data.append([float(x) for x in r])
            except ValueError as exc:
                raise CsvError(f"line {lineno}: {exc}") from None
        arr = np.array(data)
        if not np.all(np.isfinite(arr)):
            raise CsvError("CSV contains non-finite values")
        try:
            return cls(tuple(h.strip() for h in header), arr)
        except ValueError as exc:
            raise CsvError(str(exc)) from None
