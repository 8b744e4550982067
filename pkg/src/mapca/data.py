"""CSV ingestion, centring and covariance estimation, fixtures."""

from __future__ import annotations

import csv
import json
import math
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import (
    CsvParseError,
    DimensionMismatchError,
    NonFiniteValueError,
    TooFewRowsError,
)
from .invariance import Rescaling, as_rescaling

# decimal point only; optional exponent
_NUMBER = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_NON_FINITE = re.compile(r"[+-]?(?:nan|inf|infinity)", re.IGNORECASE)

FIXTURES_DIR = Path("fixtures")
CADETS_METRIC = "cadets_metric.csv"
CADETS_DEMO_2D = "cadets_demo_2d.csv"

# cm -> inch, kg -> lb, cm -> inch
CADETS_UNIT_SCALES = (0.394, 2.205, 0.394)


@dataclass(frozen=True)
class Dataset:
    values: np.ndarray
    column_names: tuple
    units: Optional[tuple] = None
    labels: Optional[tuple] = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2:
            raise DimensionMismatchError(f"dataset values must be 2-D, got shape {v.shape}")
        if v.shape[0] < 2:
            raise TooFewRowsError(f"need at least 2 rows to estimate a covariance, got {v.shape[0]}")
        if v.shape[1] < 1:
            raise DimensionMismatchError("dataset has no numeric columns")
        if not np.all(np.isfinite(v)):
            i, j = np.argwhere(~np.isfinite(v))[0]
            raise NonFiniteValueError(f"non-finite value at row {i + 1}, column {j + 1}", i + 1, j + 1)
        if len(self.column_names) != v.shape[1]:
            raise DimensionMismatchError(
                f"{len(self.column_names)} column names for {v.shape[1]} columns"
            )
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "column_names", tuple(self.column_names))

    @property
    def rows(self):
        return self.values.shape[0]

    @property
    def cols(self):
        return self.values.shape[1]


@dataclass(frozen=True)
class CovarianceEstimate:
    sigma: np.ndarray
    means: np.ndarray
    denominator: int


def parse_number(token: str, row: int, col: int) -> float:
    """Parse one CSV cell; ``row``/``col`` are 1-based and only used in errors."""
    text = token.strip()
    if _NON_FINITE.fullmatch(text):
        raise NonFiniteValueError(f"non-finite value {text!r} at row {row}, column {col}", row, col)
    if not _NUMBER.fullmatch(text):
        raise CsvParseError(f"cannot parse {token!r} as a number at row {row}, column {col}", row, col)
    value = float(text)
    if not math.isfinite(value):
        raise NonFiniteValueError(f"value {text!r} overflows at row {row}, column {col}", row, col)
    return value


def _read_rows(path, delimiter):
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            return [r for r in csv.reader(fh, delimiter=delimiter) if any(c.strip() for c in r)]
    except UnicodeDecodeError as exc:
        raise CsvParseError(f"{path}: not valid UTF-8 ({exc})") from None


def load_csv(path, has_header=True, delimiter=",", label_column=None) -> Dataset:
    """Load a numeric CSV into a :class:`Dataset`.

    ``label_column`` (0-based) names a non-numeric column to set aside as
    row labels.  Without a header, columns are called ``col1 .. colp``.
    """
    rows = _read_rows(path, delimiter)
    if not rows:
        raise TooFewRowsError(f"{path}: file is empty")
    header = None
    start = 1
    if has_header:
        header = [h.strip() for h in rows[0]]
        rows = rows[1:]
        start = 2
    width = len(header) if header is not None else len(rows[0]) if rows else 0
    if label_column is not None and not 0 <= label_column < width:
        raise CsvParseError(f"label column {label_column} out of range for {width} columns")

    values, labels = [], []
    for offset, row in enumerate(rows):
        line = start + offset
        if len(row) != width:
            raise CsvParseError(f"row {line} has {len(row)} fields, expected {width}", row=line)
        parsed = []
        for j, cell in enumerate(row):
            if j == label_column:
                labels.append(cell.strip())
                continue
            parsed.append(parse_number(cell, line, j + 1))
        values.append(parsed)

    keep = [j for j in range(width) if j != label_column]
    if header is not None:
        names = tuple(header[j] for j in keep)
    else:
        names = tuple(f"col{k + 1}" for k in range(len(keep)))
    if len(values) < 2:
        raise TooFewRowsError(f"{path}: need at least 2 data rows, got {len(values)}")
    return Dataset(
        values=np.array(values, dtype=np.float64).reshape(len(values), len(keep)),
        column_names=names,
        labels=tuple(labels) if label_column is not None else None,
    )


def read_matrix(path, delimiter=",") -> np.ndarray:
    """Read a headerless CSV holding a square matrix."""
    rows = _read_rows(path, delimiter)
    vals = []
    for i, row in enumerate(rows):
        vals.append([parse_number(cell, i + 1, j + 1) for j, cell in enumerate(row)])
    if not vals or any(len(r) != len(vals) for r in vals):
        raise DimensionMismatchError(f"{path}: expected a square matrix")
    return np.array(vals, dtype=np.float64)


def center_and_covariance(d: Dataset, ddof=1) -> CovarianceEstimate:
    """Column means and ``X_c^T X_c / (n - ddof)``."""
    x = d.values
    n = x.shape[0]
    denom = n - ddof
    if denom < 1:
        raise TooFewRowsError(f"cannot use denominator n-{ddof} with n={n}")
    means = x.mean(axis=0)
    xc = x - means
    sigma = xc.T @ xc / denom
    return CovarianceEstimate(sigma=(sigma + sigma.T) / 2.0, means=means, denominator=denom)


def centered(d: Dataset) -> np.ndarray:
    return d.values - d.values.mean(axis=0)


def apply_rescaling(d: Dataset, c) -> Dataset:
    """Multiply column j by ``c_j``."""
    c = as_rescaling(c)
    if c.dim != d.cols:
        raise DimensionMismatchError(f"{c.dim} scales given for {d.cols} columns")
    return Dataset(
        values=d.values * c.scales,
        column_names=d.column_names,
        units=d.units,
        labels=d.labels,
    )


def find_fixture(name, search: Sequence[Path] = ()) -> Optional[Path]:
    """Locate a fixture file by name, or return None.

    Looks in ``search``, then ``./fixtures`` and the repository ``fixtures``
    directory next to ``src/``.
    """
    candidates = [Path(p) / name for p in search]
    candidates.append(FIXTURES_DIR / name)
    candidates.append(Path(__file__).resolve().parents[2] / "fixtures" / name)
    for path in candidates:
        if path.is_file():
            return path
    return None


def cadets_rescaling() -> Rescaling:
    return Rescaling(np.array(CADETS_UNIT_SCALES))


def cadets_expected() -> dict:
    """Published cadets results (condition numbers and invariance table)."""
    text = resources.files("mapca").joinpath("cadets_expected.json").read_text(encoding="utf-8")
    return json.loads(text)
