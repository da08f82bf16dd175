"""Run-off triangle data model and CSV ingestion.

Accident years are 1-indexed (row ``i`` is accident year ``i``); development
years are 0-indexed (column ``j`` is development year ``j``). Cell ``(i, j)``
is observed exactly when ``j <= n - i``.
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
from dataclasses import InitVar, dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .exceptions import (
    ContractError,
    CSVParseError,
    FormatError,
    ShapeError,
    ValidationError,
)

__all__ = [
    "CUMULATIVE",
    "INCREMENTAL",
    "FutureCellIndex",
    "Triangle",
    "cumulate",
    "decumulate",
    "emit_csv",
    "future_cells",
    "observed_mask",
    "parse_csv",
    "read_csv",
    "write_csv",
]

CUMULATIVE = "cumulative"
INCREMENTAL = "incremental"
_KINDS = (CUMULATIVE, INCREMENTAL)


def observed_mask(n: int) -> np.ndarray:
    """Boolean n x n mask of the development (observed) triangle."""
    i = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    # zero-based row r is accident year r + 1, observed while j <= n - (r + 1)
    return j <= n - 1 - i


@dataclass(frozen=True, order=True)
class FutureCellIndex:
    """A cell of the future (lower-right) triangle.

    ``accident_year`` is 1-indexed, ``dev_year`` 0-indexed.
    """

    accident_year: int
    dev_year: int

    def check(self, n: int) -> None:
        if not (2 <= self.accident_year <= n
                and n - self.accident_year + 1 <= self.dev_year <= n - 1):
            raise ContractError(
                f"({self.accident_year}, dev_{self.dev_year}) is not a future "
                f"cell of a {n}-year triangle"
            )


def future_cells(n: int) -> list[FutureCellIndex]:
    return [
        FutureCellIndex(i, j)
        for i in range(2, n + 1)
        for j in range(n - i + 1, n)
    ]


def _cell_name(row: int, col: int, labels: Sequence[str]) -> str:
    return f"accident year {row + 1} ({labels[row]}), dev_{col}"


@dataclass(frozen=True, eq=False)
class Triangle:
    """Square run-off triangle of claim amounts.

    Parameters
    ----------
    values : array_like
        n x n array; unobserved (future) cells must be NaN.
    kind : {"cumulative", "incremental"}
    labels : sequence of str, optional
        Accident-year labels, one per row. Defaults to ``origin, origin+1, ...``
        when ``origin`` is given, else ``1..n``.
    origin : int, optional
        Calendar year of the first accident year.
    unit : str, optional
        Free-text currency unit; never used in computations.
    allow_negative_increments : bool
        Accept negative incremental cells (salvage, recoveries).
    """

    values: np.ndarray
    kind: str = CUMULATIVE
    labels: Optional[tuple] = None
    origin: Optional[int] = None
    unit: Optional[str] = None
    allow_negative_increments: InitVar[bool] = False
    _fingerprint: Optional[str] = field(default=None, init=False, repr=False)

    def __post_init__(self, allow_negative_increments):
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}, got {self.kind!r}")
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ShapeError(f"triangle must be square, got shape {values.shape}")
        n = values.shape[0]
        if n < 1:
            raise ShapeError("triangle needs at least one accident year")
        if self.labels is None:
            start = 1 if self.origin is None else int(self.origin)
            labels = tuple(str(start + k) for k in range(n))
        else:
            labels = tuple(str(label) for label in self.labels)
            if len(labels) != n:
                raise ShapeError(f"{len(labels)} labels for {n} accident years")

        mask = observed_mask(n)
        present = ~np.isnan(values)
        extra = present & ~mask
        if extra.any():
            r, c = np.argwhere(extra)[0]
            raise ShapeError(
                f"future cell {_cell_name(r, c, labels)} must be empty"
            )
        missing = mask & ~present
        if missing.any():
            r, c = np.argwhere(missing)[0]
            raise ShapeError(f"observed cell {_cell_name(r, c, labels)} is missing")
        if np.isinf(values[mask]).any():
            r, c = np.argwhere(np.isinf(values) & mask)[0]
            raise ValidationError(f"cell {_cell_name(r, c, labels)} is infinite")

        if self.kind == CUMULATIVE:
            bad = mask & ~(values > 0)
            if bad.any():
                r, c = np.argwhere(bad)[0]
                raise ValidationError(
                    f"cumulative cell {_cell_name(r, c, labels)} = "
                    f"{values[r, c]!r} must be > 0"
                )
        elif not allow_negative_increments:
            bad = mask & (values < 0)
            if bad.any():
                r, c = np.argwhere(bad)[0]
                raise ValidationError(
                    f"incremental cell {_cell_name(r, c, labels)} = "
                    f"{values[r, c]!r} is negative "
                    "(pass allow_negative_increments=True to accept it)"
                )

        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def mask(self) -> np.ndarray:
        return observed_mask(self.n)

    def __getitem__(self, key):
        """``t[i, j]`` with 1-indexed accident year and 0-indexed dev year."""
        i, j = key
        if not 1 <= i <= self.n or not 0 <= j < self.n:
            raise IndexError(f"cell ({i}, {j}) outside a {self.n}-year triangle")
        return float(self.values[i - 1, j])

    def latest(self) -> np.ndarray:
        """Latest observed diagonal S_{i, n-i} for i = 1..n."""
        n = self.n
        return np.array([self.values[r, n - 1 - r] for r in range(n)])

    def scale(self, c: float) -> "Triangle":
        return Triangle(self.values * c, kind=self.kind, labels=self.labels,
                        origin=self.origin, unit=self.unit,
                        allow_negative_increments=True)

    def __eq__(self, other):
        if not isinstance(other, Triangle):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.labels == other.labels
            and self.values.shape == other.values.shape
            and bool(np.array_equal(self.values, other.values, equal_nan=True))
        )

    __hash__ = None

    @property
    def fingerprint(self) -> str:
        """SHA-256 of the canonicalized CSV form (rows sorted, no padding)."""
        if self._fingerprint is None:
            lines = emit_csv(self).strip().splitlines()
            canonical = "\n".join([lines[0].strip()] + sorted(
                ",".join(tok.strip() for tok in line.split(","))
                for line in lines[1:]
            ))
            digest = hashlib.sha256(canonical.encode("utf-8")).hexdigest()
            object.__setattr__(self, "_fingerprint", digest)
        return self._fingerprint

    def __repr__(self):
        return f"Triangle(n={self.n}, kind={self.kind!r}, labels={self.labels!r})"


def cumulate(t: Triangle) -> Triangle:
    """Incremental -> cumulative via running row sums."""
    if t.kind != INCREMENTAL:
        raise ContractError(f"cumulate expects an incremental triangle, got {t.kind}")
    # NaN future cells propagate through cumsum only to later future cells
    values = np.cumsum(np.where(t.mask, t.values, 0.0), axis=1)
    values[~t.mask] = np.nan
    return Triangle(values, kind=CUMULATIVE, labels=t.labels, origin=t.origin,
                    unit=t.unit)


def decumulate(t: Triangle) -> Triangle:
    """Cumulative -> incremental via first differences along each row."""
    if t.kind != CUMULATIVE:
        raise ContractError(f"decumulate expects a cumulative triangle, got {t.kind}")
    values = np.array(t.values)
    values[:, 1:] = np.diff(t.values, axis=1)
    values[~t.mask] = np.nan
    return Triangle(values, kind=INCREMENTAL, labels=t.labels, origin=t.origin,
                    unit=t.unit, allow_negative_increments=True)


def _parse_number(token: str, row_no: int, col_name: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise CSVParseError(
            f"row {row_no}, column {col_name}: cannot parse {token!r} as a number"
        ) from None
    if math.isnan(value):
        raise CSVParseError(f"row {row_no}, column {col_name}: NaN is not allowed")
    return value


def parse_csv(
    text,
    kind: str = CUMULATIVE,
    *,
    unit: Optional[str] = None,
    allow_negative_increments: bool = False,
) -> Triangle:
    """Read a triangle from CSV text or a text stream.

    The header must be ``accident_year,dev_0,...,dev_{n-1}``; each following
    row holds an accident-year label then n cells, with future cells empty.
    Row numbers in error messages count the header as row 1.
    """
    if kind not in _KINDS:
        raise ValueError(f"kind must be one of {_KINDS}, got {kind!r}")
    if not isinstance(text, str):
        text = text.read()
    if text.startswith("﻿"):
        text = text[1:]
    rows = [r for r in csv.reader(io.StringIO(text)) if any(tok.strip() for tok in r)]
    if not rows:
        raise FormatError("empty CSV: expected a header row")
    header = [tok.strip() for tok in rows[0]]
    n = len(header) - 1
    expected = ["accident_year"] + [f"dev_{j}" for j in range(n)]
    if n < 1 or header != expected:
        raise FormatError(
            f"row 1: header must be {','.join(expected) if n >= 1 else 'accident_year,dev_0,...'}"
            f", got {','.join(header)}"
        )
    body = rows[1:]
    for k, row in enumerate(body):
        if len(row) != n + 1:
            raise FormatError(
                f"row {k + 2}: expected {n + 1} fields, found {len(row)}"
            )
    if len(body) != n:
        raise ShapeError(
            f"header declares {n} development years but the file has "
            f"{len(body)} accident-year rows; triangles must be square"
        )

    values = np.full((n, n), np.nan)
    labels = []
    for r, row in enumerate(body):
        labels.append(row[0].strip())
        for j, token in enumerate(row[1:]):
            token = token.strip()
            if token == "":
                continue
            values[r, j] = _parse_number(token, r + 2, f"dev_{j}")
    return Triangle(values, kind=kind, labels=tuple(labels), unit=unit,
                    allow_negative_increments=allow_negative_increments)


def _fmt(value: float, precision: Optional[int]) -> str:
    if precision is not None:
        return f"{value:.{precision}f}"
    text = repr(float(value))
    return text[:-2] if text.endswith(".0") else text


def emit_csv(
    t: Triangle,
    predictions: Optional[Mapping[FutureCellIndex, float]] = None,
    *,
    precision: Optional[int] = None,
    decoration: str = "",
) -> str:
    """Render a triangle in the ``parse_csv`` format.

    Without ``predictions`` (or with an empty mapping) only the observed
    triangle is written. A non-empty mapping must cover the future triangle
    exactly; the result is then the completed n x n square, each predicted
    value followed by ``decoration``. ``precision=None`` writes shortest
    round-trip representations.
    """
    n = t.n
    square = np.array(t.values)
    if predictions:
        keys = set(predictions)
        wanted = set(future_cells(n))
        if keys != wanted:
            missing = sorted(wanted - keys)
            unknown = sorted(keys - wanted)
            raise ContractError(
                "prediction keys must cover the future triangle exactly; "
                f"missing {[(c.accident_year, c.dev_year) for c in missing]}, "
                f"unexpected {[(c.accident_year, c.dev_year) for c in unknown]}"
            )
    out = io.StringIO()
    out.write(",".join(["accident_year"] + [f"dev_{j}" for j in range(n)]) + "\n")
    for r in range(n):
        cells = [t.labels[r]]
        for j in range(n):
            if not np.isnan(square[r, j]):
                cells.append(_fmt(square[r, j], precision))
            elif predictions:
                value = predictions[FutureCellIndex(r + 1, j)]
                cells.append(_fmt(value, precision) + decoration)
            else:
                cells.append("")
        out.write(",".join(cells) + "\n")
    return out.getvalue()


def read_csv(path, kind: str = CUMULATIVE, **kwargs) -> Triangle:
    with open(path, newline="", encoding="utf-8") as fh:
        return parse_csv(fh, kind, **kwargs)


def write_csv(path, t: Triangle, predictions=None, *, precision=None,
              decoration: str = ""):
    """Write ``t`` to ``path``; predictions go to a ``<stem>_predicted.csv`` companion.

    Returns the list of paths written.
    """
    from pathlib import Path

    path = Path(path)
    path.write_text(emit_csv(t, precision=precision), encoding="utf-8")
    written = [path]
    if predictions:
        companion = path.with_name(f"{path.stem}_predicted{path.suffix or '.csv'}")
        companion.write_text(
            emit_csv(t, predictions, precision=precision, decoration=decoration),
            encoding="utf-8",
        )
        written.append(companion)
    return written
