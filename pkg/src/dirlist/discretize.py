"""Turn raw tables into a pool of binary features.

Numeric columns are cut at empirical quantiles into nested indicators
(``x < t`` for the low levels, ``x > t`` for the high levels and one closed
middle band).  Categorical columns get one indicator per observed value.
Indicators that are constant on the fitting data are dropped and the choice
is recorded in the :class:`BinningSpec`, so applying the spec to new data
always yields the same columns.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from .core import Dataset

DEFAULT_LEVELS = (0.01, 0.05, 0.10, 0.25, 0.75, 0.90, 0.95, 0.99)

NUMERIC = "numeric"
CATEGORICAL = "categorical"


class InputError(ValueError):
    """Malformed input table or incompatible schema."""


@dataclass
class RawTable:
    """Named feature columns plus a binary label vector.

    Numeric columns hold floats, categorical columns hold strings.
    """

    columns: dict[str, np.ndarray]
    kinds: dict[str, str]
    labels: np.ndarray
    label_column: str = "label"

    def __post_init__(self):
        self.labels = np.asarray(self.labels).astype(bool)
        for name, col in self.columns.items():
            if self.kinds.get(name) not in (NUMERIC, CATEGORICAL):
                raise InputError(f"column {name!r} has no numeric/categorical tag")
            if len(col) != len(self.labels):
                raise InputError(f"column {name!r} has {len(col)} values, expected {len(self.labels)}")

    @property
    def n(self) -> int:
        return len(self.labels)

    @classmethod
    def from_rows(cls, header: Sequence[str], rows: Sequence[Sequence[str]], label_column: str,
                  positive_label: Optional[str] = None,
                  kinds: Optional[Mapping[str, str]] = None) -> "RawTable":
        header = [h.strip() for h in header]
        if label_column not in header:
            raise InputError(f"label column {label_column!r} not found; columns are {', '.join(header)}")
        bad = [i for i, row in enumerate(rows, start=2) if len(row) != len(header)]
        if bad:
            raise InputError(f"rows with wrong field count: {', '.join(map(str, bad))}")
        kinds = dict(kinds or {})
        label_idx = header.index(label_column)
        raw_labels = [row[label_idx].strip() for row in rows]
        if positive_label is None:
            values = sorted(set(raw_labels))
            if not set(values) <= {"0", "1"}:
                raise InputError(f"label values {values} are not 0/1; name the positive label")
            positive_label = "1"
        labels = np.array([v == positive_label for v in raw_labels], dtype=bool)
        columns: dict[str, np.ndarray] = {}
        col_kinds: dict[str, str] = {}
        for j, name in enumerate(header):
            if j == label_idx:
                continue
            values = [row[j].strip() for row in rows]
            kind = kinds.get(name) or (NUMERIC if _all_numeric(values) else CATEGORICAL)
            if kind == NUMERIC:
                parsed, bad = _parse_floats(values)
                if bad:
                    raise InputError(f"column {name!r}: non-numeric values in rows {', '.join(map(str, bad))}")
                columns[name] = parsed
            elif kind == CATEGORICAL:
                columns[name] = np.array(values, dtype=object)
            else:
                raise InputError(f"unknown column kind {kind!r} for {name!r}")
            col_kinds[name] = kind
        return cls(columns, col_kinds, labels, label_column)

    @classmethod
    def from_csv(cls, path, label_column: str, positive_label: Optional[str] = None,
                 kinds: Optional[Mapping[str, str]] = None) -> "RawTable":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise InputError(f"{path}: empty file") from None
            rows = [row for row in reader if row]
        return cls.from_rows(header, rows, label_column, positive_label, kinds)


def _parse_floats(values: Sequence[str]) -> tuple[np.ndarray, list[int]]:
    out = np.empty(len(values))
    bad = []
    for i, v in enumerate(values):
        try:
            out[i] = float(v)
        except ValueError:
            bad.append(i + 2)   # 1-based, header is row 1
            continue
        if math.isnan(out[i]):
            bad.append(i + 2)
    return out, bad


def _all_numeric(values: Sequence[str]) -> bool:
    return bool(values) and not _parse_floats(values)[1]


def nearest_rank_quantile(values, q: float) -> float:
    """Smallest value ``v`` with at least ``ceil(q * n)`` values ``<= v``."""
    values = np.sort(np.asarray(values, dtype=float))
    if values.size == 0:
        raise InputError("cannot take a quantile of an empty column")
    if not 0.0 < q < 1.0:
        raise ValueError(f"quantile level {q} outside (0, 1)")
    # decimal reading of q, so 0.07 * 100 is exactly 7
    rank = math.ceil(Fraction(repr(float(q))) * values.size)
    return float(values[max(rank, 1) - 1])


def _fmt(t: float) -> str:
    text = repr(float(t))
    return text[:-2] if text.endswith(".0") else text


@dataclass(frozen=True)
class Indicator:
    """One binary feature: ``kind`` is ``lt``, ``gt``, ``between`` or ``eq``."""

    column: str
    kind: str
    low: Optional[float] = None
    high: Optional[float] = None
    value: Optional[str] = None

    @property
    def name(self) -> str:
        if self.kind == "lt":
            return f"{self.column}<{_fmt(self.high)}"
        if self.kind == "gt":
            return f"{self.column}>{_fmt(self.low)}"
        if self.kind == "between":
            return f"{_fmt(self.low)}<={self.column}<={_fmt(self.high)}"
        return f"{self.column}={self.value}"

    def apply(self, col: np.ndarray) -> np.ndarray:
        if self.kind == "lt":
            return col < self.high
        if self.kind == "gt":
            return col > self.low
        if self.kind == "between":
            return (col >= self.low) & (col <= self.high)
        return col == self.value

    def to_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}


@dataclass(frozen=True)
class BinningSpec:
    levels: tuple[float, ...]
    thresholds: dict[str, tuple[float, ...]]
    categories: dict[str, tuple[str, ...]]
    features: tuple[Indicator, ...] = field(default=())

    @property
    def feature_names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.features)

    def to_json(self) -> str:
        doc = {
            "levels": list(self.levels),
            "thresholds": {k: list(v) for k, v in self.thresholds.items()},
            "categories": {k: list(v) for k, v in self.categories.items()},
            "features": [f.to_dict() for f in self.features],
        }
        return json.dumps(doc, indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "BinningSpec":
        doc = json.loads(text)
        return cls(
            tuple(doc["levels"]),
            {k: tuple(v) for k, v in doc["thresholds"].items()},
            {k: tuple(v) for k, v in doc["categories"].items()},
            tuple(Indicator(**f) for f in doc["features"]),
        )

    def save(self, path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path) -> "BinningSpec":
        return cls.from_json(Path(path).read_text())


def numeric_indicators(column: str, thresholds: Sequence[float], levels: Sequence[float]) -> list[Indicator]:
    """Nested low bins, the middle band, nested high bins (in that order)."""
    low = [t for t, q in zip(thresholds, levels) if q < 0.5]
    high = [t for t, q in zip(thresholds, levels) if q >= 0.5]
    out = [Indicator(column, "lt", high=t) for t in low]
    if low and high:
        out.append(Indicator(column, "between", low=low[-1], high=high[0]))
    out += [Indicator(column, "gt", low=t) for t in high]
    return out


def fit_quantile_bins(table: RawTable, levels: Sequence[float] = DEFAULT_LEVELS) -> BinningSpec:
    levels = tuple(float(q) for q in levels)
    if any(not 0.0 < q < 1.0 for q in levels) or list(levels) != sorted(levels):
        raise ValueError("levels must be sorted and inside (0, 1)")
    thresholds: dict[str, tuple[float, ...]] = {}
    categories: dict[str, tuple[str, ...]] = {}
    features: list[Indicator] = []
    seen: set[str] = set()
    for name, col in table.columns.items():
        if table.kinds[name] == "numeric":
            if len(col) == 0:
                raise InputError(f"numeric column {name!r} is empty")
            thresholds[name] = tuple(nearest_rank_quantile(col, q) for q in levels)
            candidates = numeric_indicators(name, thresholds[name], levels)
        else:
            categories[name] = tuple(sorted(set(col)))
            candidates = [Indicator(name, "eq", value=v) for v in categories[name]]
        for ind in candidates:
            hits = ind.apply(col)
            if ind.name in seen or hits.all() or not hits.any():
                continue
            seen.add(ind.name)
            features.append(ind)
    return BinningSpec(levels, thresholds, categories, tuple(features))


def binarize(table: RawTable, spec: BinningSpec) -> Dataset:
    missing = sorted({f.column for f in spec.features} - set(table.columns))
    if missing:
        raise InputError(f"table lacks columns: {', '.join(missing)}")
    if not spec.features:
        raise InputError("binning spec keeps no features")
    cols = [f.apply(table.columns[f.column]) for f in spec.features]
    return Dataset(np.column_stack(cols), table.labels, spec.feature_names)


def fit_binarize(table: RawTable, levels: Sequence[float] = DEFAULT_LEVELS) -> tuple[Dataset, BinningSpec]:
    spec = fit_quantile_bins(table, levels)
    return binarize(table, spec), spec
