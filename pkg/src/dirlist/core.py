"""Decision-list semantics.

A decision list is an ordered sequence of rules ``IF cond_k THEN p_k`` closed
by a default probability.  A sample is handled by the first rule whose
condition it satisfies; samples matched by no rule fall into the default
region.  Regions are numbered ``1..K`` for the rules and ``K + 1`` for the
default, so region ``k`` is ``R_k`` and every region above ``k`` together
forms the remainder ``R_{>k}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence

import numpy as np

# Probabilities are clamped to [EPS, 1 - EPS] inside likelihoods only.
EPS = 1e-12


class Direction(Enum):
    """Which class the rules of a directional list characterize."""

    POSITIVE = "positive"
    NEGATIVE = "negative"

    @property
    def flipped(self) -> "Direction":
        return Direction.NEGATIVE if self is Direction.POSITIVE else Direction.POSITIVE


def _as_binary(values, what: str) -> np.ndarray:
    arr = np.asarray(values)
    if arr.dtype == bool:
        return arr.copy()
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValueError(f"{what} must contain only 0/1 values")
    return arr.astype(bool)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Binary feature matrix with binary labels.

    ``features`` is stored as an ``n x d`` boolean array, ``labels`` as a
    length-``n`` boolean array.  Both are made read-only.
    """

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...] = ()

    def __post_init__(self):
        X = _as_binary(self.features, "features")
        y = _as_binary(self.labels, "labels")
        if X.ndim != 2:
            raise ValueError("features must be a 2-d matrix")
        if y.shape != (X.shape[0],):
            raise ValueError("labels must have one entry per row of features")
        if X.shape[0] < 1 or X.shape[1] < 1:
            raise ValueError("dataset needs at least one row and one feature")
        names = tuple(self.feature_names) or tuple(f"f{j}" for j in range(X.shape[1]))
        if len(names) != X.shape[1]:
            raise ValueError(f"expected {X.shape[1]} feature names, got {len(names)}")
        if len(set(names)) != len(names):
            raise ValueError("feature names must be distinct")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "feature_names", names)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def base_rate(self) -> float:
        return float(self.labels.mean())

    def with_labels(self, labels) -> "Dataset":
        return Dataset(self.features, labels, self.feature_names)

    def flipped(self) -> "Dataset":
        """Same features, labels inverted (0 <-> 1)."""
        return self.with_labels(~self.labels)

    def take(self, rows) -> "Dataset":
        return Dataset(self.features[rows], self.labels[rows], self.feature_names)

    def reorder_features(self, names: Sequence[str]) -> "Dataset":
        index = {name: j for j, name in enumerate(self.feature_names)}
        missing = [name for name in names if name not in index]
        if missing:
            raise KeyError(f"features not in dataset: {', '.join(missing)}")
        cols = [index[name] for name in names]
        return Dataset(self.features[:, cols], self.labels, tuple(names))


@dataclass(frozen=True, order=True)
class Condition:
    """Conjunction of positive literals; literal ``j`` means feature ``j`` is 1."""

    literals: tuple[int, ...]

    def __post_init__(self):
        lits = tuple(int(j) for j in self.literals)
        if not lits:
            raise ValueError("a condition needs at least one literal")
        if lits[0] < 0 or any(a >= b for a, b in zip(lits, lits[1:])):
            raise ValueError(f"literals must be non-negative and strictly increasing: {lits}")
        object.__setattr__(self, "literals", lits)

    @property
    def depth(self) -> int:
        return len(self.literals)

    def covers(self, features: np.ndarray) -> np.ndarray:
        """Boolean coverage vector over the rows of ``features``."""
        features = np.asarray(features, dtype=bool)
        if self.literals[-1] >= features.shape[1]:
            raise IndexError(f"literal {self.literals[-1]} out of range for {features.shape[1]} features")
        return features[:, list(self.literals)].all(axis=1)

    def describe(self, feature_names: Sequence[str]) -> str:
        return " AND ".join(feature_names[j] for j in self.literals)


def evaluate_condition(condition: Condition, sample) -> bool:
    sample = np.asarray(sample)
    if condition.literals[-1] >= sample.shape[0]:
        raise IndexError(f"literal {condition.literals[-1]} out of range for {sample.shape[0]} features")
    return bool(all(sample[j] == 1 for j in condition.literals))


@dataclass(frozen=True)
class Rule:
    condition: Condition
    probability: float

    def __post_init__(self):
        p = float(self.probability)
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"probability {p} outside [0, 1]")
        object.__setattr__(self, "probability", p)


@dataclass(frozen=True)
class DecisionList:
    rules: tuple[Rule, ...] = ()
    default_probability: float = 0.5
    direction: Optional[Direction] = None

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        p = float(self.default_probability)
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"default probability {p} outside [0, 1]")
        object.__setattr__(self, "default_probability", p)

    @property
    def K(self) -> int:
        return len(self.rules)

    def __len__(self) -> int:
        return len(self.rules)

    @property
    def conditions(self) -> tuple[Condition, ...]:
        return tuple(rule.condition for rule in self.rules)

    @property
    def probabilities(self) -> np.ndarray:
        """Region probabilities ``p_1..p_K, p_def``."""
        return np.array([r.probability for r in self.rules] + [self.default_probability])

    def prefix(self, k: int) -> "DecisionList":
        return DecisionList(self.rules[:k], self.default_probability, self.direction)

    def render(self, feature_names: Sequence[str]) -> str:
        lines = []
        for k, rule in enumerate(self.rules):
            head = "IF" if k == 0 else "ELSEIF"
            lines.append(f"{head} {rule.condition.describe(feature_names)} THEN {rule.probability:.4f}")
        lines.append(f"ELSE {self.default_probability:.4f}")
        return "\n".join(lines)


def assign_conditions(conditions: Iterable[Condition], features: np.ndarray) -> np.ndarray:
    """Region index (1-based, ``K + 1`` = default) of every row."""
    features = np.asarray(features, dtype=bool)
    conditions = list(conditions)
    region = np.full(features.shape[0], len(conditions) + 1, dtype=np.int64)
    open_rows = np.ones(features.shape[0], dtype=bool)
    for k, cond in enumerate(conditions, start=1):
        hit = open_rows & cond.covers(features)
        region[hit] = k
        open_rows &= ~hit
    return region


def assign(dlist: DecisionList, data: Dataset) -> np.ndarray:
    return assign_conditions(dlist.conditions, data.features)


def region_counts(region: np.ndarray, labels: np.ndarray, K: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-region sample counts and positive counts, each of length ``K + 1``."""
    sizes = np.bincount(region - 1, minlength=K + 1)
    positives = np.bincount(region - 1, weights=np.asarray(labels, dtype=np.int64), minlength=K + 1)
    return sizes.astype(np.int64), positives.astype(np.int64)


def smoothed_probability(positives, sizes, alpha: float):
    """(positives + alpha) / (sizes + 2 alpha), and 0.5 for empty regions."""
    positives = np.asarray(positives, dtype=float)
    sizes = np.asarray(sizes, dtype=float)
    denom = sizes + 2.0 * alpha
    with np.errstate(invalid="ignore", divide="ignore"):
        p = np.where(sizes > 0, (positives + alpha) / np.where(denom > 0, denom, 1.0), 0.5)
    return p


def fit_probabilities(
    conditions: Sequence[Condition],
    data: Dataset,
    alpha: float = 1.0,
    direction: Optional[Direction] = None,
) -> DecisionList:
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    conditions = list(conditions)
    region = assign_conditions(conditions, data.features)
    sizes, positives = region_counts(region, data.labels, len(conditions))
    p = smoothed_probability(positives, sizes, alpha)
    rules = tuple(Rule(c, float(pk)) for c, pk in zip(conditions, p[:-1]))
    return DecisionList(rules, float(p[-1]), direction)


def predict_proba(dlist: DecisionList, data: Dataset) -> np.ndarray:
    return dlist.probabilities[assign(dlist, data) - 1]


def classify(dlist: DecisionList, data: Dataset, threshold: float = 0.5) -> np.ndarray:
    return (predict_proba(dlist, data) >= threshold).astype(np.int8)


def remainder_probability(data: Dataset, assignment: np.ndarray, k: int) -> Optional[float]:
    """Raw positive rate among samples in regions above ``k``.

    Returns ``None`` when that remainder is empty.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    rest = assignment > k
    if not rest.any():
        return None
    return float(data.labels[rest].mean())


def remainder_rates(dlist: DecisionList, data: Dataset) -> list[Optional[float]]:
    """Raw remainder rates ``p_{>0}, ..., p_{>K}`` (``None`` when empty)."""
    region = assign(dlist, data)
    return [remainder_probability(data, region, k) for k in range(dlist.K + 1)]


def satisfies_direction(cov_pos, cov_n, rest_pos, rest_n, direction: Direction):
    """Directional test on raw counts, exact in integer arithmetic.

    Empty covered regions or empty remainders pass vacuously.
    """
    lhs = np.asarray(cov_pos, dtype=np.int64) * np.asarray(rest_n, dtype=np.int64)
    rhs = np.asarray(rest_pos, dtype=np.int64) * np.asarray(cov_n, dtype=np.int64)
    ok = lhs >= rhs if direction is Direction.POSITIVE else lhs <= rhs
    vacuous = (np.asarray(cov_n) == 0) | (np.asarray(rest_n) == 0)
    return ok | vacuous


def check_direction(dlist: DecisionList, data: Dataset, direction: Direction) -> bool:
    K = dlist.K
    if K == 0:
        return True
    region = assign(dlist, data)
    sizes, positives = region_counts(region, data.labels, K)
    rest_n = np.cumsum(sizes[::-1])[::-1]
    rest_pos = np.cumsum(positives[::-1])[::-1]
    # region k (0-based) against everything after it
    ok = satisfies_direction(positives[:K], sizes[:K], rest_pos[1:], rest_n[1:], direction)
    return bool(ok.all())


def bernoulli_log_likelihood(positives, sizes, p) -> np.ndarray:
    """Log-likelihood of ``positives`` successes out of ``sizes`` at rate ``p``."""
    p = np.clip(np.asarray(p, dtype=float), EPS, 1.0 - EPS)
    positives = np.asarray(positives, dtype=float)
    negatives = np.asarray(sizes, dtype=float) - positives
    return positives * np.log(p) + negatives * np.log1p(-p)
