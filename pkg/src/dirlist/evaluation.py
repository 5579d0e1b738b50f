"""Quality metrics for decision lists."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import EPS, Dataset, DecisionList, Direction, assign, predict_proba


def log_likelihood(dlist: DecisionList, data: Dataset) -> float:
    """Sum of per-sample Bernoulli log-likelihoods, probabilities clamped."""
    p = np.clip(predict_proba(dlist, data), EPS, 1.0 - EPS)
    y = data.labels
    return float(np.sum(np.where(y, np.log(p), np.log(1.0 - p))))


def ll_ratio(ground_truth: DecisionList, learned: DecisionList, test: Dataset) -> float:
    """Ground-truth test log-likelihood over the learned one; 1.0 is ideal.

    A learned log-likelihood of exactly zero leaves the ratio undefined and
    yields ``nan``.
    """
    learned_ll = log_likelihood(learned, test)
    if learned_ll == 0.0:
        return math.nan
    return log_likelihood(ground_truth, test) / learned_ll


def accuracy(dlist: DecisionList, data: Dataset, threshold: float = 0.5) -> float:
    pred = predict_proba(dlist, data) >= threshold
    return float(np.mean(pred == data.labels))


@dataclass(frozen=True)
class RocCurve:
    points: tuple[tuple[float, float, float], ...]   # (fpr, tpr, threshold)

    @property
    def fpr(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])

    @property
    def tpr(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])

    @property
    def thresholds(self) -> np.ndarray:
        return np.array([p[2] for p in self.points])

    def auc(self) -> float:
        """Trapezoidal area; ties between scores contribute a diagonal."""
        fpr, tpr = self.fpr, self.tpr
        return float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))


def roc_curve(scores, labels) -> RocCurve:
    """Empirical ROC with one point per distinct score.

    The first point sits at threshold ``+inf`` (nothing predicted positive);
    each following point lowers the threshold to the next distinct score.
    """
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels).astype(bool)
    if scores.shape != labels.shape:
        raise ValueError("scores and labels differ in length")
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC needs both positive and negative labels")
    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    y = labels[order]
    tp = np.cumsum(y)
    fp = np.cumsum(~y)
    # last position of each run of equal scores
    last = np.flatnonzero(np.r_[s[1:] != s[:-1], True])
    points = [(0.0, 0.0, math.inf)]
    points += [(fp[i] / n_neg, tp[i] / n_pos, float(s[i])) for i in last]
    return RocCurve(tuple((float(a), float(b), float(c)) for a, b, c in points))


def roc_auc(scores, labels) -> float:
    return roc_curve(scores, labels).auc()


@dataclass(frozen=True)
class Trajectory:
    """Coverage-mode operating points; entry ``k`` uses the first ``k`` rules.

    Rates are taken with respect to the class the list characterizes: for a
    negative-direction list a "true positive" is a covered ``y = 0`` sample.
    """

    tpr: tuple[float, ...]
    fpr: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.tpr)

    def rows(self):
        """(k, tpr, fpr) for k = 1..K."""
        return [(k, self.tpr[k], self.fpr[k]) for k in range(1, len(self.tpr))]


def coverage_trajectory(dlist: DecisionList, data: Dataset,
                        direction: Optional[Direction] = None) -> Trajectory:
    direction = direction or dlist.direction or Direction.POSITIVE
    target = data.labels if direction is Direction.POSITIVE else ~data.labels
    n_target = int(target.sum())
    n_other = data.n - n_target
    region = assign(dlist, data)
    tpr, fpr = [], []
    for k in range(dlist.K + 1):
        fired = region <= k
        tpr.append(float((fired & target).sum() / n_target) if n_target else 0.0)
        fpr.append(float((fired & ~target).sum() / n_other) if n_other else 0.0)
    return Trajectory(tuple(tpr), tuple(fpr))
