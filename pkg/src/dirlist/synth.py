"""Random ground-truth decision lists and the simulation study built on them.

Seeding: every random draw comes from numpy's PCG64 generator seeded with a
``SeedSequence`` over integer words.  Run ``r`` of a study with master seed
``m`` uses ``[m, r, 0]`` for the ground truth, ``[m, r, 1]`` for the
training sample and ``[m, r, 2]`` for the test sample.  The family is not
part of the seed, so the general and directional runs with the same index
share features, probability draws and data randomness; the directional
ground truth is the general one with its probabilities sorted.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .core import Condition, Dataset, DecisionList, Direction, Rule, assign_conditions
from .evaluation import ll_ratio, log_likelihood
from .learn import LearnConfig, learn

log = logging.getLogger(__name__)

GENERAL = "general"
DIRECTIONAL = "directional"
FAMILIES = (GENERAL, DIRECTIONAL)

Seed = Union[int, Sequence[int]]


@dataclass(frozen=True)
class GroundTruthSpec:
    dlist: DecisionList
    d: int
    feature_prob: float = 0.5
    family: str = GENERAL
    seed: Seed = 0

    @property
    def K(self) -> int:
        return self.dlist.K


def gen_ground_truth(seed: Seed, K: int, d: int, family: str = GENERAL,
                     feature_prob: float = 0.5) -> GroundTruthSpec:
    """K single-feature rules over distinct features, uniform probabilities.

    The directional family sorts all ``K + 1`` probabilities (default
    included) in decreasing order, which makes the list directional
    towards the positive class under its own generative model.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    if not 1 <= K <= d:
        raise ValueError(f"need 1 <= K <= d, got K={K}, d={d}")
    rng = np.random.default_rng(seed)
    feats = rng.choice(d, size=K, replace=False)
    probs = rng.uniform(0.0, 1.0, size=K + 1)
    direction = None
    if family == DIRECTIONAL:
        probs = np.sort(probs)[::-1]
        direction = Direction.POSITIVE
    rules = tuple(Rule(Condition((int(j),)), float(p)) for j, p in zip(feats, probs[:-1]))
    dlist = DecisionList(rules, float(probs[-1]), direction)
    return GroundTruthSpec(dlist, d, feature_prob, family, seed)


def sample_dataset(spec: GroundTruthSpec, n: int, seed: Seed) -> Dataset:
    if n < 1:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    X = rng.random((n, spec.d), dtype=np.float32) < spec.feature_prob
    region = assign_conditions(spec.dlist.conditions, X)
    p = spec.dlist.probabilities[region - 1]
    y = rng.random(n) < p
    return Dataset(X, y, tuple(f"f{j}" for j in range(spec.d)))


@dataclass(frozen=True)
class SimConfig:
    runs: int = 100
    n_train: int = 1000
    n_test: int = 10000
    K: int = 10
    d: int = 1000
    family: str = DIRECTIONAL
    feature_prob: float = 0.5
    alpha: float = 1.0
    min_coverage: int = 1
    seed: int = 0

    def __post_init__(self):
        for name in ("runs", "n_train", "n_test", "K", "d"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")

    def learn_config(self) -> LearnConfig:
        """Directed greedy for directional ground truths, unrestricted otherwise."""
        direction = Direction.POSITIVE if self.family == DIRECTIONAL else None
        return LearnConfig(direction=direction, max_rules=self.K, max_depth=1,
                           alpha=self.alpha, min_coverage=self.min_coverage)


@dataclass(frozen=True)
class SimResult:
    run: int
    family: str
    n_train: int
    ll_gt: float
    ll_learned: float
    ratio: float
    error: Optional[str] = None

    CSV_HEADER = ("run", "family", "n_train", "ll_gt", "ll_learned", "ratio")

    def csv_row(self) -> list[str]:
        return [str(self.run), self.family, str(self.n_train),
                repr(self.ll_gt), repr(self.ll_learned), repr(self.ratio)]


Learner = Callable[[Dataset, GroundTruthSpec], DecisionList]


def run_one(config: SimConfig, run: int, learner: Optional[Learner] = None) -> SimResult:
    spec = gen_ground_truth([config.seed, run, 0], config.K, config.d, config.family,
                            config.feature_prob)
    train = sample_dataset(spec, config.n_train, [config.seed, run, 1])
    test = sample_dataset(spec, config.n_test, [config.seed, run, 2])
    if learner is None:
        learned = learn(train, config.learn_config())
    else:
        learned = learner(train, spec)
    ll_gt = log_likelihood(spec.dlist, test)
    ll_learned = log_likelihood(learned, test)
    return SimResult(run, config.family, config.n_train, ll_gt, ll_learned,
                     ll_ratio(spec.dlist, learned, test))


def _guarded(config: SimConfig, run: int, learner: Optional[Learner]) -> SimResult:
    try:
        return run_one(config, run, learner)
    except Exception as exc:  # one bad run must not sink the study
        log.warning("run %d failed: %s", run, exc)
        return SimResult(run, config.family, config.n_train, math.nan, math.nan, math.nan,
                         error=f"{type(exc).__name__}: {exc}")


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("DIRLIST_THREADS", "1")))
    except ValueError:
        return 1


def run_simulation(config: SimConfig, learner: Optional[Learner] = None,
                   workers: Optional[int] = None) -> list[SimResult]:
    """One :class:`SimResult` per run, in run order.

    Failed runs carry ``nan`` values and an ``error`` message.
    """
    workers = workers or worker_count()
    runs = range(config.runs)
    if workers == 1:
        return [_guarded(config, r, learner) for r in runs]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(lambda r: _guarded(config, r, learner), runs))


def summarize(ratios: Sequence[float]) -> dict[str, float]:
    vals = np.asarray([r for r in ratios if not math.isnan(r)], dtype=float)
    if not vals.size:
        return {"count": 0, "q1": math.nan, "median": math.nan, "q3": math.nan}
    q1, med, q3 = np.quantile(vals, [0.25, 0.5, 0.75])
    return {"count": int(vals.size), "q1": float(q1), "median": float(med), "q3": float(q3)}
