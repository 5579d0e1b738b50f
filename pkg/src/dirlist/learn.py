"""Directed greedy and beam-search learners for decision lists.

Candidate conditions are every conjunction of up to ``max_depth`` positive
literals.  At each step the learner scores the list obtained by appending a
candidate (training log-likelihood, smoothed probabilities, the uncovered
rows folded into the default region) and keeps only candidates that

* cover at least ``min_coverage`` rows of the current remainder, and
* for a directed search, point in the requested direction: the raw positive
  rate of the newly covered rows is at least (positive) or at most
  (negative) the raw rate of the rows still uncovered afterwards.

Scores within ``tol`` of each other are treated as ties and resolved towards
the earlier candidate in enumeration order (shallower first, then
lexicographically smaller literals), so the result never depends on the
order in which candidates happen to be evaluated.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from itertools import combinations
from math import comb
from typing import Iterator, Optional, Sequence, Union

import numpy as np

from .core import (
    Condition,
    Dataset,
    DecisionList,
    Direction,
    bernoulli_log_likelihood,
    fit_probabilities,
    satisfies_direction,
    smoothed_probability,
)
from .evaluation import log_likelihood

log = logging.getLogger(__name__)

BOTH = "both"

# Largest n x C coverage matrix kept in memory (float32 cells).
_MATRIX_CELLS = 1 << 25
_CHUNK_CELLS = 1 << 22

_DIRECTION_ALIASES = {
    "positive": Direction.POSITIVE,
    "pos": Direction.POSITIVE,
    "negative": Direction.NEGATIVE,
    "neg": Direction.NEGATIVE,
    "both": BOTH,
    "none": None,
    "unrestricted": None,
}


class CandidateBudgetError(RuntimeError):
    """The candidate pool would exceed the configured budget."""


def parse_direction(value) -> Union[Direction, str, None]:
    if value is None or isinstance(value, Direction) or value == BOTH:
        return value
    try:
        return _DIRECTION_ALIASES[str(value).lower()]
    except KeyError:
        raise ValueError(f"unknown direction {value!r}") from None


@dataclass(frozen=True)
class LearnConfig:
    """Learner settings.

    ``direction`` is a :class:`Direction`, ``"both"`` (try each direction and
    keep the better list) or ``None`` for an unrestricted search.
    ``beam_width=1`` is plain hill climbing.
    """

    direction: Union[Direction, str, None] = Direction.POSITIVE
    max_rules: int = 10
    max_depth: int = 1
    min_depth: int = 1
    beam_width: int = 1
    alpha: float = 1.0
    min_coverage: int = 1
    seed: int = 0
    candidate_budget: int = 5_000_000
    tol: float = 1e-9

    def __post_init__(self):
        object.__setattr__(self, "direction", parse_direction(self.direction))
        if self.max_rules < 1:
            raise ValueError("max_rules must be at least 1")
        if not 1 <= self.min_depth <= self.max_depth:
            raise ValueError("need 1 <= min_depth <= max_depth")
        if self.beam_width < 1:
            raise ValueError("beam_width must be at least 1")
        if self.alpha < 0:
            raise ValueError("alpha must be non-negative")
        if self.min_coverage < 0:
            raise ValueError("min_coverage must be non-negative")


def count_conditions(d: int, max_depth: int, min_depth: int = 1) -> int:
    return sum(comb(d, k) for k in range(min_depth, max_depth + 1))


def enumerate_conditions(d: int, max_depth: int, min_depth: int = 1) -> Iterator[Condition]:
    """Conjunctions of ``min_depth..max_depth`` literals, shallow first, each depth in lexicographic order."""
    if d < 1:
        raise ValueError("need at least one feature")
    for k in range(min_depth, max_depth + 1):
        for lits in combinations(range(d), k):
            yield Condition(lits)


class CandidatePool:
    """All conjunctions of ``min_depth..max_depth`` literals over ``features``.

    Candidates are indexed in enumeration order.  Coverage counts over any
    subset of rows are computed in one matrix product when the full coverage
    matrix fits in memory, otherwise chunk by chunk.
    """

    def __init__(self, features: np.ndarray, max_depth: int, budget: int = 5_000_000,
                 min_depth: int = 1):
        self.features = np.asarray(features, dtype=bool)
        n, d = self.features.shape
        self.size = count_conditions(d, max_depth, min_depth)
        if self.size > budget:
            raise CandidateBudgetError(
                f"{self.size} candidate conditions exceed the budget of {budget}; lower max_depth"
            )
        self.blocks = [
            np.array(list(combinations(range(d), k)), dtype=np.intp).reshape(-1, k)
            for k in range(min_depth, max_depth + 1)
        ]
        self.offsets = np.cumsum([0] + [len(b) for b in self.blocks])
        self._matrix = None
        if n * self.size <= _MATRIX_CELLS:
            cols = [self.features[:, b].all(axis=2) for b in self.blocks]
            self._matrix = np.concatenate(cols, axis=1).astype(np.float32)

    def __len__(self) -> int:
        return self.size

    def literals(self, index: int) -> tuple[int, ...]:
        k = int(np.searchsorted(self.offsets, index, side="right")) - 1
        return tuple(int(j) for j in self.blocks[k][index - self.offsets[k]])

    def condition(self, index: int) -> Condition:
        return Condition(self.literals(index))

    def index_of(self, condition: Condition) -> int:
        lits = condition.literals
        k = next((i for i, b in enumerate(self.blocks) if b.shape[1] == len(lits)), None)
        if k is None:
            raise ValueError(f"no conditions of depth {len(lits)} in the pool")
        hits = np.flatnonzero((self.blocks[k] == np.array(lits)).all(axis=1))
        if not hits.size:
            raise ValueError(f"condition not in pool: {lits}")
        return int(self.offsets[k] + hits[0])

    def coverage(self, index: int) -> np.ndarray:
        if self._matrix is not None:
            return self._matrix[:, index] > 0.5
        return self.features[:, list(self.literals(index))].all(axis=1)

    def counts(self, rows: np.ndarray, labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Rows covered (and positives covered) per candidate, restricted to ``rows``."""
        positive_rows = rows & labels
        if self._matrix is not None:
            w = np.stack([rows, positive_rows]).astype(np.float32)
            out = np.rint(w @ self._matrix).astype(np.int64)
            return out[0], out[1]
        sub = self.features[rows]
        sub_y = labels[rows]
        cov_n = np.empty(self.size, dtype=np.int64)
        cov_pos = np.empty(self.size, dtype=np.int64)
        for k, block in enumerate(self.blocks):
            step = max(1, _CHUNK_CELLS // max(1, sub.shape[0] * block.shape[1]))
            for start in range(0, len(block), step):
                chunk = block[start:start + step]
                cov = sub[:, chunk].all(axis=2)
                lo = self.offsets[k] + start
                cov_n[lo:lo + len(chunk)] = cov.sum(axis=0)
                cov_pos[lo:lo + len(chunk)] = cov[sub_y].sum(axis=0)
        return cov_n, cov_pos


@dataclass(frozen=True, eq=False)
class _State:
    picks: tuple[int, ...]
    region: np.ndarray      # 1-based, len(picks) + 1 marks the remainder
    remainder: np.ndarray
    fixed_ll: float         # log-likelihood of the rule regions
    score: float            # fixed_ll plus the default region


def _region_ll(positives, sizes, alpha):
    return bernoulli_log_likelihood(positives, sizes, smoothed_probability(positives, sizes, alpha))


def select_preferred(scores: np.ndarray, limit: int, tol: float, key=None) -> list[int]:
    """Positions of up to ``limit`` entries, best first.

    Repeatedly takes the maximum of the remaining scores and, among entries
    within ``tol`` of it, the one with the smallest position.  ``key`` maps a
    position to a hashable identity; entries whose identity was already taken
    are skipped.
    """
    scores = np.asarray(scores, dtype=float)
    if not scores.size or limit < 1:
        return []
    order = np.argsort(-scores, kind="stable")
    neg_sorted = -scores[order]
    used = np.zeros(len(order), dtype=bool)
    seen = set()
    picked: list[int] = []
    head = 0
    while len(picked) < limit:
        while head < len(order) and used[head]:
            head += 1
        if head == len(order):
            break
        end = int(np.searchsorted(neg_sorted, neg_sorted[head] + tol, side="right"))
        window = np.flatnonzero(~used[head:end]) + head
        slot = window[np.argmin(order[window])]
        used[slot] = True
        pos = int(order[slot])
        if key is not None:
            ident = key(pos)
            if ident in seen:
                continue
            seen.add(ident)
        picked.append(pos)
    return picked


class _Search:
    def __init__(self, data: Dataset, config: LearnConfig, pool: Optional[CandidatePool] = None):
        if config.direction == BOTH:
            raise ValueError("resolve 'both' before searching a single direction")
        self.data = data
        self.config = config
        self.labels = data.labels
        self.pool = pool if pool is not None else CandidatePool(data.features, config.max_depth, config.candidate_budget, config.min_depth)
        self.min_cov = max(1, config.min_coverage)

    def initial(self) -> _State:
        n = self.data.n
        pos = int(self.labels.sum())
        score = float(_region_ll(pos, n, self.config.alpha))
        return _State((), np.ones(n, dtype=np.int64), np.ones(n, dtype=bool), 0.0, score)

    def extensions(self, state: _State) -> tuple[np.ndarray, np.ndarray]:
        """Scores of every one-rule extension and the mask of admissible ones."""
        rem = state.remainder
        rem_n = int(rem.sum())
        rem_pos = int((rem & self.labels).sum())
        cov_n, cov_pos = self.pool.counts(rem, self.labels)
        rest_n = rem_n - cov_n
        rest_pos = rem_pos - cov_pos
        alpha = self.config.alpha
        scores = state.fixed_ll + _region_ll(cov_pos, cov_n, alpha) + _region_ll(rest_pos, rest_n, alpha)
        ok = cov_n >= self.min_cov
        if self.config.direction is not None:
            ok &= satisfies_direction(cov_pos, cov_n, rest_pos, rest_n, self.config.direction)
        ok &= scores > state.score + self.config.tol
        return scores, ok

    def extend(self, state: _State, index: int, score: float) -> _State:
        k = len(state.picks) + 1
        hit = state.remainder & self.pool.coverage(index)
        remainder = state.remainder & ~hit
        region = state.region.copy()
        region[remainder] = k + 1
        region[hit] = k
        n_hit = int(hit.sum())
        pos_hit = int((hit & self.labels).sum())
        fixed = state.fixed_ll + float(_region_ll(pos_hit, n_hit, self.config.alpha))
        return _State(state.picks + (index,), region, remainder, fixed, float(score))

    def to_list(self, state: _State) -> DecisionList:
        conds = [self.pool.condition(i) for i in state.picks]
        direction = self.config.direction if isinstance(self.config.direction, Direction) else None
        return fit_probabilities(conds, self.data, self.config.alpha, direction)

    def state_for(self, prefix: Sequence[Condition]) -> _State:
        state = self.initial()
        for cond in prefix:
            idx = self.pool.index_of(cond)
            hit = state.remainder & self.pool.coverage(idx)
            rest = state.remainder & ~hit
            a = self.config.alpha
            score = (state.fixed_ll
                     + float(_region_ll(int((hit & self.labels).sum()), int(hit.sum()), a))
                     + float(_region_ll(int((rest & self.labels).sum()), int(rest.sum()), a)))
            state = self.extend(state, idx, score)
        return state

    def step(self, state: _State) -> Optional[tuple[int, float]]:
        scores, ok = self.extensions(state)
        idx = np.flatnonzero(ok)
        if not idx.size:
            return None
        best = int(idx[select_preferred(scores[idx], 1, self.config.tol)[0]])
        return best, float(scores[best])


def score_extension(
    prefix: Sequence[Condition],
    candidate: Condition,
    data: Dataset,
    alpha: float = 1.0,
    min_coverage: int = 1,
) -> Optional[float]:
    """Training log-likelihood after appending ``candidate`` to ``prefix``.

    Returns ``None`` when the candidate covers fewer than
    ``max(1, min_coverage)`` rows of the prefix's remainder.
    """
    remainder = np.ones(data.n, dtype=bool)
    for cond in prefix:
        remainder &= ~cond.covers(data.features)
    hit = remainder & candidate.covers(data.features)
    if hit.sum() < max(1, min_coverage):
        return None
    dlist = fit_probabilities(list(prefix) + [candidate], data, alpha)
    return log_likelihood(dlist, data)


def greedy_step(
    prefix: Sequence[Condition],
    data: Dataset,
    config: LearnConfig,
    pool: Optional[CandidatePool] = None,
) -> Optional[Condition]:
    """Best admissible, strictly improving condition to append, or ``None``."""
    search = _Search(data, config, pool)
    found = search.step(search.state_for(prefix))
    return None if found is None else search.pool.condition(found[0])


def learn_greedy(data: Dataset, config: LearnConfig, pool: Optional[CandidatePool] = None) -> DecisionList:
    search = _Search(data, config, pool)
    state = search.initial()
    while len(state.picks) < config.max_rules and state.remainder.any():
        found = search.step(state)
        if found is None:
            break
        index, score = found
        state = search.extend(state, index, score)
        log.debug("rule %d: %s  ll=%.6f", len(state.picks), search.pool.literals(index), state.score)
    return search.to_list(state)


def learn_beam(data: Dataset, config: LearnConfig, pool: Optional[CandidatePool] = None) -> DecisionList:
    """Level-synchronous beam search keeping ``config.beam_width`` lists.

    Lists inducing the same ordered partition of the training rows are
    duplicates; only the preferred one survives.  The best list seen at any
    level is returned, shorter lists winning ties.
    """
    search = _Search(data, config, pool)
    beam = [search.initial()]
    best = beam[0]
    tol = config.tol
    for _ in range(config.max_rules):
        parents, cands, scores = [], [], []
        for rank, state in enumerate(beam):
            s, ok = search.extensions(state)
            idx = np.flatnonzero(ok)
            parents.append(np.full(idx.size, rank, dtype=np.intp))
            cands.append(idx)
            scores.append(s[idx])
        parents = np.concatenate(parents)
        cands = np.concatenate(cands)
        scores = np.concatenate(scores)
        if not scores.size:
            break
        children: dict[int, _State] = {}

        def identity(pos: int) -> bytes:
            child = search.extend(beam[parents[pos]], int(cands[pos]), scores[pos])
            children[pos] = child
            return child.region.tobytes()

        picked = select_preferred(scores, config.beam_width, tol, key=identity)
        beam = [children[pos] for pos in picked]
        if beam[0].score > best.score + tol:
            best = beam[0]
    return search.to_list(best)


def _learn_one(data: Dataset, config: LearnConfig, pool: Optional[CandidatePool] = None) -> DecisionList:
    if config.beam_width > 1:
        return learn_beam(data, config, pool)
    return learn_greedy(data, config, pool)


def learn_each_direction(data: Dataset, config: LearnConfig) -> dict[Direction, DecisionList]:
    pool = CandidatePool(data.features, config.max_depth, config.candidate_budget, config.min_depth)
    return {
        direction: _learn_one(data, replace(config, direction=direction), pool)
        for direction in (Direction.POSITIVE, Direction.NEGATIVE)
    }


def learn_both_directions(data: Dataset, config: LearnConfig) -> DecisionList:
    """Learn in each direction and keep the better list (positive on ties)."""
    lists = learn_each_direction(data, config)
    pos, neg = lists[Direction.POSITIVE], lists[Direction.NEGATIVE]
    if log_likelihood(neg, data) > log_likelihood(pos, data) + config.tol:
        return neg
    return pos


def learn(data: Dataset, config: LearnConfig) -> DecisionList:
    if config.direction == BOTH:
        return learn_both_directions(data, config)
    return _learn_one(data, config)
