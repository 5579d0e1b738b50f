"""Brute-force reference computations used by the tests.

Everything here works sample by sample in plain Python (no numpy
vectorisation, no package internals beyond the Condition type) so it stays
an independent check on the learner.
"""

import math
from fractions import Fraction
from itertools import combinations

EPS = 1e-12


def covers(lits, row):
    return all(row[j] == 1 for j in lits)


def regions(conds, rows):
    out = []
    for row in rows:
        for k, lits in enumerate(conds, start=1):
            if covers(lits, row):
                out.append(k)
                break
        else:
            out.append(len(conds) + 1)
    return out


def list_log_likelihood(conds, rows, labels, alpha):
    """Refit region probabilities with smoothing and sum the log-likelihood."""
    reg = regions(conds, rows)
    total = 0.0
    for k in range(1, len(conds) + 2):
        ys = [y for r, y in zip(reg, labels) if r == k]
        if not ys:
            continue
        p = (sum(ys) + alpha) / (len(ys) + 2 * alpha) if (len(ys) + 2 * alpha) else 0.5
        p = min(max(p, EPS), 1 - EPS)
        for y in ys:
            total += math.log(p) if y else math.log(1 - p)
    return total


def all_conditions(d, max_depth, min_depth=1):
    return [lits for k in range(min_depth, max_depth + 1) for lits in combinations(range(d), k)]


def eligible(prefix, lits, rows, labels, direction, min_coverage=1):
    """Coverage floor and (for 'positive'/'negative') the raw-rate constraint."""
    rem = [i for i, row in enumerate(rows) if not any(covers(c, row) for c in prefix)]
    hit = [i for i in rem if covers(lits, rows[i])]
    rest = [i for i in rem if i not in set(hit)]
    if len(hit) < max(1, min_coverage):
        return False
    if direction is None or not rest:
        return True
    p_hit = Fraction(sum(labels[i] for i in hit), len(hit))
    p_rest = Fraction(sum(labels[i] for i in rest), len(rest))
    return p_hit >= p_rest if direction == "positive" else p_hit <= p_rest


def best_step(prefix, rows, labels, direction, max_depth, alpha, min_coverage=1, tol=1e-9, min_depth=1):
    """Constrained argmax over every condition; None if nothing improves."""
    base = list_log_likelihood(prefix, rows, labels, alpha)
    scored = []
    for lits in all_conditions(len(rows[0]), max_depth, min_depth):
        if not eligible(prefix, lits, rows, labels, direction, min_coverage):
            continue
        s = list_log_likelihood(list(prefix) + [lits], rows, labels, alpha)
        if s > base + tol:
            scored.append((s, lits))
    if not scored:
        return None
    top = max(s for s, _ in scored)
    # enumeration order already is (depth, lexicographic)
    return next(lits for s, lits in scored if s >= top - tol)


def brute_force_best_list(rows, labels, direction, max_depth, max_rules, alpha):
    """Best training log-likelihood over every admissible list of up to max_rules rules."""
    conds = all_conditions(len(rows[0]), max_depth)
    best = list_log_likelihood([], rows, labels, alpha)

    def grow(prefix):
        nonlocal best
        if len(prefix) == max_rules:
            return
        for lits in conds:
            if eligible(prefix, lits, rows, labels, direction):
                nxt = prefix + [lits]
                best = max(best, list_log_likelihood(nxt, rows, labels, alpha))
                grow(nxt)

    grow([])
    return best
