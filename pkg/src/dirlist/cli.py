"""Command-line interface: ``dirlist {discretize,train,eval,simulate,dataset}``.

Exit codes: 0 success, 2 input error, 3 candidate budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
from typing import Optional, Sequence

from . import datasets
from .core import Direction, assign, fit_probabilities, predict_proba, remainder_rates
from .discretize import (
    CATEGORICAL,
    DEFAULT_LEVELS,
    NUMERIC,
    BinningSpec,
    InputError,
    RawTable,
    binarize,
    fit_quantile_bins,
)
from .evaluation import accuracy, coverage_trajectory, log_likelihood, roc_curve
from .learn import BOTH, CandidateBudgetError, LearnConfig, learn, learn_each_direction
from .modelio import LABEL_COLUMN, Model, read_dataset, write_dataset
from .synth import FAMILIES, SimConfig, SimResult, run_simulation, summarize

EXIT_INPUT = 2
EXIT_BUDGET = 3

_LEVEL_HELP = ", ".join(f"{q:g}" for q in DEFAULT_LEVELS)


def _fmt(x: float) -> str:
    return "nan" if x is None or (isinstance(x, float) and math.isnan(x)) else f"{x:.6f}"


def _rate(x: Optional[float]) -> str:
    return "empty" if x is None else f"{x:.4f}"


def cmd_discretize(args) -> int:
    kinds = {c: NUMERIC for c in args.numeric} | {c: CATEGORICAL for c in args.categorical}
    if args.spec_in:
        spec = BinningSpec.load(args.spec_in)
        kinds = {c: NUMERIC for c in spec.thresholds} | {c: CATEGORICAL for c in spec.categories} | kinds
    table = RawTable.from_csv(args.input, args.label, args.positive, kinds)
    if not args.spec_in:
        spec = fit_quantile_bins(table, args.levels)
    data = binarize(table, spec)
    write_dataset(args.out, data)
    if args.spec_out:
        spec.save(args.spec_out)
    print(f"rows: {data.n}")
    print(f"binary features: {data.d}")
    return 0


def _step_log(dlist, data, alpha, out) -> None:
    region = assign(dlist, data)
    rates = remainder_rates(dlist, data)
    for k, cond in enumerate(dlist.conditions, start=1):
        hit = region == k
        p_k = float(data.labels[hit].mean()) if hit.any() else None
        prefix_ll = log_likelihood(fit_probabilities(dlist.conditions[:k], data, alpha), data)
        print(f"step {k}: {cond.describe(data.feature_names)}  p_k={_rate(p_k)}  "
              f"p_rest={_rate(rates[k])}  train_ll={_fmt(prefix_ll)}", file=out)


def cmd_train(args) -> int:
    data = read_dataset(args.data, args.label)
    config = LearnConfig(direction=args.direction, max_rules=args.max_rules, max_depth=args.max_depth,
                         min_depth=args.min_depth, beam_width=args.beam, alpha=args.alpha,
                         min_coverage=args.min_coverage, candidate_budget=args.budget)
    if config.direction == BOTH:
        lists = learn_each_direction(data, config)
        lls = {d: log_likelihood(l, data) for d, l in lists.items()}
        for d in (Direction.POSITIVE, Direction.NEGATIVE):
            print(f"train_ll[{d.value}]: {_fmt(lls[d])}")
        chosen = Direction.NEGATIVE if lls[Direction.NEGATIVE] > lls[Direction.POSITIVE] + config.tol \
            else Direction.POSITIVE
        dlist = lists[chosen]
        print(f"selected direction: {chosen.value}")
    else:
        dlist = learn(data, config)
    if not args.quiet:
        _step_log(dlist, data, config.alpha, sys.stdout)
    Model.from_list(dlist, data.feature_names, config.alpha).save(args.out)
    print(f"rules: {dlist.K}")
    print(f"train_ll: {_fmt(log_likelihood(dlist, data))}")
    print(f"train_accuracy: {accuracy(dlist, data):.6f}")
    return 0


def cmd_eval(args) -> int:
    model = Model.load(args.model)
    data = read_dataset(args.data, args.label)
    dlist = model.bind(data)
    scores = predict_proba(dlist, data)
    print(f"log_likelihood: {_fmt(log_likelihood(dlist, data))}")
    print(f"accuracy: {accuracy(dlist, data):.6f}")
    two_classes = 0 < data.labels.sum() < data.n
    curve = roc_curve(scores, data.labels) if two_classes else None
    print(f"auc: {_fmt(curve.auc()) if curve else 'nan'}")
    if args.roc:
        if curve is None:
            raise InputError("ROC needs both classes in the dataset")
        with open(args.roc, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["threshold", "fpr", "tpr"])
            w.writerows([repr(t), repr(f), repr(p)] for f, p, t in curve.points)
    if args.trajectory:
        traj = coverage_trajectory(dlist, data)
        with open(args.trajectory, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["k", "tpr", "fpr"])
            w.writerows([k, repr(t), repr(f)] for k, t, f in traj.rows())
    return 0


def cmd_simulate(args) -> int:
    families = FAMILIES if args.family == "both" else (args.family,)
    results: list[SimResult] = []
    for family in families:
        config = SimConfig(runs=args.runs, n_train=args.n_train, n_test=args.n_test, K=args.k, d=args.d,
                           family=family, feature_prob=args.feature_prob, alpha=args.alpha, seed=args.seed)
        results += run_simulation(config)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SimResult.CSV_HEADER)
        w.writerows(r.csv_row() for r in results)
    for family in families:
        s = summarize([r.ratio for r in results if r.family == family])
        print(f"{family}: runs={s['count']} q1={_fmt(s['q1'])} median={_fmt(s['median'])} q3={_fmt(s['q3'])}")
    failed = [r for r in results if r.error]
    for r in failed:
        print(f"run {r.run} ({r.family}) failed: {r.error}", file=sys.stderr)
    return 0


def cmd_dataset(args) -> int:
    data = datasets.tic_tac_toe() if args.name == "tictactoe" else datasets.titanic()
    write_dataset(args.out, data)
    print(f"rows: {data.n}")
    print(f"binary features: {data.d}")
    return 0


def _levels(text: str):
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad level list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dirlist", description="Directional decision lists.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("discretize", help="binarize a raw CSV with empirical-quantile bins")
    p.add_argument("input")
    p.add_argument("--label", required=True, help="name of the label column")
    p.add_argument("--positive", help="label value mapped to 1 (default: labels must be 0/1)")
    p.add_argument("--levels", type=_levels, default=DEFAULT_LEVELS,
                   help=f"comma-separated quantile levels (default {_LEVEL_HELP}: bins <1%%, <5%%, <10%%, "
                        "<25%%, [25%%,75%%], >75%%, >90%%, >95%%, >99%%)")
    p.add_argument("--numeric", nargs="*", default=[], metavar="COL", help="force columns numeric")
    p.add_argument("--categorical", nargs="*", default=[], metavar="COL", help="force columns categorical")
    p.add_argument("--spec-in", help="apply this saved binning spec instead of fitting one")
    p.add_argument("--spec-out", help="write the fitted binning spec here")
    p.add_argument("--out", required=True, help="binary dataset CSV to write")
    p.set_defaults(func=cmd_discretize)

    p = sub.add_parser("train", help="learn a decision list")
    p.add_argument("data")
    p.add_argument("--out", required=True, help="model file to write")
    p.add_argument("--label", default=LABEL_COLUMN)
    p.add_argument("--direction", choices=["pos", "neg", "both", "none"], default="pos")
    p.add_argument("--max-rules", type=int, default=10)
    p.add_argument("--max-depth", type=int, default=1)
    p.add_argument("--min-depth", type=int, default=1)
    p.add_argument("--beam", type=int, default=1)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--min-coverage", type=int, default=1)
    p.add_argument("--budget", type=int, default=5_000_000, help="maximum number of candidate conditions")
    p.add_argument("--quiet", action="store_true", help="suppress the per-step log")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a model on a dataset")
    p.add_argument("model")
    p.add_argument("data")
    p.add_argument("--label", default=LABEL_COLUMN)
    p.add_argument("--roc", help="write ROC points (threshold, fpr, tpr) here")
    p.add_argument("--trajectory", help="write per-rule coverage points (k, tpr, fpr) here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("simulate", help="synthetic ground-truth study")
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--n-train", type=int, default=1000)
    p.add_argument("--n-test", type=int, default=10000)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--d", type=int, default=1000)
    p.add_argument("--family", choices=list(FAMILIES) + ["both"], default="both")
    p.add_argument("--feature-prob", type=float, default=0.5)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="per-run results CSV")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("dataset", help="write a bundled public dataset as a binary CSV")
    p.add_argument("name", choices=["tictactoe", "titanic"])
    p.add_argument("out")
    p.set_defaults(func=cmd_dataset)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CandidateBudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InputError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
