"""Two public benchmark tables, rebuilt without downloading.

* Tic-tac-toe endgame: every board where the game has ended (a line of three
  or a full board) reachable with X moving first.  That is exactly the 958
  rows of the UCI file (626 X wins); row order here is lexicographic.
* Titanic (Dawson, 1995): the 2,201 passengers expanded from the standard
  class x age x sex x survived contingency table.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .core import Dataset
from .discretize import CATEGORICAL, RawTable, binarize, fit_quantile_bins

SQUARES = (
    "top-left", "top-middle", "top-right",
    "middle-left", "middle-middle", "middle-right",
    "bottom-left", "bottom-middle", "bottom-right",
)
MARKS = ("x", "o", "b")
LINES = ((0, 1, 2), (3, 4, 5), (6, 7, 8), (0, 3, 6), (1, 4, 7), (2, 5, 8), (0, 4, 8), (2, 4, 6))


def _wins(board, mark) -> bool:
    return any(all(board[i] == mark for i in line) for line in LINES)


@lru_cache(maxsize=1)
def tic_tac_toe_boards() -> tuple[tuple[str, ...], ...]:
    finished = set()
    board = ["b"] * 9

    def play(turn):
        if _wins(board, "x") or _wins(board, "o") or "b" not in board:
            finished.add(tuple(board))
            return
        for i in range(9):
            if board[i] == "b":
                board[i] = turn
                play("o" if turn == "x" else "x")
                board[i] = "b"

    play("x")
    return tuple(sorted(finished))


def tic_tac_toe() -> Dataset:
    """27 indicators ``<square>=<mark>``; label 1 iff X has a line of three."""
    boards = tic_tac_toe_boards()
    X = np.array([[b[i] == m for i in range(9) for m in MARKS] for b in boards])
    y = np.array([_wins(b, "x") for b in boards])
    names = tuple(f"{sq}={m}" for sq in SQUARES for m in MARKS)
    return Dataset(X, y, names)


def x_line_conditions() -> list[tuple[int, ...]]:
    """Literal tuples of the eight three-X lines in :func:`tic_tac_toe` indexing."""
    return [tuple(3 * i for i in line) for line in LINES]


# (class, age, sex) -> (died, survived)
TITANIC_COUNTS = {
    ("1st", "child", "male"): (0, 5),
    ("2nd", "child", "male"): (0, 11),
    ("3rd", "child", "male"): (35, 13),
    ("crew", "child", "male"): (0, 0),
    ("1st", "child", "female"): (0, 1),
    ("2nd", "child", "female"): (0, 13),
    ("3rd", "child", "female"): (17, 14),
    ("crew", "child", "female"): (0, 0),
    ("1st", "adult", "male"): (118, 57),
    ("2nd", "adult", "male"): (154, 14),
    ("3rd", "adult", "male"): (387, 75),
    ("crew", "adult", "male"): (670, 192),
    ("1st", "adult", "female"): (4, 140),
    ("2nd", "adult", "female"): (13, 80),
    ("3rd", "adult", "female"): (89, 76),
    ("crew", "adult", "female"): (3, 20),
}


def titanic_table() -> RawTable:
    """Categorical columns ``class``, ``age``, ``sex``; label 1 = survived."""
    rows = []
    for (cls, age, sex), (died, survived) in TITANIC_COUNTS.items():
        rows += [(cls, age, sex, False)] * died
        rows += [(cls, age, sex, True)] * survived
    columns = {
        name: np.array([r[j] for r in rows], dtype=object)
        for j, name in enumerate(("class", "age", "sex"))
    }
    kinds = dict.fromkeys(columns, CATEGORICAL)
    return RawTable(columns, kinds, np.array([r[3] for r in rows]), "survived")


def titanic() -> Dataset:
    """Eight indicators ``class=...``, ``age=...``, ``sex=...``."""
    table = titanic_table()
    return binarize(table, fit_quantile_bins(table))
