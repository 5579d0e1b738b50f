"""Text formats: the model file and the binary dataset CSV.

A model file looks like::

    # directional decision list
    format 1
    direction positive
    alpha 0.0
    features 27
    feature 0 "top-left=x"
    feature 4 "top-middle=o"
    IF "top-left=x" AND "top-middle=o" THEN 0.75
    ELSE 0.25

``feature`` lines give the dataset column index and name of every feature a
rule uses.  Names are JSON string literals.  Probabilities are written with
17 significant digits, so parsing restores them bit for bit.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .core import Condition, Dataset, DecisionList, Direction, Rule
from .discretize import InputError

FORMAT_VERSION = 1
LABEL_COLUMN = "label"

_NAME = re.compile(r'"(?:[^"\\]|\\.)*"')
_RULE = re.compile(r"^(IF|ELSEIF)\s+(.*?)\s+THEN\s+(\S+)$")


def _prob(p: float) -> str:
    return format(float(p), ".17g")


@dataclass(frozen=True)
class Model:
    """A decision list plus what is needed to apply it to named columns."""

    dlist: DecisionList
    feature_names: dict[int, str]
    n_features: int
    alpha: float = 1.0

    @classmethod
    def from_list(cls, dlist: DecisionList, names: Sequence[str], alpha: float) -> "Model":
        used = sorted({j for c in dlist.conditions for j in c.literals})
        return cls(dlist, {j: names[j] for j in used}, len(names), float(alpha))

    def serialize(self) -> str:
        direction = self.dlist.direction.value if self.dlist.direction else "none"
        lines = [
            "# directional decision list",
            f"format {FORMAT_VERSION}",
            f"direction {direction}",
            f"alpha {self.alpha!r}",
            f"features {self.n_features}",
        ]
        lines += [f"feature {j} {json.dumps(name)}" for j, name in sorted(self.feature_names.items())]
        for k, rule in enumerate(self.dlist.rules):
            cond = " AND ".join(json.dumps(self.feature_names[j]) for j in rule.condition.literals)
            lines.append(f"{'IF' if k == 0 else 'ELSEIF'} {cond} THEN {_prob(rule.probability)}")
        lines.append(f"ELSE {_prob(self.dlist.default_probability)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> "Model":
        header: dict[str, str] = {}
        names: dict[int, str] = {}
        rules: list[Rule] = []
        default: Optional[float] = None
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                if line.startswith("feature "):
                    _, idx, name = line.split(" ", 2)
                    names[int(idx)] = json.loads(name)
                elif line.startswith(("IF ", "ELSEIF ")):
                    m = _RULE.match(line)
                    if m is None or (m.group(1) == "IF") != (not rules):
                        raise ValueError("malformed rule")
                    by_name = {v: j for j, v in names.items()}
                    lits = sorted(by_name[json.loads(tok)] for tok in _NAME.findall(m.group(2)))
                    rules.append(Rule(Condition(tuple(lits)), float(m.group(3))))
                elif line.startswith("ELSE "):
                    default = float(line.split()[1])
                else:
                    key, value = line.split(None, 1)
                    header[key] = value
            except (ValueError, KeyError) as exc:
                raise InputError(f"model line {lineno}: cannot parse {raw!r} ({exc})") from None
        if header.get("format") != str(FORMAT_VERSION):
            raise InputError(f"unsupported model format {header.get('format')!r}")
        if default is None:
            raise InputError("model has no ELSE line")
        direction = header.get("direction", "none")
        dlist = DecisionList(tuple(rules), default, None if direction == "none" else Direction(direction))
        return cls(dlist, names, int(header["features"]), float(header.get("alpha", "1.0")))

    def save(self, path) -> None:
        Path(path).write_text(self.serialize())

    @classmethod
    def load(cls, path) -> "Model":
        return cls.parse(Path(path).read_text())

    def bind(self, data: Dataset) -> DecisionList:
        """The list re-indexed onto ``data``'s columns, matched by name."""
        index = {name: j for j, name in enumerate(data.feature_names)}
        missing = sorted(set(self.feature_names.values()) - set(index))
        if missing:
            raise InputError(f"dataset lacks model features: {', '.join(missing)}")
        rules = tuple(
            Rule(Condition(tuple(sorted(index[self.feature_names[j]] for j in r.condition.literals))),
                 r.probability)
            for r in self.dlist.rules
        )
        return DecisionList(rules, self.dlist.default_probability, self.dlist.direction)


def write_dataset(path, data: Dataset, label: str = LABEL_COLUMN) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(data.feature_names) + [label])
        body = np.column_stack([data.features, data.labels]).astype(np.int8)
        writer.writerows(body.tolist())


def read_dataset(path, label: str = LABEL_COLUMN) -> Dataset:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"{path}: empty file") from None
        if label not in header:
            raise InputError(f"{path}: no label column {label!r}")
        rows, bad = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header) or any(v not in ("0", "1") for v in row):
                bad.append(lineno)
                continue
            rows.append(row)
    if bad:
        shown = ", ".join(map(str, bad[:20])) + (" ..." if len(bad) > 20 else "")
        raise InputError(f"{path}: rows are not 0/1 with {len(header)} fields: {shown}")
    if not rows:
        raise InputError(f"{path}: no data rows")
    body = np.array(rows, dtype=np.int8)
    j = header.index(label)
    keep = [i for i in range(len(header)) if i != j]
    return Dataset(body[:, keep], body[:, j], tuple(header[i] for i in keep))
