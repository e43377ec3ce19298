"""Losses on a finite label alphabet and generalized-median aggregation."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from pathlib import Path
from typing import Hashable, Iterable, Sequence

from .hypothesis_space import InputError


@dataclass(frozen=True)
class LossFn:
    """A loss given by a table over a finite, ordered label alphabet.

    ``labels`` fixes the alphabet order, which is also the tie-break order of
    :func:`generalized_median`.  ``table[a][b]`` is the loss of predicting
    ``labels[a]`` when the truth is ``labels[b]``.
    """

    labels: tuple[Hashable, ...]
    table: tuple[tuple[Fraction, ...], ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        k = len(self.labels)
        if k == 0 or len(set(self.labels)) != k:
            raise InputError("loss alphabet must be non-empty and duplicate-free")
        if len(self.table) != k or any(len(row) != k for row in self.table):
            raise InputError(f"loss table must be {k}x{k}")
        table = tuple(tuple(Fraction(v) for v in row) for row in self.table)
        for a in range(k):
            if table[a][a] != 0:
                raise InputError(f"loss({self.labels[a]!r}, itself) must be 0")
            for b in range(k):
                if not 0 <= table[a][b] <= 1:
                    raise InputError("loss values must lie in [0, 1]")
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "_index", {y: i for i, y in enumerate(self.labels)})

    def __call__(self, y_pred, y_true) -> Fraction:
        try:
            return self.table[self._index[y_pred]][self._index[y_true]]
        except KeyError as exc:
            raise InputError(f"label {exc.args[0]!r} not in loss alphabet") from None

    def index(self, y) -> int:
        return self._index[y]


ZERO_ONE = LossFn((1, -1), ((0, 1), (1, 0)))


def zero_one(y, y_prime) -> int:
    return 0 if y == y_prime else 1


@dataclass(frozen=True)
class PseudometricWitness:
    symmetric: bool
    zero_diagonal: bool
    triangle_ok: bool
    violations: tuple[tuple, ...] = ()

    @property
    def ok(self) -> bool:
        return self.symmetric and self.zero_diagonal and self.triangle_ok


def validate_pseudometric(loss: LossFn | None = None, labels: Sequence | None = None) -> PseudometricWitness:
    """Exhaustively check symmetry, zero diagonal and every triangle triple.

    ``violations`` lists ``(a, b, c)`` with ``loss(a, c) > loss(a, b) + loss(b, c)``.
    """
    loss = ZERO_ONE if loss is None else loss
    labels = tuple(loss.labels if labels is None else labels)
    symmetric = all(loss(a, b) == loss(b, a) for a, b in product(labels, repeat=2))
    zero_diag = all(loss(a, a) == 0 for a in labels)
    violations = tuple(
        (a, b, c)
        for a, b, c in product(labels, repeat=3)
        if loss(a, c) > loss(a, b) + loss(b, c)
    )
    return PseudometricWitness(symmetric, zero_diag, not violations, violations)


def generalized_median(values: Iterable, loss: LossFn = ZERO_ONE):
    """Label of the alphabet minimizing the total loss to ``values``.

    Ties go to the label listed first in ``loss.labels``.
    """
    values = list(values)
    if not values:
        raise InputError("median of an empty multiset")
    best, best_total = None, None
    for cand in loss.labels:
        total = sum(loss(v, cand) for v in values)
        if best_total is None or total < best_total:
            best, best_total = cand, total
    return best


def load_loss_table(path: str | Path) -> LossFn:
    """Read a CSV loss matrix.

    The first row is a header naming the labels (``+1,-1,...``); each following
    row is one predicted label's losses against the header labels.  Entries
    may be fractions such as ``1/2``.
    """
    path = Path(path)
    if not path.is_file():
        raise InputError(f"loss table not found: {path}")
    with path.open(newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    if len(rows) < 2:
        raise InputError(f"loss table {path} needs a header and at least one row")
    labels = tuple(_label(tok) for tok in rows[0])
    try:
        table = tuple(tuple(Fraction(tok.strip()) for tok in r) for r in rows[1:])
    except (ValueError, ZeroDivisionError):
        raise InputError(f"non-numeric entry in {path}") from None
    return LossFn(labels, table)


def _label(tok: str):
    tok = tok.strip()
    try:
        return int(tok)
    except ValueError:
        return tok
