"""Finite hypothesis classes over an indexed domain.

Points of a domain of size ``m`` are the integers ``0..m-1`` and labels are
``+1`` / ``-1``.  A hypothesis is stored as a tuple of ``m`` labels.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from functools import cached_property
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

Labeling = tuple[int, ...]


class Label(IntEnum):
    PLUS = 1
    MINUS = -1


LABELS = (Label.PLUS, Label.MINUS)


class InputError(ValueError):
    """Malformed user input (bad labels, out-of-domain points, bad files)."""


class ResourceLimitError(InputError):
    """Requested instance exceeds an enumeration guard."""


def check_labeling(bits: Iterable[int], length: int | None = None) -> Labeling:
    out = tuple(int(b) for b in bits)
    if not out:
        raise InputError("labeling must be non-empty")
    if any(b not in (1, -1) for b in out):
        raise InputError(f"labels must be +1 or -1, got {out}")
    if length is not None and len(out) != length:
        raise InputError(f"expected a labeling of length {length}, got {len(out)}")
    return out


def check_points(points: Iterable[int], domain_size: int) -> tuple[int, ...]:
    out = tuple(int(p) for p in np.asarray(points).ravel())
    if not out:
        raise InputError("sample must contain at least one point")
    for p in out:
        if not 0 <= p < domain_size:
            raise InputError(f"point {p} is outside the domain 0..{domain_size - 1}")
    return out


@dataclass(frozen=True, eq=False)
class HypothesisClass:
    """A finite, non-empty set of labelings of ``range(domain_size)``.

    Members are kept in the order given; that order is used for tie-breaking
    wherever a "first best hypothesis" is needed.
    """

    domain_size: int
    members: tuple[Labeling, ...]
    _key: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.domain_size < 1:
            raise InputError("domain size must be positive")
        members = tuple(check_labeling(h, self.domain_size) for h in self.members)
        if not members:
            raise InputError("hypothesis class must be non-empty")
        if len(set(members)) != len(members):
            raise InputError("hypothesis class contains duplicate members")
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "_key", (self.domain_size, members))

    def __eq__(self, other):
        if not isinstance(other, HypothesisClass):
            return NotImplemented
        return self._key == other._key

    @cached_property
    def _hash(self) -> int:
        return hash(self._key)

    def __hash__(self):
        return self._hash

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @cached_property
    def matrix(self) -> np.ndarray:
        """Members as a read-only ``(|H|, m)`` int8 array of +-1."""
        arr = np.array(self.members, dtype=np.int8)
        arr.setflags(write=False)
        return arr

    @classmethod
    def full(cls, m: int) -> "HypothesisClass":
        """All ``2**m`` labelings of an ``m``-point domain."""
        return cls(m, tuple(_all_labelings(m)))

    @classmethod
    def thresholds(cls, m: int) -> "HypothesisClass":
        """Thresholds on a line: ``(+..+ -..-)`` with ``0..m`` leading pluses."""
        return cls(m, tuple(tuple([1] * j + [-1] * (m - j)) for j in range(m, -1, -1)))


def index_to_labeling(v: int, n: int) -> Labeling:
    """Hypercube vertex ``v`` as a labeling: coordinate ``i`` is -1 iff bit ``i`` is set."""
    return tuple(-1 if v >> i & 1 else 1 for i in range(n))


def labeling_to_index(labeling: Sequence[int]) -> int:
    v = 0
    for i, b in enumerate(labeling):
        if b == -1:
            v |= 1 << i
    return v


def _all_labelings(n: int) -> list[Labeling]:
    return [index_to_labeling(v, n) for v in range(1 << n)]


def restrict(H: HypothesisClass, T: Sequence[int]) -> frozenset[Labeling]:
    """Distinct patterns ``(h(x_1), ..., h(x_n))`` over ``h`` in ``H``."""
    T = check_points(T, H.domain_size)
    cols = H.matrix[:, list(T)]
    return frozenset(map(tuple, np.unique(cols, axis=0).tolist()))


def shatters(H: HypothesisClass, points: Iterable[int]) -> bool:
    pts = sorted(set(int(p) for p in points))
    if not pts:
        return True
    for p in pts:
        if not 0 <= p < H.domain_size:
            raise InputError(f"point {p} is outside the domain")
    if len(H) < 2 ** len(pts):
        return False
    return len(np.unique(H.matrix[:, pts], axis=0)) == 2 ** len(pts)


def vc_dimension(H: HypothesisClass) -> int:
    """Largest shattered subset size, by exhaustive search over subsets.

    Sizes are tried in increasing order; since subsets of shattered sets are
    shattered, the search stops at the first size with no shattered subset.
    """
    best = 0
    max_size = min(H.domain_size, int(np.floor(np.log2(len(H)))))
    for size in range(1, max_size + 1):
        if not any(shatters(H, pts) for pts in combinations(range(H.domain_size), size)):
            break
        best = size
    return best


def random_class(rng: np.random.Generator, m: int, size: int) -> HypothesisClass:
    """Uniformly random class of ``size`` distinct labelings of ``m`` points."""
    size = min(size, 2**m)
    picks = rng.choice(2**m, size=size, replace=False)
    return HypothesisClass(m, tuple(index_to_labeling(int(v), m) for v in sorted(picks)))


# -- file formats ------------------------------------------------------------

def parse_label_token(tok: str) -> int:
    """CLI-boundary label parser: accepts ``+``/``-``, ``+1``/``-1`` and ``1``/``0``."""
    tok = tok.strip()
    if tok in ("+", "+1", "1"):
        return 1
    if tok in ("-", "-1", "0"):
        return -1
    raise InputError(f"cannot parse label {tok!r}")


def _parse_labeling_line(line: str) -> Labeling:
    parts = line.replace(",", " ").split()
    if len(parts) == 1 and all(c in "+-" for c in parts[0]):
        return tuple(1 if c == "+" else -1 for c in parts[0])
    if len(parts) == 1 and all(c in "01" for c in parts[0]):
        return tuple(1 if c == "1" else -1 for c in parts[0])
    return tuple(parse_label_token(p) for p in parts)


def _content_lines(text: str) -> list[str]:
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    return lines


def load_class(path: str | Path) -> HypothesisClass:
    """Read a class file: first line ``m``, then one labeling of length ``m`` per line.

    A labeling is written as a string over ``+``/``-`` (e.g. ``+-+``), as a
    0/1 string, or as whitespace/comma separated ``+1``/``-1`` tokens.
    """
    path = Path(path)
    if not path.is_file():
        raise InputError(f"class file not found: {path}")
    lines = _content_lines(path.read_text())
    if not lines:
        raise InputError(f"empty class file: {path}")
    try:
        m = int(lines[0])
    except ValueError:
        raise InputError(f"first line of {path} must be the domain size") from None
    members = tuple(_parse_labeling_line(line) for line in lines[1:])
    return HypothesisClass(m, members)


def dump_class(H: HypothesisClass) -> str:
    rows = ["".join("+" if b == 1 else "-" for b in h) for h in H.members]
    return "\n".join([str(H.domain_size), *rows]) + "\n"


def load_sample(path: str | Path, domain_size: int) -> tuple[tuple[int, ...], tuple[int, ...] | None]:
    """Read a sample file: one point index per line, optionally followed by a label.

    Returns ``(points, labels)`` where ``labels`` is ``None`` when no line
    carries a label.
    """
    path = Path(path)
    if not path.is_file():
        raise InputError(f"sample file not found: {path}")
    points, labels = [], []
    for line in _content_lines(path.read_text()):
        parts = line.replace(",", " ").split()
        try:
            points.append(int(parts[0]))
        except ValueError:
            raise InputError(f"bad point index {parts[0]!r} in {path}") from None
        if len(parts) > 1:
            labels.append(parse_label_token(parts[1]))
    points = check_points(points, domain_size)
    if labels and len(labels) != len(points):
        raise InputError("either every sample line carries a label or none does")
    return points, (tuple(labels) if labels else None)
