"""Finite unions of closed intervals on the real line."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .errors import DomainError

__all__ = ["IntervalUnion"]


def _merge(pairs: Iterable[tuple[float, float]]) -> tuple[tuple[float, float], ...]:
    items = sorted((float(l), float(r)) for l, r in pairs)
    out: list[list[float]] = []
    for l, r in items:
        if math.isnan(l) or math.isnan(r) or l > r:
            raise DomainError(f"invalid interval [{l}, {r}]")
        if out and l <= out[-1][1]:
            out[-1][1] = max(out[-1][1], r)
        else:
            out.append([l, r])
    return tuple((l, r) for l, r in out)


@dataclass(frozen=True)
class IntervalUnion:
    """Sorted, strictly disjoint closed intervals [l_i, r_i].

    Endpoints may be infinite. Build through ``from_pairs`` to merge
    overlapping or touching input; the constructor validates only.
    """

    components: tuple[tuple[float, float], ...] = ()

    def __post_init__(self) -> None:
        comps = tuple((float(l), float(r)) for l, r in self.components)
        for l, r in comps:
            if math.isnan(l) or math.isnan(r) or l > r:
                raise DomainError(f"invalid interval [{l}, {r}]")
        for (_, r0), (l1, _) in zip(comps, comps[1:]):
            if not r0 < l1:
                raise DomainError("components must be sorted and strictly disjoint")
        object.__setattr__(self, "components", comps)

    @classmethod
    def from_pairs(cls, pairs: Iterable) -> "IntervalUnion":
        return cls(_merge(pairs))

    @classmethod
    def interval(cls, lo: float, hi: float) -> "IntervalUnion":
        return cls(((lo, hi),))

    @classmethod
    def from_json(cls, text: str) -> "IntervalUnion":
        data = json.loads(text)
        if not isinstance(data, list) or any(not isinstance(p, list) or len(p) != 2 for p in data):
            raise DomainError("expected a JSON array of [lo, hi] pairs")
        return cls.from_pairs((_parse_num(l), _parse_num(r)) for l, r in data)

    def to_list(self) -> list[list[float]]:
        return [[l, r] for l, r in self.components]

    def to_json(self) -> str:
        return json.dumps([[_fmt(l), _fmt(r)] for l, r in self.components])

    def __iter__(self) -> Iterator[tuple[float, float]]:
        return iter(self.components)

    def __len__(self) -> int:
        return len(self.components)

    def __bool__(self) -> bool:
        return bool(self.components)

    @property
    def lengths(self) -> np.ndarray:
        return np.array([r - l for l, r in self.components])

    def length(self) -> float:
        return float(self.lengths.sum()) if self.components else 0.0

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=bool)
        for l, r in self.components:
            out |= (x >= l) & (x <= r)
        return out

    def union(self, other: "IntervalUnion") -> "IntervalUnion":
        return IntervalUnion.from_pairs(self.components + other.components)

    def intersect(self, lo: float, hi: float) -> "IntervalUnion":
        pairs = [(max(l, lo), min(r, hi)) for l, r in self.components if r >= lo and l <= hi]
        return IntervalUnion.from_pairs(pairs)

    def is_subset(self, other: "IntervalUnion", slack: float = 0.0) -> bool:
        """Every component of self lies inside one component of other (up to slack)."""
        for l, r in self.components:
            if not any(l >= lo - slack and r <= hi + slack for lo, hi in other.components):
                return False
        return True

    def covered_length(self, lo: float, hi: float) -> float:
        """Lebesgue measure of self intersected with [lo, hi]."""
        total = 0.0
        for l, r in self.components:
            a, b = max(l, lo), min(r, hi)
            if b > a:
                total += b - a
        return total


def _parse_num(v) -> float:
    if isinstance(v, str):
        s = v.strip().lower()
        if s in ("inf", "+inf", "infinity"):
            return math.inf
        if s in ("-inf", "-infinity"):
            return -math.inf
        return float(s)
    return float(v)


def _fmt(v: float):
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return float(f"{v:.9g}")
