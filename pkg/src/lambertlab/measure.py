"""Finite measure spaces, partitions (sub-sigma-algebras) and conditional expectation.

Functions on a space are plain 1-D float arrays aligned with the point order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidInput


@dataclass(frozen=True)
class FiniteMeasureSpace:
    points: tuple
    weights: np.ndarray = field(repr=False)

    def __init__(self, points: Iterable, weights: Iterable[float]):
        points = tuple(points)
        w = np.array(list(weights) if not isinstance(weights, np.ndarray) else weights,
                     dtype=float)
        if w.ndim != 1 or len(points) != w.size:
            raise InvalidInput("points and weights must have the same length")
        if len(set(points)) != len(points):
            raise InvalidInput("point identifiers must be unique")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise InvalidInput("weights must be strictly positive and finite")
        w.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_weights(cls, weights: Iterable[float]) -> "FiniteMeasureSpace":
        w = np.asarray(list(weights), dtype=float)
        return cls(range(w.size), w)

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def total(self) -> float:
        return float(self.weights.sum())

    def measure(self, idx: Iterable[int]) -> float:
        idx = np.fromiter(idx, dtype=int)
        return float(self.weights[idx].sum()) if idx.size else 0.0

    def check(self, f) -> np.ndarray:
        """Coerce `f` to a finite float array of the right length."""
        arr = np.asarray(f, dtype=float)
        if arr.shape != (self.n,):
            raise InvalidInput(f"function has shape {arr.shape}, space has {self.n} points")
        if not np.all(np.isfinite(arr)):
            raise InvalidInput("function values must be finite")
        return arr

    def __eq__(self, other):
        if not isinstance(other, FiniteMeasureSpace):
            return NotImplemented
        return self.points == other.points and np.array_equal(self.weights, other.weights)

    def __hash__(self):
        return hash((self.points, self.weights.tobytes()))


@dataclass(frozen=True)
class Partition:
    """A partition of point indices into atoms; generates the sub-sigma-algebra."""

    blocks: tuple
    labels: np.ndarray = field(repr=False, compare=False)

    def __init__(self, blocks: Iterable[Iterable[int]], n: int | None = None):
        blocks = tuple(tuple(sorted(int(i) for i in b)) for b in blocks)
        if any(len(b) == 0 for b in blocks):
            raise InvalidInput("partition blocks must be nonempty")
        flat = [i for b in blocks for i in b]
        if len(flat) != len(set(flat)):
            raise InvalidInput("partition blocks must be pairwise disjoint")
        size = len(flat) if n is None else n
        if sorted(flat) != list(range(size)):
            raise InvalidInput("partition blocks must cover every point exactly once")
        labels = np.empty(size, dtype=np.intp)
        for k, b in enumerate(blocks):
            labels[list(b)] = k
        labels.setflags(write=False)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "Partition":
        groups: dict[int, list[int]] = {}
        for i, lab in enumerate(labels):
            groups.setdefault(int(lab), []).append(i)
        return cls([groups[k] for k in sorted(groups)], n=len(labels))

    @classmethod
    def trivial(cls, n: int) -> "Partition":
        return cls([range(n)], n=n)

    @classmethod
    def discrete(cls, n: int) -> "Partition":
        return cls([[i] for i in range(n)], n=n)

    @property
    def n(self) -> int:
        return self.labels.size

    def __len__(self):
        return len(self.blocks)

    def is_measurable(self, f, tol: float = 0.0) -> bool:
        """True when `f` is constant on every block (to within `tol`)."""
        f = np.asarray(f, dtype=float)
        return all(np.ptp(f[list(b)]) <= tol for b in self.blocks)


def _consistent(f, part: Partition, sp: FiniteMeasureSpace) -> np.ndarray:
    if part.n != sp.n:
        raise InvalidInput(f"partition covers {part.n} points, space has {sp.n}")
    return sp.check(f)


def conditional_expectation(f, part: Partition, sp: FiniteMeasureSpace) -> np.ndarray:
    """Weighted mean of `f` over each block, spread back over the block."""
    f = _consistent(f, part, sp)
    k = len(part)
    mass = np.bincount(part.labels, weights=sp.weights, minlength=k)
    total = np.bincount(part.labels, weights=f * sp.weights, minlength=k)
    return (total / mass)[part.labels]


def essential_sup(f, sp: FiniteMeasureSpace) -> float:
    if sp.n == 0:
        raise InvalidInput("essential supremum over an empty space")
    return float(np.max(sp.check(f)))


def support(f, sp: FiniteMeasureSpace, tol: float = 0.0) -> frozenset:
    if tol < 0:
        raise InvalidInput("tol must be nonnegative")
    f = sp.check(f)
    return frozenset(int(i) for i in np.flatnonzero(np.abs(f) > tol))


def integrate(f, sp: FiniteMeasureSpace) -> float:
    return float(np.dot(sp.check(f), sp.weights))
