"""Scenario files: JSON descriptions of a space, partition, Young function and multiplier."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidInput
from .measure import FiniteMeasureSpace, Partition
from .young import YoungFunction, young_from_dict

SCENARIO_SCHEMA = "lambertlab.scenario/1"
CHECK_NAMES = ("sandwich", "closed-range", "fredholm", "properties", "delta2")


def midpoint_grid(interval, n_points: int, symmetric: bool = False) -> FiniteMeasureSpace:
    """Midpoint grid on [a, b] with cell weight h = (b - a) / n_points.

    With symmetric=True the interval must be [-c, c] and n_points even; the
    points are +/-(i - 1/2) h, so none sits at 0.
    """
    a, b = map(float, interval)
    if not b > a or n_points < 1:
        raise InvalidInput("grid needs a < b and n_points >= 1")
    h = (b - a) / n_points
    if symmetric:
        if a != -b:
            raise InvalidInput("symmetric grid needs an interval [-c, c]")
        if n_points % 2:
            raise InvalidInput("symmetric grid needs an even number of points")
        half = (np.arange(1, n_points // 2 + 1) - 0.5) * h
        x = np.concatenate([-half[::-1], half])
    else:
        x = a + (np.arange(1, n_points + 1) - 0.5) * h
    return FiniteMeasureSpace(tuple(float(v) for v in x), np.full(n_points, h))


def symmetric_pairs(sp: FiniteMeasureSpace) -> Partition:
    """Blocks {x, -x} of a space whose points are numbers symmetric about 0."""
    x = np.asarray(sp.points, dtype=float)
    order = np.argsort(x)
    n = x.size
    if n % 2 or not np.allclose(x[order], -x[order][::-1], rtol=0, atol=1e-12 * max(1, abs(x).max())):
        raise InvalidInput("points are not symmetric about the origin")
    blocks = [(int(order[i]), int(order[n - 1 - i])) for i in range(n // 2)]
    return Partition(blocks, n=n)


@dataclass(frozen=True)
class Multiplier:
    """u(x) = poly(x) + sum a sin(k x) + sum a cos(k x), or explicit values."""

    poly: tuple = ()
    sin: tuple = ()
    cos: tuple = ()
    values: tuple | None = None

    @classmethod
    def from_dict(cls, d: dict) -> "Multiplier":
        if "values" in d:
            return cls(values=tuple(float(v) for v in d["values"]))
        terms = lambda key: tuple((float(a), float(k)) for a, k in d.get(key, []))
        return cls(tuple(float(c) for c in d.get("poly", [])), terms("sin"), terms("cos"))

    def to_dict(self) -> dict:
        if self.values is not None:
            return {"values": list(self.values)}
        return {"poly": list(self.poly), "sin": [list(t) for t in self.sin],
                "cos": [list(t) for t in self.cos]}

    def evaluate(self, sp: FiniteMeasureSpace) -> np.ndarray:
        if self.values is not None:
            return sp.check(self.values)
        try:
            x = np.asarray(sp.points, dtype=float)
        except (TypeError, ValueError):
            raise InvalidInput("expression multipliers need numeric point identifiers")
        u = np.polynomial.polynomial.polyval(x, self.poly) if self.poly else np.zeros_like(x)
        for a, k in self.sin:
            u = u + a * np.sin(k * x)
        for a, k in self.cos:
            u = u + a * np.cos(k * x)
        return sp.check(u)


@dataclass(frozen=True)
class Scenario:
    space: FiniteMeasureSpace
    partition: Partition
    young: YoungFunction
    multiplier: Multiplier
    checks: tuple = field(default_factory=tuple)
    name: str = ""

    @property
    def u(self) -> np.ndarray:
        return self.multiplier.evaluate(self.space)


def _space(d) -> FiniteMeasureSpace:
    if not isinstance(d, dict):
        raise InvalidInput("'space' must be an object")
    if "grid" in d:
        g = d["grid"]
        return midpoint_grid(g["interval"], int(g["n_points"]), bool(g.get("symmetric", False)))
    weights = d["weights"]
    points = d.get("points", list(range(len(weights))))
    return FiniteMeasureSpace(points, weights)


def _partition(d, sp: FiniteMeasureSpace) -> Partition:
    if d == "symmetric-pairs":
        return symmetric_pairs(sp)
    if d == "trivial":
        return Partition.trivial(sp.n)
    if d == "discrete":
        return Partition.discrete(sp.n)
    if isinstance(d, dict) and "blocks" in d:
        return Partition(d["blocks"], n=sp.n)
    if isinstance(d, dict) and "labels" in d:
        return Partition.from_labels(d["labels"])
    raise InvalidInput(f"unrecognized partition spec {d!r}")


def _checks(items) -> tuple:
    out = []
    for item in items:
        c = {"name": item} if isinstance(item, str) else dict(item)
        if c.get("name") not in CHECK_NAMES:
            raise InvalidInput(f"unknown check {c.get('name')!r}; expected one of {CHECK_NAMES}")
        out.append(c)
    return tuple(out)


def scenario_from_dict(d: dict) -> Scenario:
    if not isinstance(d, dict):
        raise InvalidInput("scenario must be a JSON object")
    schema = d.get("schema", SCENARIO_SCHEMA)
    if schema != SCENARIO_SCHEMA:
        raise InvalidInput(f"unsupported scenario schema {schema!r}")
    try:
        sp = _space(d["space"])
        part = _partition(d.get("partition", "trivial"), sp)
        phi = young_from_dict(d["young"])
        mult = Multiplier.from_dict(d["multiplier"])
        checks = _checks(d.get("checks", []))
    except KeyError as e:
        raise InvalidInput(f"scenario is missing field {e}") from None
    except (TypeError, ValueError) as e:
        if isinstance(e, InvalidInput):
            raise
        raise InvalidInput(f"malformed scenario: {e}") from None
    return Scenario(sp, part, phi, mult, checks, str(d.get("name", "")))


def load_scenario(path) -> Scenario:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise InvalidInput(f"{path}: invalid JSON ({e})") from None
    except OSError as e:
        raise InvalidInput(f"{path}: {e.strerror}") from None
    return scenario_from_dict(data)
