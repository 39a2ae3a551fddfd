"""Young functions: evaluation, derivative, inverse, complementary function, Delta_2 estimate.

Every catalog member is strictly increasing on [0, inf) so the inverse is a
genuine function. Evaluation is vectorized and always acts on |x|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidInput, NumericFailure, UnboundedConjugate

MAX_ITER = 400
MAX_DOUBLINGS = 1100


class YoungFunction:
    """Base class. Subclasses provide `_eval`, `_deriv` and `limiting_slope`."""

    kind: str = ""

    def __call__(self, x):
        ax = np.abs(np.asarray(x, dtype=float))
        out = self._eval(ax)
        return float(out) if np.ndim(out) == 0 else out

    def eval(self, x):
        return self(x)

    def derivative(self, x):
        """Right derivative on [0, inf)."""
        ax = np.asarray(x, dtype=float)
        if np.any(ax < 0):
            raise InvalidInput("derivative is defined for x >= 0")
        out = self._deriv(ax)
        return float(out) if np.ndim(out) == 0 else out

    @property
    def limiting_slope(self) -> float:
        return math.inf

    def inverse(self, y: float, tol: float = 1e-12) -> float:
        """x >= 0 with Phi(x) = y, by bisection on a doubling bracket."""
        y = float(y)
        if y < 0 or not math.isfinite(y):
            raise InvalidInput("inverse needs a finite y >= 0")
        if y == 0.0:
            return 0.0
        hi = 1.0
        for _ in range(MAX_DOUBLINGS):
            if self(hi) >= y:
                break
            hi *= 2.0
        else:
            raise NumericFailure(f"could not bracket Phi^-1({y})")
        lo = 0.0
        for _ in range(MAX_ITER):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if self(mid) < y:
                lo = mid
            else:
                hi = mid
        x = lo if abs(self(lo) - y) < abs(self(hi) - y) else hi
        if abs(self(x) - y) > tol * max(1.0, y):
            raise NumericFailure(f"Phi^-1({y}) residual {abs(self(x) - y):.3g} above tolerance")
        return x

    def complementary(self, y: float, tol: float = 1e-12) -> float:
        """Psi(y) = sup_{x >= 0} (x|y| - Phi(x))."""
        ay = abs(float(y))
        if ay == 0.0:
            return 0.0
        if ay > self.limiting_slope:
            raise UnboundedConjugate(f"|y|={ay} exceeds the limiting slope {self.limiting_slope}")
        x = self._conjugate_argmax(ay, tol)
        return max(0.0, x * ay - self(x))

    def _conjugate_argmax(self, ay: float, tol: float) -> float:
        # objective is concave with right derivative ay - Phi'(x)
        if self.derivative(0.0) >= ay:
            return 0.0
        hi = 1.0
        for _ in range(MAX_DOUBLINGS):
            if self.derivative(hi) >= ay:
                break
            hi *= 2.0
        else:
            raise NumericFailure(f"could not bracket the conjugate maximizer for y={ay}")
        lo = 0.0
        for _ in range(MAX_ITER):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if self.derivative(mid) < ay:
                lo = mid
            else:
                hi = mid
        return max((lo, hi), key=lambda x: x * ay - self(x))

    def delta2_estimate(self, x_max: float, n_grid: int = 200) -> float:
        """Largest Phi(2x)/Phi(x) on a log-spaced grid in (0, x_max]."""
        if x_max <= 0 or n_grid < 2:
            raise InvalidInput("need x_max > 0 and n_grid >= 2")
        xs = np.geomspace(x_max * 1e-6, x_max, n_grid)
        return float(np.max(self(2.0 * xs) / self(xs)))

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True, eq=True)
class Power(YoungFunction):
    """Phi(x) = |x|^p, p >= 1."""

    p: float = 2.0
    kind = "power"

    def __post_init__(self):
        if not (math.isfinite(self.p) and self.p >= 1):
            raise InvalidInput(f"Power needs p >= 1, got {self.p}")

    def _eval(self, ax):
        return ax**self.p

    def _deriv(self, ax):
        if self.p == 1:
            return np.ones_like(ax)
        return self.p * ax ** (self.p - 1)

    @property
    def limiting_slope(self) -> float:
        return 1.0 if self.p == 1 else math.inf

    def to_dict(self) -> dict:
        return {"kind": "power", "p": self.p}


# Taylor coefficients of (1+x)log(1+x) - x = sum_{k>=2} (-1)^k x^k / (k(k-1))
_ENTROPY_SERIES = np.array([(-1.0) ** k / (k * (k - 1)) for k in range(2, 12)])
_ENTROPY_SMALL = 1e-2


@dataclass(frozen=True, eq=True)
class Entropy(YoungFunction):
    """Phi(x) = (1+|x|) log(1+|x|) - |x|."""

    kind = "entropy"

    def _eval(self, ax):
        small = ax < _ENTROPY_SMALL
        with np.errstate(invalid="ignore"):
            direct = (1.0 + ax) * np.log1p(ax) - ax
        xs = np.where(small, ax, 0.0)
        series = np.zeros_like(xs)
        for c in _ENTROPY_SERIES[::-1]:
            series = (series + c) * xs
        series *= xs
        return np.where(small, series, direct)

    def _deriv(self, ax):
        return np.log1p(ax)

    def to_dict(self) -> dict:
        return {"kind": "entropy"}


@dataclass(frozen=True, eq=True)
class PiecewiseLinear(YoungFunction):
    """Convex piecewise-linear Phi with Phi' = slopes[i] on [breakpoints[i], breakpoints[i+1]).

    breakpoints[0] must be 0 and slopes[0] > 0, so Phi is strictly increasing.
    """

    breakpoints: tuple = (0.0,)
    slopes: tuple = (1.0,)
    kind = "plc"

    def __post_init__(self):
        b = tuple(float(v) for v in self.breakpoints)
        s = tuple(float(v) for v in self.slopes)
        object.__setattr__(self, "breakpoints", b)
        object.__setattr__(self, "slopes", s)
        if len(b) == 0 or len(b) != len(s):
            raise InvalidInput("breakpoints and slopes must be nonempty and of equal length")
        if b[0] != 0.0:
            raise InvalidInput("the first breakpoint must be 0")
        if any(b2 <= b1 for b1, b2 in zip(b, b[1:])):
            raise InvalidInput("breakpoints must be strictly increasing")
        if s[0] <= 0 or any(s2 < s1 for s1, s2 in zip(s, s[1:])):
            raise InvalidInput("slopes must be positive and nondecreasing")
        if not all(map(math.isfinite, b + s)):
            raise InvalidInput("breakpoints and slopes must be finite")
        knots = np.concatenate([[0.0], np.cumsum(np.diff(b) * np.array(s[:-1]))])
        object.__setattr__(self, "_knot_values", knots)

    def _segment(self, ax):
        return np.searchsorted(np.array(self.breakpoints), ax, side="right") - 1

    def _eval(self, ax):
        seg = self._segment(ax)
        b = np.array(self.breakpoints)[seg]
        return self._knot_values[seg] + np.array(self.slopes)[seg] * (ax - b)

    def _deriv(self, ax):
        return np.array(self.slopes)[self._segment(ax)]

    @property
    def limiting_slope(self) -> float:
        return self.slopes[-1]

    def _conjugate_argmax(self, ay, tol):
        # concave piecewise-linear objective peaks at a breakpoint
        b = np.array(self.breakpoints)
        vals = b * ay - self._knot_values
        return float(b[int(np.argmax(vals))])

    def to_dict(self) -> dict:
        return {"kind": "plc", "breakpoints": list(self.breakpoints), "slopes": list(self.slopes)}


def young_from_dict(spec: dict) -> YoungFunction:
    kind = spec.get("kind")
    if kind == "power":
        return Power(float(spec.get("p", 2.0)))
    if kind == "entropy":
        return Entropy()
    if kind == "plc":
        return PiecewiseLinear(tuple(spec["breakpoints"]), tuple(spec["slopes"]))
    raise InvalidInput(f"unknown Young function kind {kind!r}")


def conjugate_pair(phi: YoungFunction, tol: float = 1e-12):
    """(phi, psi) with psi a scalar evaluator of the complementary function."""
    return phi, lambda y: phi.complementary(y, tol)


def as_young(phi: YoungFunction | dict | Sequence) -> YoungFunction:
    if isinstance(phi, YoungFunction):
        return phi
    if isinstance(phi, dict):
        return young_from_dict(phi)
    raise InvalidInput(f"cannot interpret {phi!r} as a Young function")
