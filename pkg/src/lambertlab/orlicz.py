"""The modular and the Luxemburg norm on a finite measure space."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, NumericFailure
from .measure import FiniteMeasureSpace
from .young import YoungFunction

DEFAULT_TOL = 1e-10
_MAX_ITER = 300


@dataclass(frozen=True)
class NormResult:
    value: float
    iterations: int
    residual: float

    def __float__(self):
        return self.value


def modular(f, phi: YoungFunction, sp: FiniteMeasureSpace) -> float:
    """sum_x Phi(|f(x)|) mu(x)."""
    f = sp.check(f)
    return float(np.dot(phi(f), sp.weights))


def _modulars(F: np.ndarray, phi: YoungFunction, weights: np.ndarray) -> np.ndarray:
    return phi(F) @ weights


def luxemburg_norms(F, phi: YoungFunction, sp: FiniteMeasureSpace, tol: float = DEFAULT_TOL):
    """Row-wise Luxemburg norms of a (m, n) array.

    Returns (values, iterations, residuals). Bisection runs on every row in
    lockstep until each row's bracket is narrower than tol * eps and its
    modular residual is at most tol.
    """
    if tol <= 0:
        raise InvalidInput("tol must be positive")
    F = np.abs(np.atleast_2d(np.asarray(F, dtype=float)))
    if F.shape[1] != sp.n:
        raise InvalidInput(f"rows have {F.shape[1]} entries, space has {sp.n} points")
    w = sp.weights
    m = F.shape[0]
    values = np.zeros(m)
    residuals = np.zeros(m)
    scale = F.max(axis=1) if F.size else np.zeros(m)
    live = scale > 0
    if not live.any():
        return values, 0, residuals
    G = F[live]
    hi = scale[live].copy()
    lo = hi.copy()

    # grow hi until modular(f/hi) <= 1, shrink lo until modular(f/lo) > 1
    for _ in range(_MAX_ITER):
        over = _modulars(G / hi[:, None], phi, w) > 1.0
        if not over.any():
            break
        hi[over] *= 2.0
    else:
        raise NumericFailure("could not bracket the Luxemburg norm from above")
    for _ in range(_MAX_ITER):
        under = _modulars(G / lo[:, None], phi, w) <= 1.0
        if not under.any():
            break
        lo[under] *= 0.5
    else:
        raise NumericFailure("could not bracket the Luxemburg norm from below")

    iterations = 0
    while True:
        res_hi = np.abs(_modulars(G / hi[:, None], phi, w) - 1.0)
        done = ((hi - lo) <= tol * hi) & (res_hi <= tol)
        # bracket at float resolution: nothing more to gain
        mid = 0.5 * (lo + hi)
        stuck = (mid <= lo) | (mid >= hi)
        if np.all(done | stuck):
            break
        if iterations >= _MAX_ITER:
            raise NumericFailure("Luxemburg bisection did not converge")
        iterations += 1
        active = ~(done | stuck)
        above = _modulars(G[active] / mid[active, None], phi, w) > 1.0
        idx = np.flatnonzero(active)
        lo[idx[above]] = mid[idx[above]]
        hi[idx[~above]] = mid[idx[~above]]

    res_lo = np.abs(_modulars(G / lo[:, None], phi, w) - 1.0)
    pick_lo = res_lo < res_hi
    values[live] = np.where(pick_lo, lo, hi)
    residuals[live] = np.where(pick_lo, res_lo, res_hi)
    return values, iterations, residuals


def luxemburg_norm(f, phi: YoungFunction, sp: FiniteMeasureSpace,
                   tol: float = DEFAULT_TOL) -> NormResult:
    """inf{eps > 0 : sum Phi(|f|/eps) mu <= 1} by bisection on eps."""
    f = sp.check(f)
    values, iterations, residuals = luxemburg_norms(f[None, :], phi, sp, tol)
    return NormResult(float(values[0]), iterations, float(residuals[0]))


def indicator_norm(Q, phi: YoungFunction, sp: FiniteMeasureSpace) -> float:
    """Closed form ||chi_Q|| = 1 / Phi^-1(1 / mu(Q))."""
    Q = sorted(set(int(i) for i in Q))
    if not Q:
        raise InvalidInput("indicator set must be nonempty")
    if Q[0] < 0 or Q[-1] >= sp.n:
        raise InvalidInput("indicator set has indices outside the space")
    return 1.0 / phi.inverse(1.0 / sp.measure(Q))


def indicator(Q, sp: FiniteMeasureSpace) -> np.ndarray:
    chi = np.zeros(sp.n)
    chi[list(Q)] = 1.0
    return chi
