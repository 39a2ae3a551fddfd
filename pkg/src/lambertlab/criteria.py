"""Closed-range and Fredholm diagnostics for T_u on finite measure spaces.

On a finite space every T_u has closed range and is Fredholm, so these
functions report the quantities the criteria are stated in (support of E(u),
the infimum of E(Phi(|u|)) there, min |E(u)|, the level bands of Phi(|E(u)|))
together with witness inequalities, not infinite-dimensional verdicts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidInput
from .lambert import (
    OperatorMatrix,
    _embedded_net,
    _net_constants,
    _ratios,
    assemble_operator,
)
from .measure import FiniteMeasureSpace, Partition, conditional_expectation, support
from .orlicz import DEFAULT_TOL, indicator, indicator_norm, luxemburg_norm
from .young import YoungFunction

RANK_RTOL = 1e-10
DEFAULT_N_MAX = 32


def _support_tol(f: np.ndarray) -> float:
    return 1e-12 * float(np.abs(f).max()) if f.size else 0.0


@dataclass(frozen=True)
class Witness:
    block: tuple
    image_norm: float  # ||T_u chi_Q||
    probe_norm: float  # Phi^-1(delta) ||chi_Q||
    strict_holds: bool  # image_norm < probe_norm


@dataclass(frozen=True)
class ClosedRangeReport:
    support_S: tuple
    delta_star: float
    argmin: int | None
    threshold: float
    verdict: bool
    witness: Witness | None = None
    # max |E(1/Phi(|u|)) - 1/E(Phi(|u|))| over S; None when Phi(|u|) vanishes somewhere on S
    reciprocal_identity_gap: float | None = None

    def to_dict(self) -> dict:
        d = {
            "support_S": list(self.support_S),
            "delta_star": None if math.isinf(self.delta_star) else self.delta_star,
            "argmin": self.argmin,
            "threshold": self.threshold,
            "verdict": self.verdict,
            "witness": None,
            "reciprocal_identity_gap": self.reciprocal_identity_gap,
        }
        if self.witness is not None:
            w = self.witness
            d["witness"] = {"block": list(w.block), "image_norm": w.image_norm,
                            "probe_norm": w.probe_norm, "strict_holds": w.strict_holds}
        return d


def closed_range_check(u, phi: YoungFunction, part: Partition, sp: FiniteMeasureSpace,
                       threshold: float = 0.0, support_tol: float | None = None,
                       ) -> ClosedRangeReport:
    """Inf of E(Phi(|u|)) over the support S of E(u), compared against `threshold`.

    When some block inside S has E(Phi(|u|)) < threshold, the block with the
    smallest value is reported as a witness with ||T_u chi_Q|| and
    Phi^-1(threshold) ||chi_Q|| side by side.
    """
    if threshold < 0:
        raise InvalidInput("threshold must be nonnegative")
    u = sp.check(u)
    Eu = conditional_expectation(u, part, sp)
    tol = _support_tol(Eu) if support_tol is None else support_tol
    S = tuple(sorted(support(Eu, sp, tol)))
    if not S:
        return ClosedRangeReport((), math.inf, None, threshold, True)
    e_phi = conditional_expectation(phi(u), part, sp)
    idx = np.array(S)
    k = int(idx[np.argmin(e_phi[idx])])
    delta_star = float(e_phi[k])

    gap = None
    phi_u = phi(u)
    if np.all(phi_u[idx] > 0):
        # only blocks fully inside S matter, and S is a union of blocks
        inv = np.where(phi_u > 0, 1.0 / np.where(phi_u > 0, phi_u, 1.0), 0.0)
        lhs = conditional_expectation(inv, part, sp)[idx]
        gap = float(np.max(np.abs(lhs - 1.0 / e_phi[idx])))

    witness = None
    in_S = set(S)
    low = [b for b in part.blocks if set(b) <= in_S and e_phi[b[0]] < threshold]
    if low:
        Q = min(low, key=lambda b: e_phi[b[0]])
        T = assemble_operator(u, part, sp, phi)
        image = luxemburg_norm(T.apply(indicator(Q, sp)), phi, sp).value
        probe = phi.inverse(threshold) * indicator_norm(Q, phi, sp)
        witness = Witness(Q, image, probe, bool(image < probe))

    return ClosedRangeReport(S, delta_star, k, threshold, bool(delta_star > threshold),
                             witness, gap)


@dataclass(frozen=True)
class FredholmReport:
    min_abs_Eu: float
    zero_set_measure: float
    kernel_dim: int
    cokernel_dim: int
    rank: int
    sup_E_phi: float
    bands: list = field(default_factory=list)  # [(n, mu(H_n))] for n = 1..n_max
    residual_measure: float = 0.0
    H_set: list = field(default_factory=list)
    delta_bound: float | None = None  # Phi^-1(M / n0^2) once the bands stop

    def to_dict(self) -> dict:
        return {
            "min_abs_Eu": self.min_abs_Eu,
            "zero_set_measure": self.zero_set_measure,
            "kernel_dim": self.kernel_dim,
            "cokernel_dim": self.cokernel_dim,
            "rank": self.rank,
            "sup_E_phi": self.sup_E_phi,
            "bands": [[n, m] for n, m in self.bands],
            "residual_measure": self.residual_measure,
            "H_set": list(self.H_set),
            "delta_bound": self.delta_bound,
        }


def numerical_rank(M: np.ndarray, rtol: float = RANK_RTOL) -> int:
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def band_index(values: np.ndarray, M: float) -> np.ndarray:
    """n >= 1 with M/(n+1)^2 < v <= M/n^2 (values above M land in band 1)."""
    ratio = np.divide(M, values, out=np.full_like(values, 1e30), where=values > 0)
    n = np.floor(np.sqrt(np.minimum(ratio, 1e30))).astype(np.int64)
    n = np.maximum(n, 1)
    # repair sqrt round-off against the defining inequalities
    for _ in range(3):
        up = (values <= M / (n + 1.0) ** 2)
        n = n + up
        down = (n > 1) & (values > M / n.astype(float) ** 2)
        n = n - down
    return n


def fredholm_check(u, phi: YoungFunction, part: Partition, sp: FiniteMeasureSpace,
                   n_max: int = DEFAULT_N_MAX, support_tol: float | None = None,
                   rank_rtol: float = RANK_RTOL) -> FredholmReport:
    if n_max < 1:
        raise InvalidInput("n_max must be >= 1")
    u = sp.check(u)
    Eu = conditional_expectation(u, part, sp)
    T = assemble_operator(u, part, sp, phi)
    rank = numerical_rank(T.entries, rank_rtol)
    kernel = sp.n - rank
    tol = _support_tol(Eu) if support_tol is None else support_tol
    zero = np.abs(Eu) <= tol
    zero_measure = float(sp.weights[zero].sum())
    M = float(conditional_expectation(phi(u), part, sp).max())
    report = FredholmReport(
        min_abs_Eu=float(np.abs(Eu).min()),
        zero_set_measure=zero_measure,
        kernel_dim=kernel,
        cokernel_dim=kernel,
        rank=rank,
        sup_E_phi=M,
        bands=[(n, 0.0) for n in range(1, n_max + 1)],
    )
    if M == 0.0 or zero.all():
        return report

    live = ~zero
    n_of = band_index(phi(Eu[live]), M)
    w = sp.weights[live]
    bands = [(n, float(w[n_of == n].sum())) for n in range(1, n_max + 1)]
    residual = float(w[n_of > n_max].sum())
    H = [n for n, m in bands if m > 0]
    delta_bound = None
    if residual == 0.0 and zero_measure == 0.0:
        n0 = max(H) + 1
        delta_bound = phi.inverse(M / n0**2)
    return replace(report, bands=bands, residual_measure=residual, H_set=H,
                   delta_bound=delta_bound)


def bounded_below_net(T: OperatorMatrix, S, sp: FiniteMeasureSpace,
                      phi: YoungFunction | None = None, net: int | None = None,
                      tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """(net minimum of ||Tf||/||f|| over f supported on S, certified lower bound)."""
    S = sorted(set(int(i) for i in S))
    if not S:
        raise InvalidInput("S must be nonempty")
    if phi is not None:
        T = OperatorMatrix(T.entries, phi, phi, T.part)
    F, net = _embedded_net(sp, S, net)
    k = float(_ratios(T, F, sp, tol).min())
    one_norm, c_min, col_sum = _net_constants(T, sp, S, tol)
    d = 1.0 / net
    certified = k - d * (k * one_norm + col_sum) / c_min
    return k, float(certified)


def bounded_below_constant(T: OperatorMatrix, S, sp: FiniteMeasureSpace,
                           phi: YoungFunction | None = None, net: int | None = None) -> float:
    """Smallest ||Tf||/||f|| over the net of directions supported on S."""
    return bounded_below_net(T, S, sp, phi, net)[0]
