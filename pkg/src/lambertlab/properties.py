"""Seeded invariant suite covering every module.

Each invariant takes an `Instance` and returns (ok, detail). Instances are
generated from (seed, case) alone and serialize to JSON exactly, so any
failure can be replayed bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionRefusal
from .criteria import bounded_below_constant, closed_range_check, fredholm_check
from .lambert import assemble_operator, kstar_norm, operator_norm_bruteforce, star
from .measure import FiniteMeasureSpace, Partition, conditional_expectation
from .orlicz import indicator, indicator_norm, luxemburg_norm, modular
from .young import Entropy, Power, YoungFunction, young_from_dict

ALG_TOL = 1e-12
NORM_TOL = 1e-9
SANDWICH_TOL = 1e-6
YOUNG_CATALOG = (Power(1.0), Power(1.5), Power(2.0), Power(3.0), Entropy())


@dataclass(frozen=True)
class Instance:
    weights: tuple
    labels: tuple
    young: dict
    f: tuple
    g: tuple
    h: tuple
    u: tuple
    v: tuple
    a: float
    b: float

    @property
    def sp(self) -> FiniteMeasureSpace:
        return FiniteMeasureSpace.from_weights(self.weights)

    @property
    def part(self) -> Partition:
        return Partition.from_labels(self.labels)

    @property
    def phi(self) -> YoungFunction:
        return young_from_dict(self.young)

    def arr(self, name) -> np.ndarray:
        return np.array(getattr(self, name), dtype=float)

    def to_dict(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.__dict__.items()}

    @classmethod
    def from_dict(cls, d: dict) -> "Instance":
        return cls(**{k: (tuple(v) if isinstance(v, list) else v) for k, v in d.items()})


def generate(seed: int, case: int, max_n: int = 5) -> Instance:
    rng = np.random.default_rng([seed, case])
    n = int(rng.integers(1, max_n + 1))
    weights = rng.uniform(0.1, 3.0, n)
    labels = rng.integers(0, n, n)
    phi = YOUNG_CATALOG[int(rng.integers(len(YOUNG_CATALOG)))]

    def vec():
        return tuple(float(x) for x in rng.normal(0.0, 1.0, n) * 10 ** rng.uniform(-1, 1))

    return Instance(
        weights=tuple(float(w) for w in weights),
        labels=tuple(int(k) for k in labels),
        young=phi.to_dict(),
        f=vec(), g=vec(), h=vec(), u=vec(), v=vec(),
        a=float(rng.normal()), b=float(rng.normal()),
    )


def _scale(*arrays) -> float:
    return 1.0 + max(float(np.abs(x).max()) for x in arrays)


def _E(x, inst):
    return conditional_expectation(x, inst.part, inst.sp)


# --- measure -------------------------------------------------------------

def e_idempotence(inst):
    f = inst.arr("f")
    Ef = _E(f, inst)
    err = float(np.abs(_E(Ef, inst) - Ef).max())
    return err <= ALG_TOL * _scale(f), {"err": err}


def e_linearity(inst):
    f, g, a, b = inst.arr("f"), inst.arr("g"), inst.a, inst.b
    err = float(np.abs(_E(a * f + b * g, inst) - (a * _E(f, inst) + b * _E(g, inst))).max())
    return err <= ALG_TOL * _scale(a * f, b * g), {"err": err}


def e_positivity(inst):
    f = np.abs(inst.arr("f"))
    nonneg = bool(np.all(_E(f, inst) >= 0))
    strict = bool(np.all(_E(f + 0.1, inst) > 0))
    return nonneg and strict, {"nonneg": nonneg, "strict": strict}


def e_unit(inst):
    err = float(np.abs(_E(np.ones(len(inst.weights)), inst) - 1.0).max())
    return err <= ALG_TOL, {"err": err}


def e_module(inst):
    f, g = inst.arr("f"), _E(inst.arr("g"), inst)  # g made block-constant
    err = float(np.abs(_E(f * g, inst) - _E(f, inst) * g).max())
    return err <= ALG_TOL * _scale(f * g), {"err": err}


def e_averaging(inst):
    f, w, part = inst.arr("f"), np.array(inst.weights), inst.part
    Ef = _E(f, inst)
    err = max(abs(float(np.dot(f[list(b)], w[list(b)]) - np.dot(Ef[list(b)], w[list(b)])))
              for b in part.blocks)
    return err <= ALG_TOL * _scale(f * w), {"err": err}


def e_power_jensen(inst):
    f = inst.arr("f")
    worst = 0.0
    for p in (1, 2, 3):
        lhs = np.abs(_E(f, inst)) ** p
        rhs = _E(np.abs(f) ** p, inst)
        worst = max(worst, float(np.max((lhs - rhs) / (1.0 + np.abs(rhs)))))
    return worst <= ALG_TOL, {"worst_excess": worst}


# --- young ---------------------------------------------------------------

def young_evenness(inst):
    phi, f = inst.phi, inst.arr("f")
    return bool(np.array_equal(phi(f), phi(-f))), {}


def young_monotone_convex(inst):
    phi = inst.phi
    x = np.linspace(0.0, 10.0 * _scale(inst.arr("f")), 501)
    y, d = phi(x), phi.derivative(x)
    ok = bool(np.all(np.diff(y) >= 0) and np.all(np.diff(d) >= 0))
    # midpoint convexity on the grid
    mid = phi(0.5 * (x[:-2] + x[2:])) <= 0.5 * (y[:-2] + y[2:]) + ALG_TOL * (1 + y[2:])
    return ok and bool(mid.all()), {}


def young_round_trip(inst):
    phi = inst.phi
    xs = np.minimum(np.abs(inst.arr("f")) * 10, 100.0)
    errs = [abs(phi.inverse(phi(x)) - x) / max(1.0, x) for x in xs]
    err = float(max(errs))
    return err <= NORM_TOL, {"err": err}


def young_inequality(inst):
    phi = inst.phi
    xs = np.abs(inst.arr("f"))
    ys = np.minimum(np.abs(inst.arr("g")), phi.limiting_slope)
    slack = min(phi(x) + phi.complementary(y) - x * y for x in xs for y in ys)
    return slack >= -NORM_TOL, {"min_slack": float(slack)}


def young_jensen(inst):
    phi, f = inst.phi, inst.arr("f")
    lhs, rhs = phi(_E(f, inst)), _E(phi(f), inst)
    worst = float(np.max((lhs - rhs) / (1.0 + rhs)))
    return worst <= ALG_TOL, {"worst_excess": worst}


# --- orlicz --------------------------------------------------------------

def _norm(x, inst):
    return luxemburg_norm(x, inst.phi, inst.sp).value


def orlicz_modular_jensen(inst):
    f, sp, phi = inst.arr("f"), inst.sp, inst.phi
    lhs, rhs = modular(_E(f, inst), phi, sp), modular(f, phi, sp)
    return lhs <= rhs * (1 + ALG_TOL) + ALG_TOL, {"lhs": lhs, "rhs": rhs}


def orlicz_homogeneity(inst):
    f, a = inst.arr("f"), inst.a
    lhs, rhs = _norm(a * f, inst), abs(a) * _norm(f, inst)
    return abs(lhs - rhs) <= NORM_TOL * max(1.0, rhs), {"lhs": lhs, "rhs": rhs}


def orlicz_triangle(inst):
    f, g = inst.arr("f"), inst.arr("g")
    lhs, rhs = _norm(f + g, inst), _norm(f, inst) + _norm(g, inst)
    return lhs <= rhs + NORM_TOL * max(1.0, rhs), {"lhs": lhs, "rhs": rhs}


def orlicz_unit_ball(inst):
    f = inst.arr("f")
    m = modular(f / _norm(f, inst), inst.phi, inst.sp)
    return abs(m - 1.0) <= NORM_TOL, {"modular": m}


def orlicz_contraction(inst):
    f = inst.arr("f")
    lhs, rhs = _norm(_E(f, inst), inst), _norm(f, inst)
    return lhs <= rhs + NORM_TOL * max(1.0, rhs), {"lhs": lhs, "rhs": rhs}


def orlicz_pnorm(inst):
    phi = inst.phi
    if not isinstance(phi, Power):
        return None, {}
    f, w = inst.arr("f"), np.array(inst.weights)
    closed = float(np.dot(np.abs(f) ** phi.p, w) ** (1.0 / phi.p))
    val = _norm(f, inst)
    return abs(val - closed) <= NORM_TOL * max(1.0, closed), {"norm": val, "closed_form": closed}


def orlicz_indicator(inst):
    f = inst.arr("f")
    Q = [i for i in range(len(f)) if f[i] >= 0] or [0]
    lux = _norm(indicator(Q, inst.sp), inst)
    closed = indicator_norm(Q, inst.phi, inst.sp)
    return abs(lux - closed) <= NORM_TOL * max(1.0, closed), {"luxemburg": lux, "closed_form": closed}


# --- lambert -------------------------------------------------------------

def star_commutativity(inst):
    f, g, part, sp = inst.arr("f"), inst.arr("g"), inst.part, inst.sp
    return bool(np.array_equal(star(f, g, part, sp), star(g, f, part, sp))), {}


def star_bilinearity(inst):
    f, g, h, a, b = inst.arr("f"), inst.arr("g"), inst.arr("h"), inst.a, inst.b
    part, sp = inst.part, inst.sp
    lhs = star(a * f + b * h, g, part, sp)
    rhs = a * star(f, g, part, sp) + b * star(h, g, part, sp)
    err = float(np.abs(lhs - rhs).max())
    return err <= ALG_TOL * _scale(a * f, b * h) * _scale(g), {"err": err}


def star_intertwining(inst):
    u, f = inst.arr("u"), inst.arr("f")
    T = assemble_operator(u, inst.part, inst.sp, inst.phi)
    err = float(np.abs(_E(T.apply(f), inst) - _E(u, inst) * _E(f, inst)).max())
    return err <= ALG_TOL * _scale(u) * _scale(f), {"err": err}


def star_assembly(inst):
    u, f = inst.arr("u"), inst.arr("f")
    T = assemble_operator(u, inst.part, inst.sp, inst.phi)
    err = float(np.abs(T.apply(f) - star(u, f, inst.part, inst.sp)).max())
    return err <= ALG_TOL * _scale(u) * _scale(f), {"err": err}


def star_semigroup(inst):
    u, v, part, sp, phi = inst.arr("u"), inst.arr("v"), inst.part, inst.sp, inst.phi
    lhs = assemble_operator(u, part, sp, phi).entries @ assemble_operator(v, part, sp, phi).entries
    rhs = assemble_operator(star(u, v, part, sp), part, sp, phi).entries
    err = float(np.abs(lhs - rhs).max())
    return err <= 1e-10 * _scale(u) * _scale(v), {"err": err}


def lambert_term_bounds(inst):
    # the bound on ||u E(f)|| holds for powers but not for every Young function
    if not isinstance(inst.phi, Power):
        return None, {}
    u, f = inst.arr("u"), inst.arr("f")
    f = f / _norm(f, inst)
    Eu, Ef = _E(u, inst), _E(f, inst)
    k = kstar_norm(u, inst.phi, inst.part, inst.sp)
    terms = [_norm(x, inst) for x in (Eu * f, u * Ef, Eu * Ef)]
    return max(terms) <= k + NORM_TOL * max(1.0, k), {"terms": terms, "kstar": k}


def lambert_sandwich(inst):
    u, part, sp, phi = inst.arr("u"), inst.part, inst.sp, inst.phi
    T = assemble_operator(u, part, sp, phi)
    k = kstar_norm(u, phi, part, sp)
    net = {1: 2, 2: 32, 3: 12, 4: 8, 5: 6}[sp.n]
    lower, upper = operator_norm_bruteforce(T, sp, net)
    eps = upper - lower
    ok = k - eps <= lower and lower <= 3 * k + SANDWICH_TOL
    return ok, {"kstar": k, "lower": lower, "upper": upper}


# --- criteria ------------------------------------------------------------

def criteria_band_partition(inst):
    rep = fredholm_check(inst.arr("u"), inst.phi, inst.part, inst.sp)
    total = sum(m for _, m in rep.bands) + rep.residual_measure + rep.zero_set_measure
    err = abs(total - inst.sp.total)
    return err <= ALG_TOL * inst.sp.total, {"err": err}


def criteria_rank_nullity(inst):
    rep = fredholm_check(inst.arr("u"), inst.phi, inst.part, inst.sp)
    return rep.kernel_dim + rep.rank == len(inst.weights), {"kernel": rep.kernel_dim, "rank": rep.rank}


def criteria_kernel_link(inst):
    part, sp = inst.part, inst.sp
    block = list(part.blocks[0])
    u = inst.arr("u")
    u[block] = 0.0
    f = np.zeros(sp.n)
    f[block] = inst.arr("f")[block]
    T = assemble_operator(u, part, sp, inst.phi)
    err = float(np.abs(T.apply(f)).max())
    return err <= ALG_TOL * _scale(u) * _scale(f), {"err": err}


def criteria_monotone_probe(inst):
    u = inst.arr("u")
    thresholds = sorted(abs(x) for x in inst.arr("g")) + [0.0]
    thresholds.sort()
    verdicts = [closed_range_check(u, inst.phi, inst.part, inst.sp, t).verdict for t in thresholds]
    ok = all(a >= b for a, b in zip(verdicts, verdicts[1:]))
    return ok, {"verdicts": verdicts}


def criteria_consistency(inst):
    u = inst.arr("u")
    rep = closed_range_check(u, inst.phi, inst.part, inst.sp)
    if not rep.support_S or not rep.delta_star > 0:
        return None, {}
    T = assemble_operator(u, inst.part, inst.sp, inst.phi)
    k = bounded_below_constant(T, rep.support_S, inst.sp, net=6)
    return k > 0, {"delta_star": rep.delta_star, "bounded_below": k}


INVARIANTS = {
    "measure.idempotence": e_idempotence,
    "measure.linearity": e_linearity,
    "measure.positivity": e_positivity,
    "measure.unit": e_unit,
    "measure.module_property": e_module,
    "measure.averaging": e_averaging,
    "measure.power_jensen": e_power_jensen,
    "young.evenness": young_evenness,
    "young.monotone_convex": young_monotone_convex,
    "young.round_trip": young_round_trip,
    "young.young_inequality": young_inequality,
    "young.jensen": young_jensen,
    "orlicz.modular_jensen": orlicz_modular_jensen,
    "orlicz.homogeneity": orlicz_homogeneity,
    "orlicz.triangle": orlicz_triangle,
    "orlicz.unit_ball_modular": orlicz_unit_ball,
    "orlicz.e_contraction": orlicz_contraction,
    "orlicz.pnorm_agreement": orlicz_pnorm,
    "orlicz.indicator_identity": orlicz_indicator,
    "lambert.commutativity": star_commutativity,
    "lambert.bilinearity": star_bilinearity,
    "lambert.intertwining": star_intertwining,
    "lambert.assembly": star_assembly,
    "lambert.semigroup": star_semigroup,
    "lambert.term_bounds": lambert_term_bounds,
    "lambert.sandwich": lambert_sandwich,
    "criteria.band_partition": criteria_band_partition,
    "criteria.rank_nullity": criteria_rank_nullity,
    "criteria.kernel_link": criteria_kernel_link,
    "criteria.monotone_probe": criteria_monotone_probe,
    "criteria.consistency": criteria_consistency,
}


def check(name: str, inst: Instance):
    """Run one invariant; ok is None when it does not apply, and crashes count as failures."""
    try:
        ok, detail = INVARIANTS[name](inst)
    except DimensionRefusal:
        return None, {"skipped": "too many points for a net search"}
    except Exception as e:  # noqa: BLE001 - any crash is a reportable failure
        return False, {"error": f"{type(e).__name__}: {e}"}
    return ok, detail


def run_suite(seed: int, cases: int):
    """Returns (per-invariant stats, failures) for cases generated from `seed`."""
    stats = {name: {"runs": 0, "skipped": 0, "failures": 0} for name in INVARIANTS}
    failures = []
    for case in range(cases):
        inst = generate(seed, case)
        for name in INVARIANTS:
            ok, detail = check(name, inst)
            if ok is None:
                stats[name]["skipped"] += 1
                continue
            stats[name]["runs"] += 1
            if not ok:
                stats[name]["failures"] += 1
                failures.append({"invariant": name, "case": case,
                                 "instance": inst.to_dict(), "detail": detail})
    return stats, failures
