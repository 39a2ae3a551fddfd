"""Acceptance gate: the eight criteria at their stated tolerances.

Each test records one PASS/FAIL line, printed in the terminal summary.
"""

import time
from contextlib import contextmanager

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from lambertlab import (
    Entropy,
    FiniteMeasureSpace,
    Partition,
    Power,
    assemble_operator,
    fredholm_check,
    indicator_norm,
    luxemburg_norm,
    sandwich_check,
)
from lambertlab.cli import example_paper, main
from lambertlab.orlicz import indicator
from lambertlab.properties import INVARIANTS, check, generate
from lambertlab.report import dumps


@contextmanager
def criterion(number, title):
    info = {}
    start = time.perf_counter()
    ok = False
    try:
        yield info
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        extra = ", ".join(f"{k}={v}" for k, v in info.items())
        ACCEPTANCE_LINES.append(
            f"[{'PASS' if ok else 'FAIL'}] {number}. {title} ({elapsed:.2f} s{', ' + extra if extra else ''})")


def test_1_paper_example():
    with criterion(1, "worked example on 1000 grid points") as info:
        start = time.perf_counter()
        rep = example_paper(1000)
        elapsed = time.perf_counter() - start
        res = {r["name"]: r for r in rep["results"]}
        exp = res["expectation"]["values"]
        assert exp["max_err_Eu_vs_x4_plus_3"] <= 1e-12
        op = res["operator-action"]["values"]
        for key in ("max_err_self_coefficient", "max_err_mirror_coefficient", "max_other_entry"):
            assert op[key] <= 1e-12, key
        fred = res["fredholm"]["values"]
        assert fred["min_abs_Eu"] >= 3.0
        assert fred["min_abs_Eu"] == pytest.approx(3.0 + (3.0 / 1000) ** 4, abs=1e-12)
        assert rep["passed"]
        info["min|E(u)|"] = repr(fred["min_abs_Eu"])
        assert elapsed < 5.0


def _sandwich_instance(rng):
    n = int(rng.choice([2, 3, 4]))
    p = float(rng.choice([1.0, 1.5, 2.0, 3.0]))
    sp = FiniteMeasureSpace.from_weights(rng.uniform(0.2, 3.0, n))
    part = Partition.from_labels(rng.integers(0, n, n))
    u = rng.normal(0.0, 1.0, n) * 10 ** rng.uniform(-1, 1)
    return u, Power(p), part, sp


def test_2_sandwich_campaign():
    with criterion(2, "sandwich on 50 seeded instances") as info:
        rng = np.random.default_rng(2)
        start = time.perf_counter()
        violations = []
        for case in range(50):
            u, phi, part, sp = _sandwich_instance(rng)
            rep = sandwich_check(u, phi, part, sp)
            assert rep.mode == "bruteforce"
            lower_ok = rep.kstar - rep.eps_net <= rep.norm_lower + 1e-6
            upper_ok = rep.norm_lower <= 3 * rep.kstar + 1e-6
            if not (lower_ok and upper_ok and rep.passed):
                violations.append((case, rep.to_dict()))
        elapsed = time.perf_counter() - start
        info["violations"] = len(violations)
        assert not violations
        assert elapsed < 120.0


def test_3_pnorm_agreement():
    with criterion(3, "Luxemburg norm vs p-norm, 200 instances, 1e-9") as info:
        rng = np.random.default_rng(3)
        worst = 0.0
        for _ in range(200):
            n = int(rng.integers(1, 9))
            p = float(rng.choice([1.0, 1.25, 1.5, 2.0, 3.0, 4.5]))
            sp = FiniteMeasureSpace.from_weights(rng.uniform(0.05, 5.0, n))
            f = rng.normal(0.0, 1.0, n) * 10 ** rng.uniform(-2, 2)
            closed = float(np.dot(np.abs(f) ** p, sp.weights) ** (1 / p))
            # the 1e-9 tolerance is relative to max(1, norm), like the Luxemburg tol itself
            err = abs(luxemburg_norm(f, Power(p), sp).value - closed) / max(1.0, closed)
            worst = max(worst, err)
        info["max_rel_err"] = f"{worst:.2e}"
        assert worst <= 1e-9


def test_4_indicator_identity():
    with criterion(4, "indicator norm identity, 100 sets, 1e-9") as info:
        rng = np.random.default_rng(4)
        young = [Power(1.0), Power(1.5), Power(2.0), Power(3.0), Entropy()]
        worst = 0.0
        for case in range(100):
            n = int(rng.integers(1, 9))
            sp = FiniteMeasureSpace.from_weights(rng.uniform(0.05, 5.0, n))
            Q = [i for i in range(n) if rng.random() < 0.5] or [int(rng.integers(n))]
            phi = young[case % len(young)]
            lux = luxemburg_norm(indicator(Q, sp), phi, sp).value
            closed = indicator_norm(Q, phi, sp)
            worst = max(worst, abs(lux - closed) / max(1.0, closed))
        info["max_rel_err"] = f"{worst:.2e}"
        assert worst <= 1e-9


E_SUITE = ["measure.idempotence", "measure.linearity", "measure.positivity", "measure.unit",
           "measure.module_property", "measure.averaging", "orlicz.modular_jensen",
           "orlicz.e_contraction"]


def test_5_conditional_expectation_suite():
    with criterion(5, "conditional expectation suite, 500 instances") as info:
        failures = []
        for case in range(500):
            inst = generate(5, case)
            for name in E_SUITE:
                ok, detail = check(name, inst)
                if not ok:
                    failures.append((case, name, detail))
        info["failures"] = len(failures)
        assert not failures, failures[:3]


def test_6_conjugate_and_young_inequality():
    with criterion(6, "Power conjugate closed form and Young's inequality") as info:
        worst = 0.0
        ys = np.linspace(0.0, 10.0, 201)
        for p in (1.5, 2.0, 3.0):
            phi, q = Power(p), p / (p - 1)
            closed = (p - 1) * (ys / p) ** q
            numeric = np.array([phi.complementary(y) for y in ys])
            worst = max(worst, float(np.abs(numeric - closed).max()))
        # p = 1: conjugate is 0 on [0, 1] and infinite beyond
        worst = max(worst, max(abs(Power(1.0).complementary(y)) for y in np.linspace(0, 1, 51)))
        info["max_conj_err"] = f"{worst:.2e}"
        assert worst <= 1e-6

        grid = np.linspace(0.0, 10.0, 100)
        slack_min = np.inf
        for phi in (Power(1.5), Power(2.0), Power(3.0), Entropy()):
            psi = np.array([phi.complementary(y) for y in grid])
            slack = phi(grid)[:, None] + psi[None, :] - np.outer(grid, grid)
            slack_min = min(slack_min, float(slack.min()))
        info["min_slack"] = f"{slack_min:.2e}"
        assert slack_min >= -1e-9


def _designed_instance(rng):
    """Space, partition, u and an explicit basis of null functions of T_u."""
    n_blocks = int(rng.integers(2, 5))
    sizes = rng.integers(1, 4, n_blocks)
    labels = np.repeat(np.arange(n_blocks), sizes)
    n = labels.size
    sp = FiniteMeasureSpace.from_weights(rng.uniform(0.2, 3.0, n))
    part = Partition.from_labels(labels)
    w = np.asarray(sp.weights)
    u = np.zeros(n)
    null = []
    kinds = rng.choice(["zero", "mean-zero", "generic"], n_blocks)
    if "zero" not in kinds and "mean-zero" not in kinds:
        kinds[0] = "zero"
    for b, kind in enumerate(kinds):
        A = np.flatnonzero(labels == b)
        if kind == "mean-zero" and A.size < 2:
            kind = "zero"
        if kind == "zero":
            # u vanishes on A: every indicator of a point of A is killed
            for i in A:
                e = np.zeros(n)
                e[i] = 1.0
                null.append(e)
        elif kind == "mean-zero":
            v = rng.normal(size=A.size)
            u[A] = v - np.dot(v, w[A]) / w[A].sum()
            # T f = u E(f) on A, so functions on A with zero block mean are killed
            for i in A[1:]:
                e = np.zeros(n)
                e[i], e[A[0]] = 1.0 / w[i], -1.0 / w[A[0]]
                null.append(e)
        else:
            u[A] = rng.uniform(1.0, 3.0, A.size) * rng.choice([-1, 1])
    return sp, part, u, np.array(null)


def test_7_criterion_diagnostics():
    with criterion(7, "band sums and kernel dimension on 20 designed instances") as info:
        rng = np.random.default_rng(7)
        worst_band = 0.0
        for _ in range(20):
            sp, part, u, N = _designed_instance(rng)
            phi = Entropy() if rng.random() < 0.5 else Power(2.0)
            rep = fredholm_check(u, phi, part, sp)
            T = assemble_operator(u, part, sp, phi).entries
            assert np.abs(T @ N.T).max() <= 1e-12
            assert np.linalg.matrix_rank(N) == len(N)
            assert rep.kernel_dim == len(N)
            assert rep.cokernel_dim == len(N)
            total = sum(m for _, m in rep.bands) + rep.residual_measure + rep.zero_set_measure
            worst_band = max(worst_band, abs(total - sp.total))
        info["max_band_err"] = f"{worst_band:.2e}"
        assert worst_band <= 1e-12


def test_8_property_regression(tmp_path):
    with criterion(8, "props --seed 0 --cases 100") as info:
        outs = [tmp_path / "a.json", tmp_path / "b.json"]
        times = []
        for out in outs:
            start = time.perf_counter()
            code = main(["props", "--seed", "0", "--cases", "100", "--out", str(out)])
            times.append(time.perf_counter() - start)
            assert code == 0
        info["runtime"] = f"{max(times):.1f}s"
        assert outs[0].read_bytes() == outs[1].read_bytes()
        assert max(times) < 60.0
