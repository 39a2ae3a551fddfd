import numpy as np
import pytest

from lambertlab import (
    Entropy,
    FiniteMeasureSpace,
    InvalidInput,
    PiecewiseLinear,
    Power,
    conditional_expectation,
    indicator_norm,
    luxemburg_norm,
    modular,
)
from lambertlab.orlicz import indicator, luxemburg_norms

from conftest import random_instance

PHIS = [Power(1), Power(1.5), Power(2), Power(3), Entropy(),
        PiecewiseLinear((0, 0.5, 2), (1, 3, 4))]


def test_modular():
    sp = FiniteMeasureSpace.from_weights([1, 1])
    assert modular([0, 0], Power(2), sp) == 0
    assert modular([1, 2], Power(2), sp) == 5


def test_luxemburg_examples():
    sp = FiniteMeasureSpace.from_weights([1, 1])
    res = luxemburg_norm([2, 0], Power(2), sp)
    assert res.value == pytest.approx(2.0, rel=1e-12)
    zero = luxemburg_norm([0, 0], Entropy(), sp)
    assert zero.value == 0 and zero.iterations == 0


def test_luxemburg_residual_certificate(rng):
    for phi in PHIS:
        sp, _ = random_instance(rng, 2, 6)
        f = rng.normal(size=sp.n) * 5
        res = luxemburg_norm(f, phi, sp)
        assert res.residual <= 1e-10
        assert modular(f / res.value, phi, sp) == pytest.approx(1.0, abs=1e-10)


def test_indicator_norm_closed_form():
    sp = FiniteMeasureSpace.from_weights([1.5, 2.5, 3])
    assert indicator_norm([0, 1], Power(2), sp) == pytest.approx(2.0, rel=1e-14)
    assert indicator_norm([0, 1, 2], Power(1), sp) == pytest.approx(7.0, rel=1e-14)
    with pytest.raises(InvalidInput):
        indicator_norm([], Power(1), sp)


@pytest.mark.parametrize("phi", PHIS, ids=repr)
def test_indicator_matches_bisection(phi, rng):
    for _ in range(10):
        sp, _ = random_instance(rng, 1, 6)
        Q = [i for i in range(sp.n) if rng.random() < 0.6] or [0]
        lux = luxemburg_norm(indicator(Q, sp), phi, sp).value
        assert lux == pytest.approx(indicator_norm(Q, phi, sp), rel=1e-9, abs=1e-9)


@pytest.mark.parametrize("p", [1, 1.5, 2, 3, 4.5])
def test_pnorm_agreement(p, rng):
    for _ in range(20):
        sp, _ = random_instance(rng, 1, 8)
        f = rng.normal(size=sp.n)
        closed = np.dot(np.abs(f) ** p, sp.weights) ** (1 / p)
        assert luxemburg_norm(f, Power(p), sp).value == pytest.approx(closed, abs=1e-9)


@pytest.mark.parametrize("phi", PHIS, ids=repr)
def test_norm_axioms(phi, rng):
    for _ in range(15):
        sp, part = random_instance(rng, 1, 6)
        f, g = rng.normal(size=(2, sp.n)) * rng.uniform(0.1, 10)
        c = rng.normal()
        nf = luxemburg_norm(f, phi, sp).value
        assert luxemburg_norm(c * f, phi, sp).value == pytest.approx(abs(c) * nf, rel=1e-9)
        ng = luxemburg_norm(g, phi, sp).value
        assert luxemburg_norm(f + g, phi, sp).value <= nf + ng + 1e-9
        Ef = conditional_expectation(f, part, sp)
        assert luxemburg_norm(Ef, phi, sp).value <= nf + 1e-9
        assert modular(Ef, phi, sp) <= modular(f, phi, sp) * (1 + 1e-12)


def test_batched_matches_single(rng):
    sp, _ = random_instance(rng, 4, 4)
    F = rng.normal(size=(30, 4))
    F[3] = 0.0
    values, _, residuals = luxemburg_norms(F, Entropy(), sp)
    for row, v in zip(F, values):
        assert v == pytest.approx(luxemburg_norm(row, Entropy(), sp).value, rel=1e-10)
    assert values[3] == 0 and residuals[3] == 0


def test_bad_tolerance():
    with pytest.raises(InvalidInput):
        luxemburg_norm([1.0], Power(2), FiniteMeasureSpace.from_weights([1]), tol=0)
