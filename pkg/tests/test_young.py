import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lambertlab import Entropy, InvalidInput, PiecewiseLinear, Power, UnboundedConjugate
from lambertlab.young import young_from_dict

CATALOG = [Power(1), Power(1.5), Power(2), Power(3), Entropy(),
           PiecewiseLinear((0, 1, 3), (0.5, 2, 4))]


def brute_conjugate(phi, y, hi=10.0, step=1e-4):
    """Grid maximum of x|y| - Phi(x) over [0, hi]."""
    x = np.arange(0.0, hi + step / 2, step)
    return float(np.max(x * abs(y) - phi(x)))


def test_eval():
    assert Power(2)(3) == 9
    assert Entropy()(1) == pytest.approx(2 * math.log(2) - 1, rel=1e-15)
    for phi in CATALOG:
        assert phi(0) == 0


def test_entropy_small_arguments():
    # series branch against mpmath-free high-precision reference: x^2/2 - x^3/6 + x^4/12
    for x in (1e-8, 1e-5, 1e-3, 9e-3):
        ref = x**2 / 2 - x**3 / 6 + x**4 / 12 - x**5 / 20 + x**6 / 30
        assert Entropy()(x) == pytest.approx(ref, rel=1e-13)
    # both branches agree at the switch
    assert Entropy()(1e-2 * (1 - 1e-12)) == pytest.approx(Entropy()(1e-2), rel=1e-9)


def test_derivative():
    assert Power(2).derivative(3) == 6
    xs = np.linspace(0, 20, 41)
    np.testing.assert_allclose(Entropy().derivative(xs), np.log1p(xs))
    plc = PiecewiseLinear((0, 1, 3), (0.5, 2, 4))
    assert plc.derivative(1.0) == 2  # right slope at a kink
    assert plc.derivative(0.999) == 0.5
    with pytest.raises(InvalidInput):
        Power(2).derivative(-1)


def test_inverse():
    assert Power(2).inverse(9) == pytest.approx(3, rel=1e-15)
    for phi in CATALOG:
        assert phi.inverse(0) == 0
    e = Entropy()
    assert e.inverse(e(2.5)) == pytest.approx(2.5, rel=1e-12)


@pytest.mark.parametrize("phi", CATALOG, ids=repr)
def test_round_trip(phi):
    for x in np.linspace(0, 100, 201):
        assert phi.inverse(phi(x)) == pytest.approx(x, rel=1e-12, abs=1e-12)


def test_complementary_examples():
    # brute-force grid oracle: sup of 2x - x^2 is 1 at x = 1
    assert brute_conjugate(Power(2), 2.0) == pytest.approx(1.0, abs=1e-8)
    assert Power(2).complementary(2) == pytest.approx(1.0, rel=1e-14)
    for phi in CATALOG:
        assert phi.complementary(0) == 0
    # sup of x(0.5 - 1) over x >= 0 is at x = 0
    assert Power(1).complementary(0.5) == 0


@pytest.mark.parametrize("phi", [Power(1.5), Power(2), Power(3), Entropy(),
                                 PiecewiseLinear((0, 1, 3), (0.5, 2, 4))], ids=repr)
def test_complementary_matches_grid_search(phi):
    for y in (0.3, 1.0, 1.7, 3.5):
        assert phi.complementary(y) == pytest.approx(brute_conjugate(phi, y, hi=40, step=1e-4),
                                                     abs=1e-6)


def test_entropy_conjugate_closed_form():
    for y in np.linspace(0, 5, 26):
        assert Entropy().complementary(y) == pytest.approx(math.exp(y) - y - 1, rel=1e-12,
                                                           abs=1e-14)


def test_unbounded_conjugate():
    with pytest.raises(UnboundedConjugate):
        Power(1).complementary(1.5)
    with pytest.raises(UnboundedConjugate):
        PiecewiseLinear((0, 1), (1, 2)).complementary(2.5)
    assert Power(1).complementary(1.0) == 0.0
    assert PiecewiseLinear((0, 1), (1, 2)).complementary(2.0) == pytest.approx(1.0)


def test_delta2():
    for p in (1, 1.5, 2, 3):
        assert Power(p).delta2_estimate(10, 50) == pytest.approx(2**p, rel=1e-14)
    assert Power(1).delta2_estimate(1, 2) == pytest.approx(2.0)
    # dense-grid oracle with the closed form written out independently
    x = np.linspace(1e-3, 10, 200001)
    phi = lambda t: (1 + t) * np.log1p(t) - t
    dense = float(np.max(phi(2 * x) / phi(x)))
    est = Entropy().delta2_estimate(10, 2000)
    assert dense < 5 and est < 5
    assert est == pytest.approx(dense, abs=1e-2)
    with pytest.raises(InvalidInput):
        Entropy().delta2_estimate(0, 10)


@pytest.mark.parametrize("spec", [{"kind": "power", "p": 0.5}, {"kind": "nope"},
                                  {"kind": "plc", "breakpoints": [0, 1], "slopes": [2, 1]},
                                  {"kind": "plc", "breakpoints": [1], "slopes": [1]},
                                  {"kind": "plc", "breakpoints": [0], "slopes": [0]}])
def test_bad_young_specs(spec):
    with pytest.raises(InvalidInput):
        young_from_dict(spec)


def test_round_trip_dict():
    for phi in CATALOG:
        assert young_from_dict(phi.to_dict()) == phi


@pytest.mark.parametrize("phi", CATALOG, ids=repr)
def test_monotone_and_convex(phi):
    x = np.linspace(0, 50, 2001)
    assert np.all(np.diff(phi(x)) >= 0)
    assert np.all(np.diff(phi.derivative(x)) >= 0)


@settings(max_examples=300, deadline=None)
@given(st.sampled_from(CATALOG), st.floats(-1e3, 1e3, allow_nan=False))
def test_evenness(phi, x):
    assert phi(x) == phi(-x)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_power_conjugate_closed_form(p):
    # Phi(x) = x^p / p has conjugate y^q / q; Psi_{x^p}(p y) / p is that conjugate
    q = p / (p - 1)
    for y in np.linspace(0, 10, 101):
        assert Power(p).complementary(p * y) / p == pytest.approx(y**q / q, abs=1e-6)


@pytest.mark.parametrize("phi", [Power(1.5), Power(2), Power(3), Entropy()], ids=repr)
def test_young_inequality(phi):
    grid = np.linspace(0, 10, 41)
    psi = np.array([phi.complementary(y) for y in grid])
    slack = phi(grid)[:, None] + psi[None, :] - np.outer(grid, grid)
    assert slack.min() >= -1e-9
