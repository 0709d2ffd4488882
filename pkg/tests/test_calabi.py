import numpy as np
import pytest
from scipy.integrate import quad

from calabi_rotation import hamiltonian as hm
from calabi_rotation.calabi import calabi
from conftest import CATALOG, NONZERO

QUADRATIC = hm.radial_polynomial(1.0, 2, 1.0)


def bump_oracle(A, rho):
    """``pi * int_0^{rho^2} h(s) ds`` by adaptive 1-D quadrature."""
    val, _ = quad(lambda s: np.exp(1 - 1 / (1 - s / rho ** 2)), 0, rho ** 2,
                  epsabs=1e-15, epsrel=1e-13)
    return np.pi * A * val


def test_zero():
    res = calabi(CATALOG["zero"])
    assert res.value == 0.0 and res.error == 0.0


def test_quadratic_profile():
    res = calabi(QUADRATIC)
    assert abs(res.value - np.pi / 3) <= 1e-10
    assert res.error >= 0 and res.orders == (128, 128, 64)


def test_time_scaled_linear_ramp():
    res = calabi(hm.time_scaled([0.0, 2.0], QUADRATIC))
    assert abs(res.value - np.pi / 3) <= 1e-10


@pytest.mark.parametrize("A,rho", [(1.0, 0.8), (2.5, 0.3), (-1.0, 0.95)])
def test_radial_bump_against_scipy(A, rho):
    assert abs(calabi(hm.radial_bump(A, rho)).value - bump_oracle(A, rho)) <= 1e-10


def test_polynomial_family_closed_form():
    # pi * A * rho^2 / (k + 1)
    for A, k, rho in [(1.0, 3, 0.9), (0.7, 4, 0.5), (2.0, 2, 1.0)]:
        expected = np.pi * A * rho ** 2 / (k + 1)
        assert abs(calabi(hm.radial_polynomial(A, k, rho)).value - expected) <= 1e-10


def test_moving_bump_frozen_value():
    # translation invariance: the stationary bump oracle
    assert abs(calabi(CATALOG["moving-bump"]).value - bump_oracle(1.0, 0.25)) <= 1e-9
    assert abs(calabi(CATALOG["moving-bump"]).value - 0.07925701007) <= 1e-10


def test_translation_invariance():
    for rho_b, radius in [(0.25, 0.4), (0.2, 0.7), (0.45, 0.5)]:
        moving = calabi(hm.moving_bump(1.0, rho_b, radius)).value
        still = calabi(hm.radial_bump(1.0, rho_b)).value
        assert abs(moving - still) <= 1e-9


@pytest.mark.parametrize("pair", [("moving-bump", "radial-bump"), ("radial-polynomial-k3", "time-scaled"),
                                  ("radial-polynomial-k2", "moving-bump")])
def test_additivity(pair):
    a, b = NONZERO[pair[0]], NONZERO[pair[1]]
    total = calabi(hm.concatenate(a, b)).value
    assert abs(total - calabi(a).value - calabi(b).value) <= 1e-9


@pytest.mark.parametrize("name", sorted(NONZERO))
@pytest.mark.parametrize("c", [-3.0, 0.5, 4.0])
def test_linearity(name, c):
    H = NONZERO[name]
    assert abs(calabi(hm.scaled(H, c)).value - c * calabi(H).value) <= 1e-12


@pytest.mark.parametrize("name", sorted(NONZERO))
def test_error_estimate_small(name):
    res = calabi(NONZERO[name])
    assert np.isfinite(res.value) and 0 <= res.error <= 1e-10
