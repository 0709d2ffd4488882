import numpy as np
import pytest

from calabi_rotation import hamiltonian as hm
from calabi_rotation.cauchy_kernel import (
    antiholomorphic,
    area_term,
    boundary_term,
    cauchy_calabi_identity,
    cauchy_pompeiu,
    disc_cauchy_transform,
    hamiltonian_at,
    holomorphic,
    lemma1_bound_check,
    ray_length,
    singular_mass,
)
from calabi_rotation.errors import DomainError
from calabi_rotation.geometry import sample_disc_uniform, substream
from conftest import CATALOG, NONZERO


def test_holomorphic_example():
    f = holomorphic(0, 0, 1)
    res = cauchy_pompeiu(f, 0.3 + 0.2j)
    assert abs(res.reconstructed - (0.05 + 0.12j)) <= 1e-12
    assert res.area_term == 0


def test_conjugate_at_origin():
    res = cauchy_pompeiu(antiholomorphic(0, 1), 0)
    assert abs(res.reconstructed) <= 1e-8
    assert abs(res.boundary_term) <= 1e-12 and abs(res.area_term) <= 1e-12


def test_conjugate_off_centre():
    # boundary term of conj(z) at w is 0; the area term carries conj(w)
    w = 0.4 - 0.3j
    res = cauchy_pompeiu(antiholomorphic(0, 1), w)
    assert abs(res.boundary_term) <= 1e-12
    assert abs(res.area_term - np.conj(w)) <= 1e-10


def test_mixed_polynomial_oracle():
    # |z|^2 z is neither: f_zbar = z^2, boundary values equal z
    class Mixed:
        def value(self, z):
            return np.abs(z) ** 2 * z

        boundary_value = value

        def dzbar(self, z):
            return np.asarray(z) ** 2

        def support_disc(self):
            return 0j, 1.0

    w = 0.25 + 0.5j
    res = cauchy_pompeiu(Mixed(), w)
    assert abs(res.boundary_term - w) <= 1e-12
    assert abs(res.reconstructed - abs(w) ** 2 * w) <= 1e-10


@pytest.mark.parametrize("name", sorted(NONZERO))
def test_hamiltonian_boundary_term_is_zero(name):
    H = NONZERO[name]
    f = hamiltonian_at(H, 0.4)
    for w in (0.0, 0.3 + 0.2j, -0.7j):
        assert boundary_term(f, w) == 0


def catalog_functions():
    funcs = [holomorphic(1, -0.5j, 0.25, 2.0), antiholomorphic(0.3, 1, 0, -0.5j)]
    funcs += [hamiltonian_at(h, t) for h in NONZERO.values() for t in (0.0, 0.5, 1.0)]
    return funcs


@pytest.mark.parametrize("idx", range(2 + 3 * len(NONZERO)))
def test_cauchy_pompeiu_exactness(idx):
    f = catalog_functions()[idx]
    rng = substream(70, idx)
    ws = 0.99 * sample_disc_uniform(rng, 100)
    for w in ws:
        res = cauchy_pompeiu(f, w)
        target = complex(f.value(w))
        assert abs(res.reconstructed - target) <= 1e-6 * (1 + abs(target))


def test_holomorphic_area_term_tiny():
    f = holomorphic(1, 2, 3, 4, 5)
    for w in 0.9 * sample_disc_uniform(substream(71), 20):
        assert abs(area_term(f, w)) <= 1e-10


def test_radial_bump_area_term_equals_value():
    H = CATALOG["radial-bump"]
    f = hamiltonian_at(H, 0.0)
    for w in (0.0, 0.3, 0.5 - 0.2j, 0.79j, 0.95):
        res = cauchy_pompeiu(f, w)
        assert res.boundary_term == 0
        assert abs(res.area_term - H.value(0.0, w)) <= 1e-6


def test_boundary_margin():
    f = holomorphic(0, 1)
    with pytest.raises(DomainError):
        cauchy_pompeiu(f, 0.9995)
    with pytest.raises(DomainError):
        cauchy_pompeiu(f, 1.2)
    cauchy_pompeiu(f, 0.998)


def test_ray_length():
    assert ray_length(0.0, 1.234) == pytest.approx(1.0, abs=1e-15)
    assert ray_length(0.5, 0.0) == pytest.approx(0.5, abs=1e-15)
    assert ray_length(0.5, np.pi) == pytest.approx(1.5, abs=1e-15)
    assert ray_length(1.0, 0.0) == 0.0


def test_disc_cauchy_transform_closed_form():
    z = 0.95 * sample_disc_uniform(substream(72), 200)
    assert np.max(np.abs(disc_cauchy_transform(z) - np.pi * np.conj(z))) <= 1e-10


def test_singular_mass_centre():
    assert abs(singular_mass(0.0) - 2 * np.pi) <= 1e-8


def test_singular_mass_bound():
    z = sample_disc_uniform(substream(73), 1000)
    m = singular_mass(z)
    assert np.all(m <= 4 * np.pi)
    # the centre is the maximiser, the rim the minimiser
    assert np.all(m <= singular_mass(0.0) + 1e-12)
    assert np.all(m >= 4.0 - 1e-12)


def test_singular_mass_boundary():
    m = float(singular_mass(1.0))
    assert 0 < m <= 4 * np.pi
    # direct calculation gives 4 on the rim (ray length 2|cos phi| over a half turn);
    # the kinks of that integrand cost the trapezoid rule its spectral accuracy
    assert abs(m - 4.0) <= 1e-4


def test_singular_mass_continuity():
    z = 0.99 * sample_disc_uniform(substream(74), 1000)
    z = z[np.abs(z + 1e-3) <= 0.99]
    assert np.max(np.abs(singular_mass(z + 1e-3) - singular_mass(z))) <= 1e-2


def test_singular_mass_slope_diverges_at_rim():
    # 4 E(r^2) has a logarithmic slope singularity at r = 1, so the 1e-3 step
    # moves the exact value by more than 1e-2 close to the circle
    from scipy.special import ellipe
    exact = lambda r: 4 * ellipe(r ** 2)
    assert abs(exact(0.999) - exact(0.998)) > 1e-2
    assert abs(exact(0.99) - exact(0.989)) < 1e-2
    got = singular_mass(np.array([0.998, 0.999]))
    assert abs((got[1] - got[0]) - (exact(0.999) - exact(0.998))) <= 1e-8


def test_singular_mass_closed_form_interior():
    # int_0^{2pi} ray length = 4 E(|z|), complete elliptic integral of the second kind
    from scipy.special import ellipe
    r = np.array([0.1, 0.5, 0.9, 0.999])
    assert np.allclose(singular_mass(r), 4 * ellipe(r ** 2), atol=1e-10, rtol=0)


def test_lemma1_zero():
    chk = lemma1_bound_check(CATALOG["zero"], 0.5, 1000, substream(75))
    assert chk.estimate == 0 and chk.majorant == 0 and chk.holds


@pytest.mark.parametrize("name", sorted(NONZERO))
@pytest.mark.parametrize("t", [0.0, 0.5, 1.0])
def test_lemma1_chain(name, t):
    chk = lemma1_bound_check(NONZERO[name], t, 20000, substream(76, sorted(NONZERO).index(name)))
    assert chk.holds
    assert chk.intermediate <= chk.majorant * (1 + 1e-12)
    assert chk.estimate <= chk.intermediate + 3 * chk.standard_error


@pytest.mark.slow
@pytest.mark.parametrize("name,t", [("radial-polynomial-k2", 0.0), ("moving-bump", 0.5)])
def test_lemma1_large_sample(name, t):
    chk = lemma1_bound_check(CATALOG[name], t, 10 ** 5, substream(77))
    assert chk.estimate <= chk.majorant + 3 * chk.standard_error


def test_identity_zero():
    assert cauchy_calabi_identity(CATALOG["zero"], 0.3) == (0, 0)


def test_identity_quadratic():
    lhs, rhs = cauchy_calabi_identity(hm.radial_polynomial(1.0, 2, 1.0), 0.7)
    assert abs(rhs - np.pi / 3) <= 1e-10
    assert abs(lhs - rhs) <= 1e-6 * (1 + abs(rhs))
    assert abs(lhs.imag) <= 1e-8


@pytest.mark.parametrize("name", sorted(NONZERO))
def test_identity_catalog(name):
    lhs, rhs = cauchy_calabi_identity(NONZERO[name], 0.3)
    assert abs(lhs - rhs) <= 1e-6 * (1 + abs(rhs))
    assert abs(lhs.imag) <= 1e-8


def test_identity_time_range():
    with pytest.raises(DomainError):
        cauchy_calabi_identity(CATALOG["radial-bump"], -0.5)
