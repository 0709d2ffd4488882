import numpy as np
import pytest
from hypothesis import given, strategies as st

from calabi_rotation.errors import DomainError
from calabi_rotation.geometry import (
    DISC_AREA,
    PairConfiguration,
    check_disc_point,
    disc_quadrature,
    gauss_legendre01,
    integrate_disc,
    sample_disc_uniform,
    substream,
)
from conftest import CATALOG

disc_coord = st.floats(-0.7, 0.7, allow_nan=False)


def test_check_disc_point_accepts_closed_disc():
    assert check_disc_point(0.6 + 0.8j) == 0.6 + 0.8j
    assert check_disc_point(1.0) == 1.0
    out = check_disc_point([0.1, 0.2j])
    assert out.shape == (2,)


@pytest.mark.parametrize("bad", [1.01, 2j, complex(np.nan, 0), complex(np.inf, 0)])
def test_check_disc_point_rejects(bad):
    with pytest.raises(DomainError):
        check_disc_point(bad)


@given(disc_coord, disc_coord, disc_coord, disc_coord)
def test_pair_configuration_accepts_distinct_points(a, b, c, d):
    z1, z2 = complex(a, b), complex(c, d)
    if z1 == z2:
        with pytest.raises(DomainError):
            PairConfiguration(z1, z2)
    else:
        pair = PairConfiguration(z1, z2)
        assert pair.swapped() == PairConfiguration(z2, z1)


@given(disc_coord, disc_coord)
def test_pair_configuration_rejects_diagonal(a, b):
    with pytest.raises(DomainError):
        PairConfiguration(complex(a, b), complex(a, b))


def test_pair_configuration_is_immutable():
    pair = PairConfiguration(0.1, 0.2)
    with pytest.raises(AttributeError):
        pair.z1 = 0.3


def test_substreams_reproducible_and_distinct():
    a = substream(7, 0, 3).random(5)
    b = substream(7, 0, 3).random(5)
    c = substream(7, 0, 4).random(5)
    d = substream(8, 0, 3).random(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)


def test_sampler_first_draw_inside():
    z = sample_disc_uniform(substream(1))
    assert isinstance(z, complex)
    assert abs(z) < 1


def test_sampler_moments():
    # mean 0 per coordinate with sd sqrt(1/4)/sqrt(N); E|z|^2 = 1/2 with sd sqrt(1/12)/sqrt(N)
    n = 10 ** 6
    z = sample_disc_uniform(substream(11, 2), n)
    assert np.all(np.abs(z) < 1)
    se = 0.5 / np.sqrt(n)
    assert abs(z.real.mean()) <= 3 * se
    assert abs(z.imag.mean()) <= 3 * se
    r2 = np.abs(z) ** 2
    assert abs(r2.mean() - 0.5) <= 3 * r2.std() / np.sqrt(n)


def test_sampler_radial_distribution():
    from scipy import stats
    z = sample_disc_uniform(substream(12), 20000)
    # |z|^2 and arg z/(2 pi) are uniform on [0, 1)
    assert stats.kstest(np.abs(z) ** 2, "uniform").pvalue > 1e-3
    assert stats.kstest(np.mod(np.angle(z) / (2 * np.pi), 1.0), "uniform").pvalue > 1e-3


def test_sampler_draw_count_is_fixed():
    # two variates per sample: drawing n then m equals drawing n + m
    a = sample_disc_uniform(substream(5), 10)
    rng = substream(5)
    b = np.concatenate([sample_disc_uniform(rng, 4), sample_disc_uniform(rng, 6)])
    assert np.array_equal(a, b)


def test_quadrature_examples():
    assert abs(integrate_disc(lambda z: np.ones(z.shape)) - np.pi) <= 1e-12
    assert abs(integrate_disc(lambda z: np.abs(z) ** 2) - np.pi / 2) <= 1e-10
    assert abs(integrate_disc(lambda z: z.real)) <= 1e-12


@given(st.integers(0, 12), st.integers(0, 12))
def test_quadrature_monomials(a, b):
    # int z^a conj(z)^b dm = pi/(a+1) if a == b else 0
    val = integrate_disc(lambda z: z ** a * np.conj(z) ** b, 16, 32)
    exact = np.pi / (a + 1) if a == b else 0.0
    assert abs(val - exact) <= 1e-12


def test_quadrature_on_shifted_disc():
    nodes, w = disc_quadrature(8, 16, center=0.2 - 0.1j, radius=0.5)
    assert abs(w.sum() - np.pi * 0.25) <= 1e-14
    # first moment gives the centre
    assert abs(np.sum(w * nodes) / w.sum() - (0.2 - 0.1j)) <= 1e-14
    assert np.all(np.abs(nodes - (0.2 - 0.1j)) < 0.5)


def test_gauss_legendre_readonly():
    x, w = gauss_legendre01(5)
    assert abs(w.sum() - 1.0) < 1e-15
    with pytest.raises(ValueError):
        x[0] = 0.0
    with pytest.raises(DomainError):
        gauss_legendre01(0)


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_sampler_agrees_with_quadrature(name):
    H = CATALOG[name]
    t = 0.3
    z = sample_disc_uniform(substream(13, 1), 10 ** 6)
    vals = DISC_AREA * H.value(t, z)
    c, r = H.support_disc(t)
    quad = integrate_disc(lambda w: H.value(t, w), 64, 64, c, r)
    se = vals.std(ddof=1) / np.sqrt(vals.size)
    assert abs(vals.mean() - quad) <= 3 * se + 1e-15
