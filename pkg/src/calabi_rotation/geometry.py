"""Disc conventions: containment, Lebesgue measure, quadrature and sampling.

Points of the disc are plain Python/numpy complex numbers.  The symplectic
form ``(i/2) dz ^ dzbar`` equals ``dx dy`` so the Lebesgue measure ``dm`` has
total mass ``pi`` on the unit disc and ``pi**2`` on the pair space.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError

DISC_SLACK = 1e-12
DISC_AREA = np.pi


def check_disc_point(z, slack=DISC_SLACK):
    """Validate that ``z`` is finite and lies in the closed unit disc.

    Returns ``z`` as a complex (scalar) or complex array.
    """
    arr = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise DomainError("non-finite disc point")
    if np.any(arr.real ** 2 + arr.imag ** 2 > 1.0 + slack):
        raise DomainError("point outside the closed unit disc")
    return complex(arr) if arr.ndim == 0 else arr


@dataclass(frozen=True)
class PairConfiguration:
    """An ordered pair of distinct disc points, i.e. a point of X_2."""

    z1: complex
    z2: complex

    def __post_init__(self):
        z1 = check_disc_point(self.z1)
        z2 = check_disc_point(self.z2)
        if z1 == z2:
            raise DomainError("pair lies on the diagonal (z1 == z2)")
        object.__setattr__(self, "z1", z1)
        object.__setattr__(self, "z2", z2)

    def swapped(self):
        return PairConfiguration(self.z2, self.z1)


# -- random streams ---------------------------------------------------------

def substream(root_seed, *index):
    """Independent counter-based generator for ``(root_seed, *index)``.

    The same key always yields the same stream, so work split by index is
    reproducible whatever the number of workers.
    """
    seq = np.random.SeedSequence(entropy=int(root_seed), spawn_key=tuple(int(i) for i in index))
    return np.random.Generator(np.random.Philox(seq))


def sample_disc_uniform(rng, size=None):
    """Uniform sample(s) on the open unit disc.

    Uses ``r = sqrt(u)``, ``angle = 2 pi v`` so every sample consumes exactly two
    uniform variates.  ``u`` is drawn from ``[0, 1)`` hence ``|z| < 1``.
    """
    n = 1 if size is None else int(np.prod(size))
    uv = rng.random((n, 2))
    z = np.sqrt(uv[:, 0]) * np.exp(2j * np.pi * uv[:, 1])
    if size is None:
        return complex(z[0])
    return z.reshape(size)


# -- quadrature -------------------------------------------------------------

@lru_cache(maxsize=64)
def gauss_legendre01(order):
    """Gauss-Legendre nodes and weights on [0, 1]."""
    if order < 1:
        raise DomainError("quadrature order must be >= 1")
    x, w = np.polynomial.legendre.leggauss(int(order))
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def disc_quadrature(radial_order, angular_order, center=0j, radius=1.0):
    """Tensor quadrature rule for ``integral over |z - center| < radius of f dm``.

    Gauss-Legendre in ``s = r**2`` composed with the trapezoid rule in angle.
    In ``s`` the measure is ``dm = ds dphi / 2``; polynomials ``z**a * conj(z)**b``
    are integrated exactly when ``|a - b| < angular_order`` and
    ``min(a, b) < 2 * radial_order``.

    Returns
    -------
    nodes : complex ndarray, shape (radial_order * angular_order,)
    weights : float ndarray, same shape; sums to ``pi * radius**2``.
    """
    if radial_order < 1 or angular_order < 1:
        raise DomainError("quadrature orders must be >= 1")
    s, ws = gauss_legendre01(radial_order)
    phi = 2 * np.pi * (np.arange(angular_order) + 0.5) / angular_order
    nodes = np.sqrt(s)[:, None] * np.exp(1j * phi)[None, :]
    weights = np.repeat(np.pi * ws / angular_order, angular_order).reshape(nodes.shape)
    return center + radius * nodes.ravel(), radius ** 2 * weights.ravel()


def integrate_disc(f, radial_order=64, angular_order=64, center=0j, radius=1.0):
    """Apply :func:`disc_quadrature` to a vectorised integrand ``f(z)``."""
    nodes, weights = disc_quadrature(radial_order, angular_order, center, radius)
    return np.sum(weights * f(nodes))
