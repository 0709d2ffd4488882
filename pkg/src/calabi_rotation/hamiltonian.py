"""Catalog of compactly supported, time-dependent Hamiltonians on the disc.

Every Hamiltonian carries hand-coded Wirtinger derivatives.  With the form
``omega = dx ^ dy`` and ``i_X omega = -dH`` the generating field, read as a
complex number ``xi = dz(X)``, is

    xi = 2i * dH/dzbar = -H_y + i H_x .

All evaluation methods broadcast over numpy arrays of ``t`` and ``z``.
"""
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import DomainError
from .geometry import check_disc_point

FAMILIES = ("radial-polynomial", "radial-bump", "moving-bump", "time-scaled", "concatenation")


def _smootherstep(u):
    """``tau(u) = 35u^4 - 84u^5 + 70u^6 - 20u^7``; ``tau'`` vanishes to third order at 0 and 1."""
    return u ** 4 * (35.0 + u * (-84.0 + u * (70.0 - 20.0 * u)))


def _smootherstep_rate(u):
    return 140.0 * (u * (1.0 - u)) ** 3


def _poly_profile(s, amp, k, rho):
    """``h(s) = amp (1 - s/rho^2)^k`` and ``h'(s)``, zero for ``s >= rho^2``."""
    u = s / rho ** 2
    inside = u < 1.0
    v = np.where(inside, 1.0 - u, 0.0)
    h = np.where(inside, amp * v ** k, 0.0)
    dh = np.where(inside, -amp * k * v ** (k - 1) / rho ** 2, 0.0)
    return h, dh


def _bump_profile(s, amp, rho):
    """``h(s) = amp exp(1 - 1/(1 - s/rho^2))`` and ``h'(s)``, zero for ``s >= rho^2``."""
    u = s / rho ** 2
    inside = u < 1.0
    v = np.where(inside, 1.0 - u, 1.0)
    g = np.where(inside, amp * np.exp(1.0 - 1.0 / v), 0.0)
    dg = np.where(inside, -g / (v * v * rho ** 2), 0.0)
    return g, dg


def _poly_curvature(s, amp, k, rho):
    """``h''(s)`` of the polynomial profile."""
    u = s / rho ** 2
    inside = u < 1.0
    v = np.where(inside, 1.0 - u, 0.0)
    return np.where(inside, amp * k * (k - 1) * v ** (k - 2) / rho ** 4, 0.0)


def _bump_curvature(s, amp, rho):
    """``h''(s) = h(s) (1 - 2v) / (v^4 rho^4)`` with ``v = 1 - s/rho^2``."""
    u = s / rho ** 2
    inside = u < 1.0
    v = np.where(inside, 1.0 - u, 1.0)
    g = np.where(inside, amp * np.exp(1.0 - 1.0 / v), 0.0)
    return g * (1.0 - 2.0 * v) / (v ** 4 * rho ** 4)


def _radial_field_jacobian(w, dh, d2h):
    # xi = 2i h'(s) w with s = |w|^2, so xi_z = 2i (h'' s + h') and xi_zbar = 2i h'' w^2
    s = w.real ** 2 + w.imag ** 2
    return 2j * (d2h * s + dh), 2j * d2h * w * w


@dataclass(frozen=True)
class HamiltonianSpec:
    """One catalog Hamiltonian ``H_t(z)``.

    ``params`` layout per family:

    - radial-polynomial: ``(A, k, rho)``
    - radial-bump: ``(A, rho)``
    - moving-bump: ``(A, rho_B, R)``; bump of radius ``rho_B`` centred at ``R e^{2 pi i t}``
    - time-scaled: polynomial coefficients of ``g(t)``, lowest degree first;
      the scaled Hamiltonian is ``children[0]``
    - concatenation: empty; runs ``children[0]`` on ``[0, 1/2]`` then ``children[1]``

    ``support_radius`` bounds the support for every ``t``.
    """

    family: str
    params: tuple
    support_radius: float
    children: tuple = ()

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown Hamiltonian family {self.family!r}")
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if not 0.0 < self.support_radius <= 1.0:
            raise DomainError("support radius must lie in (0, 1]")
        p = self.params
        if self.family == "radial-polynomial":
            if len(p) != 3 or p[1] < 2 or p[2] != self.support_radius:
                raise DomainError("radial-polynomial needs params (A, k >= 2, rho)")
        elif self.family == "radial-bump":
            if len(p) != 2 or p[1] != self.support_radius:
                raise DomainError("radial-bump needs params (A, rho)")
        elif self.family == "moving-bump":
            if len(p) != 3 or p[1] <= 0 or p[2] < 0:
                raise DomainError("moving-bump needs params (A, rho_B > 0, R >= 0)")
            if p[1] + p[2] > self.support_radius or self.support_radius >= 1.0:
                raise DomainError("moving-bump requires R + rho_B <= rho < 1")
        elif self.family == "time-scaled":
            if len(p) < 1 or len(self.children) != 1:
                raise DomainError("time-scaled needs coefficients and one inner Hamiltonian")
        elif len(self.children) != 2:
            raise DomainError("concatenation needs exactly two Hamiltonians")

    # -- structure ------------------------------------------------------

    @property
    def is_radial_autonomous(self):
        return self.family in ("radial-polynomial", "radial-bump")

    @property
    def is_zero(self):
        """True when ``H_t`` vanishes identically (zero amplitude or zero time factor)."""
        if self.family == "concatenation":
            return all(c.is_zero for c in self.children)
        if self.family == "time-scaled":
            return not any(self.params) or self.children[0].is_zero
        return self.params[0] == 0.0

    @property
    def smoothness(self):
        """Order of spatial differentiability (``k - 1`` for the polynomial family)."""
        if self.family == "radial-polynomial":
            return int(self.params[1]) - 1
        if self.children:
            return min(c.smoothness for c in self.children)
        return np.inf

    def radial_profile(self, s):
        """``(h(s), h'(s))`` for a radial autonomous Hamiltonian ``H = h(|z|^2)``."""
        if self.family == "radial-polynomial":
            return _poly_profile(s, *self.params)
        if self.family == "radial-bump":
            return _bump_profile(s, *self.params)
        raise DomainError(f"{self.family} is not radial and autonomous")

    def support_annulus(self):
        """``(r_in, r_out)``: points with ``|z| <= r_in`` or ``|z| >= r_out`` never move."""
        if self.family == "moving-bump":
            rho_b, radius = self.params[1], self.params[2]
            return (radius - rho_b if radius > rho_b else -1.0), radius + rho_b
        if self.children:
            ann = [c.support_annulus() for c in self.children]
            return min(a[0] for a in ann), max(a[1] for a in ann)
        return -1.0, self.support_radius

    def support_disc(self, t):
        """Centre and radius of a disc containing the support of ``H_t``."""
        if self.family == "moving-bump":
            return self.params[2] * np.exp(2j * np.pi * t), self.params[1]
        if self.family == "time-scaled":
            return self.children[0].support_disc(t)
        if self.family == "concatenation":
            if t < 0.5:
                return self.children[0].support_disc(float(_smootherstep(2.0 * t)))
            return self.children[1].support_disc(float(_smootherstep(2.0 * t - 1.0)))
        return 0j, self.support_radius

    def time_breakpoints(self):
        """Times in [0, 1] where ``H_t`` may lose smoothness in ``t``."""
        if self.family == "time-scaled":
            return self.children[0].time_breakpoints()
        if self.family == "concatenation":
            first = [0.5 * b for b in self.children[0].time_breakpoints()]
            second = [0.5 + 0.5 * b for b in self.children[1].time_breakpoints()]
            return sorted(set(first) | set(second))
        return [0.0, 1.0]

    # -- evaluation (no argument checking) ------------------------------

    def value(self, t, z):
        return self._eval(t, z, derivative=False)

    def dzbar(self, t, z):
        return self._eval(t, z, derivative=True)

    def velocity(self, t, z):
        return 2j * self._eval(t, z, derivative=True)

    def field_jacobian(self, t, z):
        """Wirtinger derivatives ``(d xi/dz, d xi/dzbar)`` of the generating field.

        A tangent vector ``c`` is mapped to ``xi_z c + xi_zbar conj(c)``; the
        divergence of the field is ``2 Re(xi_z)``, identically zero.
        """
        fam, p = self.family, self.params
        if fam in ("radial-polynomial", "radial-bump", "moving-bump"):
            z = np.asarray(z, dtype=complex)
            t = np.asarray(t, dtype=float)
            if fam == "moving-bump":
                w = z - p[2] * np.exp(2j * np.pi * t)
                s = w.real ** 2 + w.imag ** 2
                _, dh = _bump_profile(s, p[0], p[1])
                d2h = _bump_curvature(s, p[0], p[1])
            else:
                w = z + 0.0 * t
                s = w.real ** 2 + w.imag ** 2
                _, dh = self.radial_profile(s)
                curv = _poly_curvature if fam == "radial-polynomial" else _bump_curvature
                d2h = curv(s, *p)
            return _radial_field_jacobian(w, dh, d2h)
        if fam == "time-scaled":
            scale = P.polyval(np.asarray(t, dtype=float), p)
            a, b = self.children[0].field_jacobian(t, z)
            return scale * a, scale * b
        t, z = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(z, dtype=complex))
        a = np.zeros(z.shape, dtype=complex)
        b = np.zeros(z.shape, dtype=complex)
        first = t < 0.5
        for child, mask, u in ((self.children[0], first, 2.0 * t),
                               (self.children[1], ~first, 2.0 * t - 1.0)):
            if np.any(mask):
                um = u[mask]
                rate = 2.0 * _smootherstep_rate(um)
                ca, cb = child.field_jacobian(_smootherstep(um), z[mask])
                a[mask], b[mask] = rate * ca, rate * cb
        return (a, b) if a.ndim else (a[()], b[()])

    def _eval(self, t, z, derivative):
        fam, p = self.family, self.params
        if fam in ("radial-polynomial", "radial-bump"):
            z = np.asarray(z, dtype=complex)
            h, dh = self.radial_profile(z.real ** 2 + z.imag ** 2)
            if not derivative:
                return h + 0.0 * np.asarray(t, dtype=float)
            return dh * z + 0.0 * np.asarray(t, dtype=float)
        if fam == "moving-bump":
            w = z - p[2] * np.exp(2j * np.pi * np.asarray(t, dtype=float))
            g, dg = _bump_profile(w.real ** 2 + w.imag ** 2, p[0], p[1])
            return dg * w if derivative else g
        if fam == "time-scaled":
            scale = P.polyval(np.asarray(t, dtype=float), p)
            return scale * self.children[0]._eval(t, z, derivative)
        return self._eval_concatenation(t, z, derivative)

    def _eval_concatenation(self, t, z, derivative):
        t, z = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(z, dtype=complex))
        out = np.zeros(z.shape, dtype=complex if derivative else float)
        first = t < 0.5
        for child, mask, u in (
            (self.children[0], first, 2.0 * t),
            (self.children[1], ~first, 2.0 * t - 1.0),
        ):
            if np.any(mask):
                um = u[mask]
                rate = 2.0 * _smootherstep_rate(um)
                out[mask] = rate * child._eval(_smootherstep(um), z[mask], derivative)
        return out if out.ndim else out[()]


# -- constructors -------------------------------------------------------

def radial_polynomial(amplitude=1.0, k=3, rho=0.9):
    """``H(z) = A (1 - |z|^2/rho^2)^k`` inside ``|z| < rho``; C^(k-1) at the edge."""
    return HamiltonianSpec("radial-polynomial", (amplitude, k, rho), rho)


def radial_bump(amplitude=1.0, rho=0.9):
    """``H(z) = A exp(1 - 1/(1 - |z|^2/rho^2))`` inside ``|z| < rho``."""
    return HamiltonianSpec("radial-bump", (amplitude, rho), rho)


def moving_bump(amplitude=1.0, rho_b=0.25, radius=0.4, rho=None):
    """Radial bump of radius ``rho_b`` whose centre runs once around ``|c| = radius``."""
    rho = radius + rho_b if rho is None else rho
    return HamiltonianSpec("moving-bump", (amplitude, rho_b, radius), rho)


def time_scaled(coefficients, inner):
    """``H_t = g(t) inner_t`` with ``g`` given by ascending polynomial coefficients."""
    return HamiltonianSpec("time-scaled", tuple(coefficients), inner.support_radius, (inner,))


def scaled(hamiltonian, factor):
    """``factor * H``; leaf families keep their family with a rescaled amplitude."""
    H = hamiltonian
    if H.family in ("radial-polynomial", "radial-bump", "moving-bump"):
        return HamiltonianSpec(H.family, (factor * H.params[0],) + tuple(H.params[1:]),
                               H.support_radius)
    if H.family == "time-scaled":
        return HamiltonianSpec(H.family, tuple(factor * c for c in H.params),
                               H.support_radius, H.children)
    return time_scaled((factor,), H)


def zero():
    """The zero Hamiltonian (identity isotopy)."""
    return radial_polynomial(0.0, 2, 1.0)


def concatenate(first, second):
    """Hamiltonian whose time-one map is ``phi_second o phi_first``.

    ``first`` runs on ``[0, 1/2]`` and ``second`` on ``[1/2, 1]``, each through
    the time change ``tau(u) = 35u^4 - 84u^5 + 70u^6 - 20u^7``.  Its rate
    ``140 u^3 (1-u)^3`` vanishes to third order at the junctions, so the
    concatenated ``H_t`` is C^2 in ``t``.
    """
    rho = max(first.support_radius, second.support_radius)
    return HamiltonianSpec("concatenation", (), rho, (first, second))


# -- checked public evaluation ------------------------------------------

def _check_time(t):
    t_arr = np.asarray(t, dtype=float)
    if not np.all((t_arr >= 0.0) & (t_arr <= 1.0)):
        raise DomainError("time must lie in [0, 1]")
    return t_arr


def evaluate(H, t, z):
    """``H_t(z)``; exactly zero outside the support."""
    _check_time(t)
    return H.value(t, check_disc_point(z))


def wirtinger_dzbar(H, t, z):
    """``dH_t/dzbar = (H_x + i H_y) / 2`` from the closed form."""
    _check_time(t)
    return H.dzbar(t, check_disc_point(z))


def velocity(H, t, z):
    """Generating field ``xi_t(z) = 2i dH_t/dzbar`` as a complex number."""
    _check_time(t)
    return H.velocity(t, check_disc_point(z))
