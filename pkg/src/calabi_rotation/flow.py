"""Integration of the Hamiltonian isotopy and area-preservation diagnostics.

The integrator is classical RK4 with step doubling: every trial step of size
``h`` is compared with two steps of size ``h/2``; the two-half-step result is
kept when ``|fine - coarse| / 15`` is below the tolerance.  Steps are clipped
so that every output time is hit exactly, and each point in a batch carries
its own step size, so a point's trajectory never depends on which other
points share the batch.
"""
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DomainError, IntegrationDivergedError
from .geometry import DISC_SLACK, DISC_AREA, check_disc_point, sample_disc_uniform
from .hamiltonian import HamiltonianSpec

N_OUTPUT_TIMES = 256
DEFAULT_TIMES = np.linspace(0.0, 1.0, N_OUTPUT_TIMES)
DEFAULT_TIMES.setflags(write=False)
FD_STEP = 1e-5
_MIN_STEP = 1e-13


@dataclass(frozen=True)
class StepPolicy:
    """Step-size policy: adaptive step doubling, or ``fixed_steps`` per unit time."""

    tolerance: float = 1e-10
    max_step: float = None
    fixed_steps: int = None

    @property
    def method(self):
        return "rk4-fixed" if self.fixed_steps else "rk4-step-doubling"

    def as_dict(self):
        return {"method": self.method, "tolerance": self.tolerance,
                "max_step": self.max_step, "fixed_steps": self.fixed_steps}


@dataclass(frozen=True)
class Trajectory:
    """Time-sampled integral curve ``t -> phi_t(z0)`` with its velocity samples."""

    times: np.ndarray
    points: np.ndarray
    velocities: np.ndarray
    policy: StepPolicy = field(default_factory=StepPolicy)
    steps: int = 0

    @property
    def start(self):
        return complex(self.points[0])

    @property
    def end(self):
        return complex(self.points[-1])


@dataclass(frozen=True)
class FlowDiagnostics:
    max_jacobian_deviation: float
    max_radius_excess: float
    step_count: int


def _rk4(f, t, y, h, k1):
    half = 0.5 * h
    k2 = f(t + half, y + half * k1)
    k3 = f(t + half, y + half * k2)
    k4 = f(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)


def stationary_mask(field, z0):
    """Initial points that provably never move under ``field``."""
    annulus = getattr(field, "support_annulus", None)
    if annulus is None:
        return np.zeros(np.shape(z0), dtype=bool)
    if field.is_zero:
        return np.ones(np.shape(z0), dtype=bool)
    r_in, r_out = annulus()
    # squared modulus, matching the support test used when evaluating H
    s = np.real(z0) ** 2 + np.imag(z0) ** 2
    return (s >= r_out ** 2) | ((r_in >= 0) & (s <= r_in ** 2))


def integrate_many(field, z0, times=DEFAULT_TIMES, policy=None, shared_steps=False):
    """Integrate ``dz/dt = field.velocity(t, z)`` for a batch of initial points.

    Parameters
    ----------
    field : object with ``velocity(t, z)`` broadcasting over arrays
    z0 : complex array_like, shape (n,)
    times : increasing output times; ``times[0]`` is the start time
    policy : StepPolicy
    shared_steps : bool
        Use one step sequence for the whole batch (the step is governed by
        the worst error).  Needed when finite differences are taken across
        the batch, so that all points see the same discrete map.

    Returns
    -------
    points : complex ndarray, shape (n, len(times))
    steps : int ndarray, shape (n,), accepted steps per point
    """
    policy = policy or StepPolicy()
    times = np.asarray(times, dtype=float)
    z0 = np.atleast_1d(np.asarray(z0, dtype=complex))
    n, m = z0.size, times.size
    out = np.empty((n, m), dtype=complex)
    out[:, :] = z0[:, None]
    steps = np.zeros(n, dtype=np.int64)
    if m < 2:
        return out, steps
    if np.any(np.diff(times) <= 0):
        raise DomainError("output times must be strictly increasing")

    moving = ~stationary_mask(field, z0)
    idx = np.flatnonzero(moving)
    if idx.size == 0:
        return out, steps
    f = field.velocity
    if policy.fixed_steps:
        _integrate_fixed(f, z0, idx, times, policy.fixed_steps, out, steps)
        return out, steps

    tol = policy.tolerance
    max_step = policy.max_step or float(np.max(np.diff(times)))
    if isinstance(field, HamiltonianSpec) and not shared_steps:
        status = _kernels.integrate(field, z0, moving, times, tol, max_step,
                                    DISC_SLACK, _MIN_STEP, out, steps)
        if status == _kernels.DIVERGED:
            raise IntegrationDivergedError("trajectory left the disc")
        if status == _kernels.UNDERFLOW:
            raise IntegrationDivergedError("step size underflow during flow integration")
        return out, steps

    y = z0[idx].copy()
    t = np.full(idx.size, times[0])
    k = np.ones(idx.size, dtype=np.int64)
    h = np.full(idx.size, max_step)
    while idx.size:
        t_next = times[k]
        gap = t_next - t
        lands = h >= gap
        hs = np.where(lands, gap, h)
        k1 = f(t, y)
        coarse = _rk4(f, t, y, hs, k1)
        half = 0.5 * hs
        mid = _rk4(f, t, y, half, k1)
        fine = _rk4(f, t + half, mid, half, f(t + half, mid))
        err = np.abs(fine - coarse) / 15.0
        ok = err <= tol
        factor = np.clip(0.9 * (tol / np.maximum(err, 1e-300)) ** 0.2, 0.2, 4.0)
        h_new = np.where(ok & lands & (h > hs), np.maximum(h, hs * factor), hs * factor)
        h_new = np.minimum(h_new, max_step)
        if shared_steps:
            ok[:] = ok.all()
            h_new[:] = h_new.min()
        if np.any(h_new < _MIN_STEP):
            raise IntegrationDivergedError("step size underflow during flow integration")

        y = np.where(ok, fine, y)
        t = np.where(ok, np.where(lands, t_next, t + hs), t)
        steps[idx] += ok
        excess = y.real ** 2 + y.imag ** 2 - 1.0
        if np.any(excess > DISC_SLACK):
            raise IntegrationDivergedError(
                f"trajectory left the disc (|z|^2 - 1 = {excess.max():.3g})")
        rec = ok & lands
        if np.any(rec):
            out[idx[rec], k[rec]] = y[rec]
            k = k + rec
            live = k < m
            if not np.all(live):
                idx, y, t, k, h_new = idx[live], y[live], t[live], k[live], h_new[live]
        h = h_new
    return out, steps


def _integrate_fixed(f, z0, idx, times, per_unit, out, steps):
    y = z0[idx].copy()
    for j in range(1, times.size):
        t0, t1 = times[j - 1], times[j]
        nsub = max(1, int(np.ceil(per_unit * (t1 - t0) - 1e-9)))
        h = (t1 - t0) / nsub
        for i in range(nsub):
            t = t0 + i * h
            y = _rk4(f, t, y, h, f(t, y))
        out[idx, j] = y
        steps[idx] += nsub
    excess = np.abs(out[idx]) ** 2 - 1.0
    if np.any(excess > DISC_SLACK):
        raise IntegrationDivergedError("trajectory left the disc")


def integrate(H, z0, grid=DEFAULT_TIMES, policy=None):
    """Trajectory of a single initial point on the output ``grid``."""
    z0 = check_disc_point(z0)
    policy = policy or StepPolicy()
    grid = np.asarray(grid, dtype=float)
    pts, steps = integrate_many(H, [z0], grid, policy)
    pts = pts[0]
    return Trajectory(grid, pts, H.velocity(grid, pts), policy, int(steps[0]))


def integrate_pairs(H, z1, z2, times=DEFAULT_TIMES, policy=None):
    """Trajectories of two batches of points integrated independently."""
    z1 = np.atleast_1d(z1)
    pts, steps = integrate_many(H, np.concatenate([z1, np.atleast_1d(z2)]), times, policy)
    return pts[: z1.size], pts[z1.size:], steps


def tangent_map(H, z0, t, policy=None):
    """Flow the points ``z0`` to times ``t`` together with their tangent vectors.

    The variational equation ``c' = xi_z c + xi_zbar conj(c)`` is integrated
    alongside the position with the same RK4 steps (step control on the
    position).  Starting from ``c1 = 1`` and ``c2 = i``, the columns of the
    derivative are ``c1`` and ``c2`` at time ``t``.

    Returns
    -------
    z, c1, c2 : complex ndarrays shaped like ``z0``
    """
    policy = policy or StepPolicy()
    z0 = np.asarray(z0, dtype=complex)
    shape = z0.shape
    t_end = np.broadcast_to(np.asarray(t, dtype=float), shape).ravel().copy()
    y = np.stack([z0.ravel(), np.ones(z0.size, dtype=complex), np.full(z0.size, 1j)])

    def rhs(tt, v):
        xi = H.velocity(tt, v[0])
        a, b = H.field_jacobian(tt, v[0])
        return np.stack([xi, a * v[1] + b * np.conj(v[1]), a * v[2] + b * np.conj(v[2])])

    idx = np.flatnonzero((t_end > 0) & ~stationary_mask(H, z0.ravel()))
    tol = policy.tolerance
    max_step = policy.max_step or 1.0 / (N_OUTPUT_TIMES - 1)
    tc = np.zeros(idx.size)
    h = np.full(idx.size, max_step)
    while idx.size:
        v = y[:, idx]
        gap = t_end[idx] - tc
        lands = h >= gap
        hs = np.where(lands, gap, h)
        k1 = rhs(tc, v)
        coarse = _rk4(rhs, tc, v, hs, k1)
        half = 0.5 * hs
        mid = _rk4(rhs, tc, v, half, k1)
        fine = _rk4(rhs, tc + half, mid, half, rhs(tc + half, mid))
        err = np.abs(fine[0] - coarse[0]) / 15.0
        ok = err <= tol
        factor = np.clip(0.9 * (tol / np.maximum(err, 1e-300)) ** 0.2, 0.2, 4.0)
        h = np.minimum(hs * factor, max_step)
        y[:, idx[ok]] = fine[:, ok]
        tc = np.where(ok, tc + hs, tc)
        if np.any(np.abs(y[0, idx]) ** 2 - 1.0 > DISC_SLACK):
            raise IntegrationDivergedError("trajectory left the disc")
        live = ~(ok & lands)
        # a rounding-sized final gap gives h = 0 on the landing step, which is harmless
        if np.any(h[live] < _MIN_STEP):
            raise IntegrationDivergedError("step size underflow in the variational flow")
        idx, tc, h = idx[live], tc[live], h[live]
    return y[0].reshape(shape), y[1].reshape(shape), y[2].reshape(shape)


def jacobian_determinant(H, z0, t, delta=FD_STEP, policy=None, method="variational"):
    """``det D phi_t(z0)``.

    ``method="variational"`` (default) integrates the tangent map; the
    determinant of the computed map is the product of per-step determinants,
    so strong shear does not amplify its error.  ``method="finite-difference"``
    uses central differences of four shared-step trajectories with offset
    ``delta``; it degrades where the flow stretches by orders of magnitude.
    A map that leaves the points fixed yields exactly 1 with either method.
    """
    z0 = check_disc_point(z0)
    if not 0.0 <= t <= 1.0:
        raise DomainError("time must lie in [0, 1]")
    if method == "variational":
        _, c1, c2 = tangent_map(H, z0, t, policy)
        return float(c1.real * c2.imag - c1.imag * c2.real)
    if method != "finite-difference":
        raise DomainError(f"unknown Jacobian method {method!r}")
    if abs(z0) > 1.0 - delta:
        raise DomainError("finite-difference stencil leaves the disc")
    stencil = np.array([z0 + delta, z0 - delta, z0 + 1j * delta, z0 - 1j * delta])
    if t == 0.0:
        return 1.0
    pts, _ = integrate_many(H, stencil, np.array([0.0, t]), policy, shared_steps=True)
    end = pts[:, -1]

    def det(p):
        dx, dy = p[0] - p[1], p[2] - p[3]
        return dx.real * dy.imag - dx.imag * dy.real

    return float(det(end) / det(stencil))


def flow_diagnostics(H, n_points, rng, policy=None):
    """Worst Jacobian deviation and radius excess over random ``(z0, t)``."""
    z0 = sample_disc_uniform(rng, n_points)
    ts = rng.random(n_points)
    _, c1, c2 = tangent_map(H, z0, ts, policy)
    dets = c1.real * c2.imag - c1.imag * c2.real
    pts, steps = integrate_many(H, z0, DEFAULT_TIMES, policy)
    excess = np.maximum(np.abs(pts).max() - 1.0, 0.0)
    return FlowDiagnostics(float(np.max(np.abs(dets - 1.0))), float(excess), int(steps.sum()))


@dataclass(frozen=True)
class PushforwardCheck:
    before: complex
    after: complex
    sigma: float

    @property
    def difference(self):
        return self.after - self.before


def pushforward_invariance_check(H, F, t, n_samples, rng, policy=None):
    """Compare ``int F(z1, z2) dm^2`` with ``int F(phi_t z1, phi_t z2) dm^2``.

    Both Monte Carlo estimates use the same pairs; ``sigma`` is the standard
    error of the paired difference.
    """
    z1 = sample_disc_uniform(rng, n_samples)
    z2 = sample_disc_uniform(rng, n_samples)
    p1, p2, _ = integrate_pairs(H, z1, z2, np.array([0.0, t]) if t > 0 else np.array([0.0]), policy)
    w1, w2 = p1[:, -1], p2[:, -1]
    mass = DISC_AREA ** 2
    f0 = mass * np.asarray(F(z1, z2))
    f1 = mass * np.asarray(F(w1, w2))
    diff = f1 - f0
    sigma = float(np.std(diff, ddof=1) / np.sqrt(n_samples)) if n_samples > 1 else 0.0
    return PushforwardCheck(f0.mean(), f1.mean(), sigma)
