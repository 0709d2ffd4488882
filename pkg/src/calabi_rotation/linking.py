"""Winding of point pairs under the flow and the average rotation number.

For a pair ``x = (z1, z2)`` the Arnold form ``alpha = d(z1 - z2) / (2 pi (z1 - z2))``
integrates along ``t -> (phi_t z1, phi_t z2)`` to

    (log|d(1)| - log|d(0)|) / (2 pi)  +  i * (winding in turns),

with ``d = phi_t z1 - phi_t z2``.  The average rotation number integrates the
winding over ``D x D`` against ``dm^2`` (total mass ``pi**2``).
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from .cauchy_kernel import disc_cauchy_transform
from .errors import DomainError, NearCollisionError, SamplingDegeneracyError
from .flow import DEFAULT_TIMES, StepPolicy, integrate_many
from .geometry import DISC_AREA, gauss_legendre01, sample_disc_uniform, substream

COLLISION_GUARD = 1e-14
UNWRAP_LIMIT = np.pi / 2
MAX_SUBDIVISION_DEPTH = 40
CHUNK_SIZE = 8192
MC_STREAM = 0
PAIR_MASS = DISC_AREA ** 2


@dataclass(frozen=True)
class PairWinding:
    winding: float
    line_integral: complex
    method: str


@dataclass(frozen=True)
class RotationEstimate:
    """Estimate of the average rotation number and of the complex integral of alpha."""

    phi: float
    standard_error: float
    sample_count: int
    estimator: str
    phi_complex: complex = None
    phi_complex_error: complex = None
    redraws: int = 0
    samples: np.ndarray = field(default=None, repr=False, compare=False)


# -- argument tracking ----------------------------------------------------

def _refined_increment(p0, p1, v0, v1, dt, depth=0):
    """Argument change of the cubic Hermite curve from ``p0`` to ``p1``.

    Bisects until every sub-step turns by less than ``UNWRAP_LIMIT``; the
    midpoint value and slope come from the Hermite interpolant.
    """
    step = np.angle(p1 * np.conj(p0))
    if abs(step) < UNWRAP_LIMIT:
        return step
    if depth >= MAX_SUBDIVISION_DEPTH:
        raise NearCollisionError("argument unwrapping did not resolve")
    pm = 0.5 * (p0 + p1) + dt * (v0 - v1) / 8.0
    vm = 1.5 * (p1 - p0) / dt - 0.25 * (v0 + v1)
    if abs(pm) < COLLISION_GUARD:
        raise NearCollisionError("pair collided between grid times")
    half = 0.5 * dt
    return (_refined_increment(p0, pm, v0, vm, half, depth + 1)
            + _refined_increment(pm, p1, vm, v1, half, depth + 1))


def _arg_windings(diff, times, diff_velocity):
    """Windings (turns) and log-modulus changes of difference curves.

    Parameters
    ----------
    diff : complex ndarray (n, m), ``z1(t) - z2(t)`` on the grid
    diff_velocity : callable ``rows -> (len(rows), m)`` velocities of ``diff``,
        only evaluated for rows that need subdivision

    Returns
    -------
    turns, log_change : float ndarrays (n,)
    collided : bool ndarray (n,)
    """
    mod = np.abs(diff)
    collided = np.any(mod < COLLISION_GUARD, axis=1)
    safe = np.where(mod < COLLISION_GUARD, 1.0, diff)
    # arg(b conj(a)) from real products: exactly 0 when a == b, so fixed points add no winding
    a, b = safe[:, :-1], safe[:, 1:]
    steps = np.arctan2(a.real * b.imag - a.imag * b.real, a.real * b.real + a.imag * b.imag)
    rows, cols = np.nonzero((np.abs(steps) >= UNWRAP_LIMIT) & ~collided[:, None])
    if rows.size:
        urows, inv = np.unique(rows, return_inverse=True)
        vel = diff_velocity(urows)
        dt = np.diff(times)
        for r, u, c in zip(rows, inv, cols):
            try:
                steps[r, c] = _refined_increment(diff[r, c], diff[r, c + 1],
                                                 vel[u, c], vel[u, c + 1], dt[c])
            except NearCollisionError:
                collided[r] = True
    turns = steps.sum(axis=1) / (2 * np.pi)
    log_change = np.log(np.abs(safe[:, -1])) - np.log(np.abs(safe[:, 0]))
    turns[collided] = np.nan
    log_change[collided] = np.nan
    return turns, log_change, collided


def _check_pair(traj1, traj2):
    if traj1.times.shape != traj2.times.shape or np.any(traj1.times != traj2.times):
        raise DomainError("trajectories must share the same time grid")
    if traj1.points[0] == traj2.points[0]:
        raise DomainError("initial points coincide")


def pair_winding_arg(traj1, traj2):
    """Winding of ``z1(t) - z2(t)`` by continuous argument tracking."""
    _check_pair(traj1, traj2)
    diff = (traj1.points - traj2.points)[None, :]
    dvel = (traj1.velocities - traj2.velocities)[None, :]
    turns, log_change, collided = _arg_windings(diff, traj1.times, lambda rows: dvel[rows])
    if collided[0]:
        raise NearCollisionError("pair trajectories collided")
    w = float(turns[0])
    return PairWinding(w, complex(log_change[0] / (2 * np.pi), w), "argument-tracking")


# -- integrand quadrature ---------------------------------------------------

def _integrand_line_integrals(H, z1, z2, times, policy=None, nodes=5, subdivisions=4):
    """``(1/2pi) int (xi(z1) - xi(z2)) / (z1 - z2) dt`` by composite Gauss-Legendre.

    Each interval of ``times`` is split into ``subdivisions`` pieces carrying
    ``nodes`` Gauss points each; the pair positions at those instants come
    from the adaptive integrator, which is made to land on every node.  The
    splitting matters when a bump sweeps past the pair faster than one grid
    interval resolves.
    """
    x, wts = gauss_legendre01(nodes)
    times = np.interp(np.arange((times.size - 1) * subdivisions + 1) / subdivisions,
                      np.arange(times.size), times)
    dt = np.diff(times)
    node_t = (times[:-1, None] + dt[:, None] * x[None, :]).ravel()
    node_w = (dt[:, None] * wts[None, :]).ravel()
    z1, z2 = np.atleast_1d(z1), np.atleast_1d(z2)
    n = z1.size
    pts, _ = integrate_many(H, np.concatenate([z1, z2]),
                            np.concatenate([[times[0]], node_t]), policy)
    pts = pts[:, 1:]
    d = pts[:n] - pts[n:]
    if np.any(np.abs(d) < COLLISION_GUARD):
        raise NearCollisionError("pair collided between grid times")
    xi = H.velocity(node_t[None, :], pts)
    return np.sum(node_w * (xi[:n] - xi[n:]) / d, axis=1) / (2 * np.pi)


def pair_winding_integrand(H, traj1, traj2, nodes=5):
    """Line integral of alpha by quadrature of its time integrand."""
    _check_pair(traj1, traj2)
    value = _integrand_line_integrals(H, traj1.start, traj2.start, traj1.times,
                                      traj1.policy, nodes)[0]
    return PairWinding(float(value.imag), complex(value), "integrand-quadrature")


def pair_windings_many(H, z1, z2, times=DEFAULT_TIMES, policy=None, method="argument-tracking"):
    """Vectorised pair line integrals of alpha; returns a complex array."""
    z1, z2 = np.atleast_1d(z1), np.atleast_1d(z2)
    times = np.asarray(times, dtype=float)
    if method == "integrand-quadrature":
        return _integrand_line_integrals(H, z1, z2, times, policy)
    pts, _ = integrate_many(H, np.concatenate([z1, z2]), times, policy)
    p1, p2 = pts[: z1.size], pts[z1.size:]
    turns, log_change, collided = _arg_windings(
        p1 - p2, times, partial(_diff_velocity, H, p1, p2, times))
    if np.any(collided):
        raise NearCollisionError(f"{collided.sum()} pair(s) collided")
    return log_change / (2 * np.pi) + 1j * turns


def _diff_velocity(H, p1, p2, times, rows):
    return H.velocity(times, p1[rows]) - H.velocity(times, p2[rows])


# -- Monte Carlo over the configuration space -------------------------------

def _draw_pairs(rng, n):
    z1 = sample_disc_uniform(rng, n)
    z2 = sample_disc_uniform(rng, n)
    redraws = 0
    same = z1 == z2
    while np.any(same):
        k = int(same.sum())
        redraws += k
        z1[same] = sample_disc_uniform(rng, k)
        z2[same] = sample_disc_uniform(rng, k)
        same = z1 == z2
    return z1, z2, redraws


def _mc_chunk(H, seed, policy, chunk, size):
    """Pair line integrals for one fixed chunk of the sample sequence."""
    rng = substream(seed, MC_STREAM, chunk)
    z1, z2, redraws = _draw_pairs(rng, size)
    turns = np.empty(size)
    logs = np.empty(size)
    todo = np.arange(size)
    while todo.size:
        pts, _ = integrate_many(H, np.concatenate([z1[todo], z2[todo]]), DEFAULT_TIMES, policy)
        p1, p2 = pts[: todo.size], pts[todo.size:]
        tt, ll, collided = _arg_windings(p1 - p2, DEFAULT_TIMES,
                                         partial(_diff_velocity, H, p1, p2, DEFAULT_TIMES))
        turns[todo], logs[todo] = tt, ll
        todo = todo[collided]
        if todo.size:
            redraws += todo.size
            z1[todo], z2[todo], extra = _draw_pairs(rng, todo.size)
            redraws += extra
    return turns, logs, redraws


def _chunk_sizes(n_samples, chunk_size):
    full, rest = divmod(n_samples, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def average_rotation_mc(H, n_samples, seed, workers=1, policy=None, chunk_size=CHUNK_SIZE,
                        keep_samples=False):
    """Monte Carlo estimate of the average rotation number.

    Pairs are drawn uniformly on ``D x D`` in fixed chunks; chunk ``k`` always
    uses the substream ``(seed, k)``, so the estimate is bit-identical for any
    number of ``workers``.  Exact collisions and pairs that come closer than
    ``COLLISION_GUARD`` are redrawn and counted.

    Returns a :class:`RotationEstimate` whose ``phi_complex`` is the matching
    estimate of the complex integral of alpha over the same samples.
    """
    if n_samples < 100:
        raise DomainError("need at least 100 samples")
    policy = policy or StepPolicy()
    sizes = _chunk_sizes(int(n_samples), int(chunk_size))
    task = partial(_mc_chunk, H, int(seed), policy)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(task, range(len(sizes)), sizes))
    else:
        parts = [task(k, s) for k, s in enumerate(sizes)]
    turns = np.concatenate([p[0] for p in parts])
    logs = np.concatenate([p[1] for p in parts]) / (2 * np.pi)
    redraws = sum(p[2] for p in parts)
    if redraws > 0.01 * n_samples:
        raise SamplingDegeneracyError(f"{redraws} redraws for {n_samples} samples")
    root_n = np.sqrt(turns.size)
    phi = PAIR_MASS * turns.mean()
    se = PAIR_MASS * turns.std(ddof=1) / root_n
    lam = PAIR_MASS * complex(logs.mean(), turns.mean())
    lam_se = PAIR_MASS * complex(logs.std(ddof=1) / root_n, turns.std(ddof=1) / root_n)
    return RotationEstimate(float(phi), float(se), int(turns.size), "monte-carlo",
                            lam, lam_se, int(redraws),
                            (logs + 1j * turns) if keep_samples else None)


def average_rotation_radial(H, radial_order=64):
    """Deterministic rotation number of a radial autonomous ``H = h(|z|^2)``.

    Averaging the winding over independent uniform angles leaves the angular
    speed ``2 h'(s)`` of the outer point; integrating over both radii gives
    ``Phi = -2 pi * int_0^1 h(s) ds``.
    """
    if not H.is_radial_autonomous:
        raise DomainError(f"{H.family} is not radial and autonomous")
    top = H.support_radius ** 2
    s, w = gauss_legendre01(radial_order)
    h, _ = H.radial_profile(top * s)
    return RotationEstimate(float(-2 * np.pi * top * np.sum(w * h)), 0.0, 0, "radial-quadrature")


# -- symmetry reduction ---------------------------------------------------

@dataclass(frozen=True)
class SymmetryCheck:
    lhs: complex
    rhs: complex
    sigma: float

    @property
    def z_score(self):
        return abs(self.lhs - self.rhs) / self.sigma if self.sigma > 0 else (
            0.0 if self.lhs == self.rhs else np.inf)


def symmetry_reduction_check(H, t, n_samples, rng, angular_order=256):
    """Compare both sides of the symmetry reduction at a fixed time.

    ``lhs = int int (xi(z) - xi(w)) / (z - w) dm(z) dm(w)`` by Monte Carlo over
    pairs, ``rhs = 2 int xi(z) C(z) dm(z)`` over the first coordinates of the
    same pairs, where ``C(z) = int dm(w) / (z - w)`` comes from the polar rule.
    ``sigma`` is the standard error of the paired difference.
    """
    if not 0.0 <= t <= 1.0:
        raise DomainError("time must lie in [0, 1]")
    z = sample_disc_uniform(rng, n_samples)
    w = sample_disc_uniform(rng, n_samples)
    keep = z != w
    z, w = z[keep], w[keep]
    xz, xw = H.velocity(t, z), H.velocity(t, w)
    lhs = PAIR_MASS * (xz - xw) / (z - w)
    rhs = 2 * DISC_AREA * xz * disc_cauchy_transform(z, angular_order)
    diff = lhs - rhs
    sigma = float(np.std(diff) / np.sqrt(diff.size))
    return SymmetryCheck(complex(lhs.mean()), complex(rhs.mean()), sigma)
