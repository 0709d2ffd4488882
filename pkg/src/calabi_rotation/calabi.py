"""Calabi invariant: the space-time integral of the normalised Hamiltonian."""
from dataclasses import dataclass

import numpy as np

from .geometry import disc_quadrature, gauss_legendre01

DEFAULT_ORDERS = (64, 64, 32)


@dataclass(frozen=True)
class CalabiResult:
    value: float
    orders: tuple
    error: float


def _calabi_at(H, orders):
    radial, angular, temporal = orders
    tau, wtau = gauss_legendre01(temporal)
    breaks = H.time_breakpoints()
    total = 0.0
    for a, b in zip(breaks[:-1], breaks[1:]):
        for s, ws in zip(a + (b - a) * tau, (b - a) * wtau):
            center, radius = H.support_disc(s)
            nodes, weights = disc_quadrature(radial, angular, center, radius)
            total += ws * np.sum(weights * H.value(s, nodes))
    return float(total)


def calabi(H, orders=DEFAULT_ORDERS):
    """``Cal = int_0^1 dt int_D H_t dm`` by tensor quadrature.

    Disc rule over the support disc of ``H_t`` times Gauss-Legendre in time on
    each smooth time interval.  The value is computed at ``orders`` and at
    doubled orders; the refined value is returned and their difference is the
    error estimate.
    """
    coarse = _calabi_at(H, tuple(orders))
    fine_orders = tuple(2 * o for o in orders)
    fine = _calabi_at(H, fine_orders)
    return CalabiResult(fine, fine_orders, abs(fine - coarse))
