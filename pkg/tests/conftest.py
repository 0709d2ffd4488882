import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from calabi_rotation import hamiltonian as hm
from calabi_rotation.geometry import substream

settings.register_profile("lab", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("lab")


def catalog():
    """One representative per family, plus the zero Hamiltonian."""
    return {
        "zero": hm.zero(),
        "radial-polynomial-k2": hm.radial_polynomial(1.0, 2, 1.0),
        "radial-polynomial-k3": hm.radial_polynomial(1.0, 3, 0.9),
        "radial-bump": hm.radial_bump(1.0, 0.8),
        "moving-bump": hm.moving_bump(1.0, 0.25, 0.4),
        "time-scaled": hm.time_scaled([0.5, 1.0], hm.radial_bump(1.0, 0.9)),
        "concatenation": hm.concatenate(hm.moving_bump(1.0, 0.25, 0.4), hm.radial_bump(1.0, 0.8)),
    }


CATALOG = catalog()
NONZERO = {k: v for k, v in CATALOG.items() if k != "zero"}


@pytest.fixture
def rng():
    return substream(20240917, 0)


@pytest.fixture(params=sorted(NONZERO))
def nonzero_hamiltonian(request):
    return NONZERO[request.param]


@pytest.fixture(params=sorted(CATALOG))
def any_hamiltonian(request):
    return CATALOG[request.param]


# -- acceptance summary lines -------------------------------------------------

ACCEPTANCE_LINES = {}


def record_criterion(number, passed, detail):
    ACCEPTANCE_LINES[number] = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])


def random_times(rng, n):
    return rng.random(n)


def annulus_points(rng, rho, n):
    """Uniform points of the closed annulus ``rho <= |z| <= 1``."""
    s = rho ** 2 + (1.0 - rho ** 2) * rng.random(n)
    z = np.sqrt(s) * np.exp(2j * np.pi * rng.random(n))
    z[0] = rho
    z[1] = 1.0
    return z
