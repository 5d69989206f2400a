import numpy as np
import pytest

from ductbarrier import FrequencyBand, Geometry, ModeMatchSolver

DESK = dict(H=1.0, x0=0.45, delta=0.1, w=0.3, L=2.0)


@pytest.fixture(scope="session")
def desk_geometry():
    return Geometry(**DESK)


@pytest.fixture(scope="session")
def desk_solver(desk_geometry):
    return ModeMatchSolver(desk_geometry, 200, 30)


@pytest.fixture(scope="session")
def desk_band():
    return FrequencyBand(3.2, 6.2, 400)


@pytest.fixture(scope="session")
def band_100():
    # 100-point sweep of the desk band, clear of the spectral edges
    return np.linspace(np.pi * (1.0 + 1e-4), 2.0 * np.pi * (1.0 - 1e-4), 100)


def centered_hole(delta, **overrides):
    """Desk-like geometry with a centered hole of the given width."""
    params = dict(DESK, x0=(DESK["H"] - delta) / 2.0, delta=delta)
    params.update(overrides)
    return Geometry(**params)
