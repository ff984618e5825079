import numpy as np
import pytest

from vibcontrol.config import default_config
from vibcontrol.curves import bundled_curves, sample_on_grid
from vibcontrol.eigen import solve_bound_states
from vibcontrol.grids import RadialGrid
from vibcontrol.pipeline import (PumpSpec, ScanContext, franck_condon_pump,
                                 neutral_ground_field)
from vibcontrol.propagation import PropagationConfig
from vibcontrol.units import D2_PLUS_REDUCED_MASS

EIGEN_R_CUT = 20.0


@pytest.fixture(scope="session")
def curves():
    return bundled_curves()


@pytest.fixture(scope="session")
def grid():
    return RadialGrid(0.1, 40.0, 2048)


@pytest.fixture(scope="session")
def sampled(curves, grid):
    return sample_on_grid(curves, grid)


@pytest.fixture(scope="session")
def basis(grid, sampled):
    """Full bound manifold of the ion well."""
    return solve_bound_states(grid, sampled.v_g, D2_PLUS_REDUCED_MASS,
                              r_cut=EIGEN_R_CUT)


@pytest.fixture(scope="session")
def d2_ground(basis):
    return neutral_ground_field(basis, PumpSpec())


@pytest.fixture(scope="session")
def fc(basis, d2_ground):
    """(state, coefficients) of the Franck-Condon pumped wavepacket."""
    return franck_condon_pump(d2_ground, basis)


@pytest.fixture(scope="session")
def scan_context(basis, sampled, fc):
    cfg = default_config()
    p = cfg["propagation"]
    prop = PropagationConfig(dt=p["dt"], absorber_fraction=p["absorber_fraction"],
                             absorber_strength=p["absorber_strength"])
    return ScanContext(basis, sampled, prop, fc[1], int(cfg["eigen"]["n_states"]))


@pytest.fixture()
def rng():
    return np.random.default_rng(20260809)
