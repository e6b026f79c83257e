import numpy as np
import pytest
from hypothesis import settings, HealthCheck

import endspec as es
from endspec.oracles import PiecewiseModel, oracle_bound_states, oracle_resonances

settings.register_profile(
    "suite", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def well():
    return es.square_well(5.0, 1.0)


@pytest.fixture(scope="session")
def barrier_pot():
    return es.barrier(8.0, 1.0, 2.0)


@pytest.fixture(scope="session")
def well_energy(well):
    """Matching-equation bound state of the depth-5 width-1 well."""
    states = oracle_bound_states(PiecewiseModel.from_potential(well))
    assert len(states) == 1
    return states[0]


@pytest.fixture(scope="session")
def barrier_resonance(barrier_pot):
    """Matching-equation resonance of the 8·χ_[1,2] barrier (lowest)."""
    roots = oracle_resonances(PiecewiseModel.from_potential(barrier_pot), (0.5, 8.0))
    assert roots, "oracle found no barrier resonance"
    return roots[0]


@pytest.fixture(scope="session")
def barrier_sweep(barrier_pot):
    """Full θ-sweep resonance extraction for the barrier (shared; ~40 s)."""
    model = [es.ModeOperator("cylindrical", 0.0, barrier_pot)]
    grid = es.Grid1D(18.0, 1439)
    return es.find_resonances(model, grid=grid, scaling_radius=3.0)
