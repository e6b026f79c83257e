import numpy as np
import pytest

import endspec as es
from endspec.errors import EndspecError
from endspec.potentials import tabulated, zero_potential


def test_square_well_values(well):
    u = np.array([0.0, 0.5, 0.999, 1.001, 3.0])
    assert np.allclose(well(u), [-5, -5, -5, 0, 0])
    assert well.support_radius == 1.0
    assert well.pieces == ((0.0, 1.0, -5.0),)


def test_barrier_values(barrier_pot):
    u = np.array([0.5, 1.0, 1.5, 2.0, 2.5])
    assert np.allclose(barrier_pot(u), [0, 8, 8, 0, 0])
    assert barrier_pot.breakpoints == (1.0, 2.0)


def test_cell_average_exactness(well):
    # cell integral of -5 chi_[0,1] over [u-h/2, u+h/2], exact at the edge
    h = 0.02
    u = np.array([0.99, 1.0, 1.01])
    avg = well.cell_average(u, h)
    assert avg[0] == pytest.approx(-5.0)          # cell entirely inside
    assert avg[1] == pytest.approx(-2.5)          # edge splits the cell
    assert avg[2] == pytest.approx(0.0)


def test_support_violation_rejected():
    with pytest.raises(EndspecError):
        es.RadialPotential(lambda u: np.ones_like(u), 1.0)


def test_smooth_bump_support_and_peak():
    p = es.smooth_bump(0.3, 0.0, 2.0)
    u = np.linspace(0, 3, 301)
    v = p(u)
    assert np.max(np.abs(v[u > 2.0])) == 0.0
    assert np.max(v) == pytest.approx(0.3, rel=1e-3)


def test_tabulated_roundtrip(tmp_path):
    u = np.linspace(0, 2, 41)
    v = np.where(u <= 1.5, np.cos(u), 0.0) * (u <= 1.5)
    path = tmp_path / "pot.txt"
    np.savetxt(path, np.column_stack([u, v]))
    p = tabulated(path)
    probe = np.linspace(0.05, 1.2, 17)
    assert np.max(np.abs(p(probe) - np.cos(probe))) < 1e-3
    assert p(np.array([2.5]))[0] == 0.0


def test_tabulated_rejects_bad_grid(tmp_path):
    path = tmp_path / "bad.txt"
    np.savetxt(path, np.column_stack([[0, 1, 1, 2], [1, 2, 3, 4]]))
    with pytest.raises(EndspecError):
        tabulated(path)


def test_zero_potential_flag():
    assert zero_potential.is_zero
    assert not es.square_well(1.0, 1.0).is_zero
