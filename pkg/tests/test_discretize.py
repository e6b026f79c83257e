import numpy as np
import pytest

import endspec as es
from endspec.discretize import DiscretizedOperator, aligned_grid, effective_ray_direction
from endspec.errors import EndspecError, GridError
from endspec.oracles import PiecewiseModel, oracle_resonances


class TestGrids:
    def test_step_and_points(self):
        g = es.Grid1D(12.0, 599)
        assert g.h == pytest.approx(0.02)
        assert len(g.points) == 599
        assert g.points[0] == pytest.approx(g.h)

    def test_minimum_points(self):
        with pytest.raises(GridError):
            es.Grid1D(10.0, 20)

    def test_coarsened_partner(self):
        g = es.Grid1D(12.0, 599)
        gc = g.coarsened()
        assert gc.h == pytest.approx(2 * g.h)

    def test_aligned_grid_places_breakpoints_on_nodes(self):
        g = aligned_grid(18.0, 1440, (1.0, 2.0, 3.0))
        for b in (1.0, 2.0, 3.0):
            assert abs(b / g.h - round(b / g.h)) < 1e-9
        gc = g.coarsened()
        for b in (1.0, 2.0, 3.0):
            assert abs(b / gc.h - round(b / gc.h)) < 1e-9


class TestDiscretize:
    def test_free_dirichlet_spectrum(self):
        op = es.ModeOperator("cylindrical", 0.0)
        grid = es.Grid1D(np.pi * 101 / 100, 100)
        vals = np.linalg.eigvalsh(es.discretize(op, grid).matrix)
        ks = np.arange(1, 101)
        exact_fd = (2 - 2 * np.cos(ks * np.pi * grid.h / grid.L)) / grid.h**2
        assert np.allclose(np.sort(vals), np.sort(exact_fd), rtol=1e-12)
        assert abs(vals[0] - (np.pi / grid.L) ** 2) < 3 * grid.h**2

    def test_mu_shift_is_exact(self):
        grid = es.Grid1D(8.0, 199)
        a0 = es.discretize(es.ModeOperator("cylindrical", 0.0), grid).matrix
        a1 = es.discretize(es.ModeOperator("cylindrical", 1.0), grid).matrix
        assert np.array_equal(a1, a0 + np.eye(199))

    def test_theta_zero_matrix_symmetric_real(self, well):
        grid = es.Grid1D(12.0, 599)
        A = es.discretize(es.ModeOperator("cylindrical", 0.0, well), grid).matrix
        assert np.isrealobj(A)
        assert np.array_equal(A, A.T)

    def test_well_bound_state_against_matching_equation(self, well, well_energy):
        op = es.ModeOperator("cylindrical", 0.0, well)
        grid = es.Grid1D(12.0, 799)
        vals = np.linalg.eigvalsh(es.discretize(op, grid).matrix)
        assert abs(vals[0] - well_energy) < 1e-4

    def test_coarse_grid_rejected(self):
        with pytest.raises(GridError):
            es.discretize(es.ModeOperator("cylindrical", 0.0), es.Grid1D(30.0, 100))

    def test_grid_shorter_than_scaling_radius_rejected(self):
        op = es.ModeOperator("cylindrical", 0.0)
        s = es.dilate_mode(op, 0.4 + 0.3j, 9.0)
        with pytest.raises(GridError):
            es.discretize(s, es.Grid1D(8.0, 599))

    def test_cusp_direct_discretization_refused(self):
        with pytest.raises(EndspecError):
            es.discretize(es.ModeOperator("cusp", 0.0, dimension_n=2), es.Grid1D(8.0, 199))

    def test_fd4_free_spectrum_beats_fd2(self):
        op = es.ModeOperator("cylindrical", 0.0)
        g2 = es.Grid1D(10.0, 299, "fd2")
        g4 = es.Grid1D(10.0, 299, "fd4")
        e2 = np.linalg.eigvalsh(es.discretize(op, g2).matrix)[0]
        vals4 = np.sort(np.real([z for z, _ in es.eig(es.discretize(op, g4))]))
        exact = (np.pi / 10.0) ** 2
        assert abs(vals4[0] - exact) < abs(e2 - exact) / 20

    def test_fd4_with_junction_rejected(self):
        op = es.ModeOperator("cylindrical", 0.0)
        s = es.dilate_mode(op, 0.4 + 0.3j, 2.0)
        with pytest.raises(GridError):
            es.discretize(s, es.Grid1D(10.0, 299, "fd4"))


class TestEig:
    def test_diagonal(self):
        g = es.Grid1D(8.0, 199)
        A = np.diag(np.arange(1.0, 200.0))
        pairs = es.eig(DiscretizedOperator(A, g, "diag"))
        vals = [z for z, _ in pairs]
        assert vals[:3] == [1.0, 2.0, 3.0]
        assert all(r < 1e-14 for _, r in pairs)

    def test_rotation_block(self):
        g = es.Grid1D(8.0, 199)
        A = np.zeros((199, 199))
        A[0, 1], A[1, 0] = 1.0, -1.0
        pairs = es.eig(DiscretizedOperator(A, g, "rot"))
        vals = sorted((z for z, _ in pairs), key=lambda z: z.imag)
        assert vals[0] == pytest.approx(-1j)
        assert vals[-1] == pytest.approx(1j)

    def test_scaled_free_cloud_matches_grid_eigenvalues(self):
        """Scaling from the origin multiplies the grid spectrum by θ' exactly."""
        op = es.ModeOperator("cylindrical", 0.0)
        grid = es.Grid1D(10.0, 399)
        s = es.dilate_mode(op, 0.4 + 0.3j, 0.0)
        vals = np.array([z for z, _ in es.eig(es.discretize(s, grid))])
        tp = es.theta_prime(0.4 + 0.3j)
        ks = np.arange(1, 400)
        expect = tp * (2 - 2 * np.cos(ks * np.pi * grid.h / grid.L)) / grid.h**2
        vals = vals[np.argsort(vals.real)]
        expect = expect[np.argsort(expect.real)]
        assert np.max(np.abs(vals - expect)) < 1e-9 * np.max(np.abs(expect))

    def test_residual_certificates(self, well):
        grid = es.Grid1D(12.0, 399)
        s = es.dilate_mode(es.ModeOperator("cylindrical", 0.0, well), 0.4 + 0.3j, 2.0)
        pairs = es.eig(es.discretize(s, grid))
        assert max(r for _, r in pairs) < 1e-10

    def test_nonfinite_rejected(self):
        g = es.Grid1D(8.0, 199)
        A = np.full((199, 199), np.nan)
        with pytest.raises(es.NumericalError):
            es.eig(DiscretizedOperator(A, g, "bad"))


class TestFindResonances:
    def test_free_model_empty(self):
        rs = es.find_resonances([es.ModeOperator("cylindrical", 0.0)],
                                grid=es.Grid1D(12.0, 599), scaling_radius=2.0)
        assert len(rs) == 0

    def test_barrier_resonance_matches_oracle(self, barrier_sweep, barrier_resonance):
        res = barrier_sweep.resonances()
        assert len(res) >= 1
        closest = min(res, key=lambda r: abs(r.z - barrier_resonance))
        assert abs(closest.z - barrier_resonance) < 1e-6
        assert closest.theta_spread <= 1e-6
        assert closest.z.imag < 0

    def test_well_bound_state(self, well, well_energy):
        rs = es.find_resonances([es.ModeOperator("cylindrical", 0.0, well)],
                                grid=es.Grid1D(16.0, 1067), scaling_radius=8.0)
        bound = rs.bound()
        assert len(bound) == 1
        assert abs(bound[0].z - well_energy) < 1e-5
        assert bound[0].z.imag == 0.0

    def test_multiplicity_carried_not_duplicated(self, well):
        cs = es.make_cross_section("list", [(0.0, 2)])
        model = es.reduce_cylindrical(cs, {0: well})
        assert len(model) == 2
        rs = es.find_resonances(model, grid=es.Grid1D(16.0, 1067), scaling_radius=8.0)
        assert len(rs.bound()) == 1
        assert rs.bound()[0].multiplicity == 2

    def test_empty_sweep_rejected(self, well):
        with pytest.raises(EndspecError):
            es.find_resonances([es.ModeOperator("cylindrical", 0.0, well)], thetas=())

    def test_mixed_imaginary_signs_rejected(self, well):
        with pytest.raises(EndspecError):
            es.find_resonances([es.ModeOperator("cylindrical", 0.0, well)],
                               thetas=(0.4 + 0.3j, 0.4 - 0.3j))

    def test_conjugation_symmetry(self, barrier_pot, barrier_sweep):
        """Sweeping conj(θ) reflects the resonance set across the real axis."""
        model = [es.ModeOperator("cylindrical", 0.0, barrier_pot)]
        conj_sweep = tuple(np.conj(t) for t in es.THETA_SWEEP_DEFAULT)
        rs_conj = es.find_resonances(model, thetas=conj_sweep,
                                     grid=es.Grid1D(18.0, 1439), scaling_radius=3.0)
        up = [r for r in rs_conj.items if r.z.imag > 0]
        down = barrier_sweep.resonances()
        assert len(up) == len(down) >= 1
        for a, b in zip(sorted(up, key=lambda r: r.z.real),
                        sorted(down, key=lambda r: r.z.real)):
            assert abs(np.conj(a.z) - b.z) < 1e-8

    def test_truncation_insensitivity(self, barrier_pot, barrier_sweep, barrier_resonance):
        model = [es.ModeOperator("cylindrical", 0.0, barrier_pot)]
        rs_big = es.find_resonances(model, grid=es.Grid1D(22.5, 1799), scaling_radius=3.0)
        z0 = min(barrier_sweep.resonances(), key=lambda r: abs(r.z - barrier_resonance)).z
        z1 = min(rs_big.resonances(), key=lambda r: abs(r.z - barrier_resonance)).z
        assert abs(z1 - z0) < 1e-6

    def test_grid_convergence(self, barrier_pot, barrier_resonance):
        """Positions at two distinct (n, L) settings agree to 5e-6."""
        model = [es.ModeOperator("cylindrical", 0.0, barrier_pot)]
        za = es.find_resonances(model, grid=es.Grid1D(16.0, 1067), scaling_radius=3.0)
        zb = es.find_resonances(model, grid=es.Grid1D(20.0, 1599), scaling_radius=3.0)
        a = min(za.resonances(), key=lambda r: abs(r.z - barrier_resonance)).z
        b = min(zb.resonances(), key=lambda r: abs(r.z - barrier_resonance)).z
        assert abs(a - b) < 5e-6


def test_effective_direction_reduces_to_theta_prime_at_origin():
    t = 0.4 + 0.3j
    d = effective_ray_direction(t, 12.0, 0.0)
    tp = es.theta_prime(t)
    assert abs(d - tp / abs(tp)) < 1e-14


class TestConjugationOfUpperClusters:
    def test_upper_half_plane_clusters_discarded(self, well):
        """With conj(θ) sweeps, true mirror resonances sit above the axis and
        are reported, while the default sweep must never emit Im z > 0."""
        rs = es.find_resonances([es.ModeOperator("cylindrical", 0.0, well)],
                                grid=es.Grid1D(16.0, 1067), scaling_radius=8.0)
        assert all(r.z.imag <= 1e-8 * (1 + abs(r.z)) for r in rs.items)
