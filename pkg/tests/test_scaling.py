import numpy as np
import pytest
from hypothesis import given, strategies as st

import endspec as es
from endspec.errors import EndspecError
from endspec.scaling import THETA_SWEEP_DEFAULT


class TestDilateMode:
    def test_identity_dilation(self):
        op = es.ModeOperator("cylindrical", 0.0)
        s = es.dilate_mode(op, 0.0, 2.0)
        u = np.linspace(0, 8, 50)
        assert np.allclose(s.second_order_coefficient(u), 1.0)
        assert np.allclose(s.contour(u), u)

    def test_exterior_coefficient_is_theta_prime(self):
        op = es.ModeOperator("cylindrical", 1.0)
        s = es.dilate_mode(op, 0.3 + 0.2j, 2.0)
        c = s.second_order_coefficient(np.array([5.0]))[0]
        assert abs(c - (0.55130475 - 0.17374453j)) < 1e-7

    def test_interior_untouched_for_well(self, well):
        op = es.ModeOperator("cylindrical", 0.0, well)
        s = es.dilate_mode(op, 0.4 + 0.3j, 2.0)
        u = np.linspace(0.01, 1.0, 20)
        assert np.allclose(s.second_order_coefficient(u), 1.0)
        assert np.allclose(s.contour(u), u)

    def test_support_beyond_radius_rejected(self, barrier_pot):
        op = es.ModeOperator("cylindrical", 0.0, barrier_pot)
        with pytest.raises(EndspecError):
            es.dilate_mode(op, 0.4 + 0.3j, 1.5)

    def test_inadmissible_theta_rejected(self):
        op = es.ModeOperator("cylindrical", 0.0)
        with pytest.raises(EndspecError):
            es.dilate_mode(op, 0.1 + 0.2j, 1.0)
        with pytest.raises(EndspecError):
            es.dilate_mode(op, -0.2, 1.0)


class TestRays:
    def test_real_theta_rays_on_axis(self):
        rays = es.essential_rays([0.0, 1.0, 4.0], 0.5)
        assert rays.direction == pytest.approx(1.0)
        assert rays.origins == (0j, 1 + 0j, 4 + 0j)

    def test_rotated_direction(self):
        rays = es.essential_rays([0.0], 0.3 + 0.2j)
        assert np.degrees(np.angle(rays.direction)) == pytest.approx(-17.48, abs=0.05)

    def test_labels_preserved(self):
        rays = es.essential_rays([(-3.2, "channel bound state"), (0.0, "threshold")],
                                 0.4 + 0.3j)
        assert rays.sources == ("channel bound state", "threshold")
        assert len(rays.origins) == 2

    def test_empty_rejected(self):
        with pytest.raises(EndspecError):
            es.essential_rays([], 0.4 + 0.3j)


class TestDistanceToRays:
    def test_on_ray(self):
        rays = es.essential_rays([0.0, 1.0], 0.4 + 0.3j)
        z = 1.0 + 2.5 * rays.direction
        assert es.distance_to_rays(z, rays) < 1e-14

    def test_behind_origin(self):
        rays = es.essential_rays([0.0], 0.5)
        assert es.distance_to_rays(-1.0 + 0j, rays) == pytest.approx(1.0)

    def test_projection_formula(self):
        rays = es.RaySet((0j,), np.exp(-1j * np.pi / 4), ("r",))
        # frozen from the elementary projection: |(1-0.5i) - proj| = 0.25*sqrt(2)
        assert es.distance_to_rays(1.0 - 0.5j, rays) == pytest.approx(0.25 * np.sqrt(2))

    @given(st.complex_numbers(max_magnitude=30, allow_nan=False, allow_infinity=False),
           st.floats(min_value=0.0, max_value=20.0))
    def test_distance_bounded_by_origin_distance(self, z, t):
        rays = es.essential_rays([0.0, 1.0], 0.4 + 0.3j)
        d = es.distance_to_rays(z, rays)
        assert d <= min(abs(z), abs(z - 1)) + 1e-12
        on = 1.0 + t * rays.direction
        assert es.distance_to_rays(on, rays) < 1e-9 * (1 + t)

    def test_vectorized_matches_scalar(self):
        rays = es.essential_rays([0.0, 2.0], 0.4 + 0.3j)
        zs = np.array([1.0 - 0.5j, -3.0 + 0j, 2.5 + 0.1j])
        vec = es.distance_to_rays(zs, rays)
        assert np.allclose(vec, [es.distance_to_rays(z, rays) for z in zs])


class TestApplyDilation:
    def test_identity(self):
        u = np.linspace(0, 10, 2001)
        f = np.exp(-((u - 3.0) ** 2))
        uo, out = es.apply_dilation(u, f, 0.0, 1.0, L_target=8.0)
        assert np.allclose(out, f[: len(out)])

    def test_support_inside_radius_unchanged(self):
        u = np.linspace(0, 10, 2001)
        bump = es.smooth_bump(1.0, 0.0, 0.9)
        f = bump(u)
        uo, out = es.apply_dilation(u, f, 0.5, 1.0, L_target=6.0)
        # interpolation wiggle at the support edge bounds the discrepancy
        assert np.max(np.abs(out - f[: len(out)])) < 1e-8

    def test_norm_preserved_gaussian_tail(self):
        u = np.linspace(0, 14, 14001)
        f = np.exp(-((u - 3.0) ** 2))
        uo, out = es.apply_dilation(u, f, 0.5, 1.0, L_target=8.0)
        n_in = np.trapezoid(f**2, u)
        n_out = np.trapezoid(np.abs(out) ** 2, uo)
        assert n_out / n_in == pytest.approx(1.0, abs=1e-6)

    def test_short_grid_rejected(self):
        u = np.linspace(0, 5, 400)
        with pytest.raises(EndspecError):
            es.apply_dilation(u, np.exp(-u), 0.5, 1.0, L_target=4.5)


class TestUnitaryRegime:
    def test_bound_state_invariant_across_real_theta(self, well, well_energy):
        """Discrete spectrum is θ-independent in the unitary regime, up to
        10x the discretization error estimated by grid refinement."""
        op = es.ModeOperator("cylindrical", 0.0, well)
        grid = es.Grid1D(14.0, 933)
        ref = {}
        for theta in (0.0, 0.1, 0.3, 1.0):
            s = es.dilate_mode(op, theta, 10.0)
            vals = np.array([z for z, _ in es.eig(es.discretize(s, grid))])
            ref[theta] = vals[np.argmin(np.abs(vals - well_energy))].real
        coarse = np.linalg.eigvalsh(es.discretize(op, grid.coarsened()).matrix)
        e_c = coarse[np.argmin(np.abs(coarse - well_energy))]
        disc_err = abs(e_c - ref[0.0]) / 3  # h² model: fine error ≈ (coarse-fine)/3
        for theta in (0.1, 0.3, 1.0):
            assert abs(ref[theta] - ref[0.0]) <= 10 * max(disc_err, 1e-12)

    def test_free_cloud_on_ray(self):
        """Scaled free operator (scaling from the origin): eigenvalue cloud on
        the ray within max(5h², 1e-3)(1+|z|)."""
        op = es.ModeOperator("cylindrical", 0.0)
        grid = es.Grid1D(10.0, 399)
        s = es.dilate_mode(op, 0.4 + 0.3j, 0.0)
        vals = np.array([z for z, _ in es.eig(es.discretize(s, grid))])
        rays = es.essential_rays([0.0], 0.4 + 0.3j)
        tol = max(5 * grid.h**2, 1e-3)
        d = es.distance_to_rays(vals, rays)
        assert np.all(d <= tol * (1 + np.abs(vals)))
