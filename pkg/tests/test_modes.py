import numpy as np
import pytest

import endspec as es
from endspec.discretize import discretize_line, eig
from endspec.errors import EndspecError
from endspec.modes import bump_profile
from endspec.oracles import cusp_radial_eigs, warped_radial_eigs


class TestReduceCylindrical:
    def test_free_circle(self):
        cs = es.make_cross_section("circle", 1.0)
        ops = es.reduce_cylindrical(cs, e_max=5.0)
        assert [o.mode_mu for o in ops] == [0.0, 1.0, 1.0, 4.0, 4.0]
        assert all(o.potential.is_zero for o in ops)

    def test_point_with_well(self, well):
        ops = es.reduce_cylindrical(es.make_cross_section("point"), {0: well})
        assert len(ops) == 1
        assert ops[0].potential is well

    def test_potential_only_on_mode_zero(self, well):
        cs = es.make_cross_section("circle", 1.0)
        ops = es.reduce_cylindrical(cs, {0: well}, e_max=5.0)
        assert not ops[0].potential.is_zero
        assert all(o.potential.is_zero for o in ops[1:])

    def test_unbounded_support_rejected(self):
        cs = es.make_cross_section("point")
        bad = es.RadialPotential(lambda u: np.zeros_like(u), np.inf)
        with pytest.raises(EndspecError):
            es.reduce_cylindrical(cs, {0: bad})

    def test_unknown_mode_rejected(self, well):
        with pytest.raises(EndspecError):
            es.reduce_cylindrical(es.make_cross_section("point"), {3: well})


class TestReduceCusp:
    def test_circle_modes(self):
        cs = es.make_cross_section("circle", 1.0)
        ops = es.reduce_cusp(cs, 2, e_max=1.5)
        assert [o.mode_mu for o in ops] == [0.0, 1.0, 1.0]
        assert all(o.kind == "cusp" and o.dimension_n == 2 for o in ops)

    def test_dimension_guard(self):
        with pytest.raises(EndspecError):
            es.reduce_cusp(es.make_cross_section("point"), 1)

    @pytest.mark.parametrize("n,mu", [(3, 0.0), (2, 1.0)])
    def test_fields_recorded(self, n, mu):
        op = es.ModeOperator("cusp", mu, dimension_n=n)
        assert op.dimension_n == n and op.mode_mu == mu


class TestCuspNormalForm:
    def test_threshold_surface(self):
        op = es.ModeOperator("cusp", 0.0, dimension_n=2)
        line = es.cusp_to_schrodinger(op)
        assert line.constant == 0.25
        pairs = eig(discretize_line(line, -15.0, 15.0, 2000))
        assert abs(pairs[0][0].real - 0.25) < 1e-3

    def test_threshold_n3(self):
        line = es.cusp_to_schrodinger(es.ModeOperator("cusp", 0.0, dimension_n=3))
        assert line.constant == 1.0
        pairs = eig(discretize_line(line, -15.0, 15.0, 2000))
        assert abs(pairs[0][0].real - 1.0) < 1e-3

    def test_rejects_cylindrical(self):
        with pytest.raises(EndspecError):
            es.cusp_to_schrodinger(es.ModeOperator("cylindrical", 0.0))

    def test_bottom_matches_weighted_radial_oracle(self):
        """Same Dirichlet window, both sides Richardson-extrapolated."""
        def sides(n):
            w = (-12.0, 12.0)
            line = es.cusp_to_schrodinger(es.ModeOperator("cusp", 0.0, dimension_n=2))
            b_line = eig(discretize_line(line, *w, n, bc="dirichlet"))[0][0].real
            b_rad = cusp_radial_eigs(2, 0.0, w, n, n_eigs=1)[0]
            return b_line, b_rad

        l1, r1 = sides(1600)
        l2, r2 = sides(800)
        line_extrap = (4 * l1 - l2) / 3
        rad_extrap = (4 * r1 - r2) / 3
        assert abs(line_extrap - rad_extrap) < 1e-6

    def test_confining_side_for_positive_mode(self):
        """e^{2t} confines toward +t: the count below E is insensitive to
        enlarging the window there, but grows with the free (-t) side."""
        line = es.cusp_to_schrodinger(es.ModeOperator("cusp", 1.0, dimension_n=2))
        E = 4.0

        def count(t0, t1):
            vals = np.array([z.real for z, _ in eig(discretize_line(line, t0, t1, 1200))])
            return int(np.sum(vals < E))

        base = count(-12.0, 6.0)
        assert count(-12.0, 12.0) == base
        assert count(-24.0, 6.0) > base


class TestWarpedProducts:
    def test_constant_profile_gives_zero(self):
        prof = bump_profile(1.0, 0.0, 0.0, 2.0)
        V = es.warped_product_potential(prof, 1)
        u = np.linspace(0, 4, 200)
        assert np.max(np.abs(V(u))) == 0.0

    def test_mode_zero_keeps_curvature_terms(self):
        prof = bump_profile(1.0, 0.3, 0.0, 2.0)
        V0 = es.warped_product_potential(prof, 0)
        u = np.linspace(0.05, 1.95, 97)
        expect = prof.ddf(u) / (2 * prof.f(u)) - prof.df(u) ** 2 / (4 * prof.f(u) ** 2)
        assert np.max(np.abs(V0(u) - expect)) < 1e-12

    def test_vanishes_beyond_support(self):
        prof = bump_profile(1.0, 0.3, 0.0, 2.0)
        V1 = es.warped_product_potential(prof, 1)
        u = np.linspace(2.0000001, 12.0, 1000)
        assert np.max(np.abs(V1(u))) == 0.0

    def test_positive_profile_required(self):
        with pytest.raises(EndspecError):
            bump_profile(0.01, -1.0, 0.0, 2.0)

    def test_eigenvalues_match_weighted_oracle(self):
        """Liouville form vs direct f·du-weighted discretization, both
        Richardson-extrapolated on matched grids, agreement to 1e-8."""
        prof = bump_profile(1.0, 0.3, 0.0, 2.0)
        V1 = es.warped_product_potential(prof, 1)
        op = es.ModeOperator("cylindrical", 1.0, V1)
        L = 10.0

        def both(n):
            grid = es.Grid1D(L, n)
            # no true bound states below the mode threshold here: compare the
            # lowest box modes of the two discretizations instead
            vals = np.linalg.eigvalsh(es.discretize(op, grid).matrix)[:4]
            direct = warped_radial_eigs(prof, 1, L, n, n_eigs=4)
            return vals, direct

        v1, d1 = both(2000)
        v2, d2 = both(1000)
        v_ext = (4 * v1 - v2) / 3
        d_ext = (4 * d1 - d2) / 3
        assert np.max(np.abs(v_ext - d_ext)) < 1e-8
