import numpy as np
import pytest
from hypothesis import given, strategies as st

import endspec as es
from endspec.errors import EndspecError


class TestCrossSections:
    def test_circle_radius_one(self):
        cs = es.make_cross_section("circle", 1.0)
        assert cs.entries[:4] == ((0.0, 1), (1.0, 2), (4.0, 2), (9.0, 2))

    def test_point(self):
        assert es.make_cross_section("point").entries == ((0.0, 1),)

    def test_dirichlet_interval_pi(self):
        cs = es.make_cross_section("dirichlet-interval", np.pi)
        mus = [m for m, _ in cs.entries]
        assert np.allclose(mus, [1.0, 4.0, 9.0])
        assert all(k == 1 for _, k in cs.entries)

    def test_explicit_list(self):
        cs = es.make_cross_section("list", [(0.0, 1), (2.5, 3)])
        assert cs.entries == ((0.0, 1), (2.5, 3))

    @pytest.mark.parametrize("kind,param", [("circle", -1.0), ("circle", 0.0),
                                            ("dirichlet-interval", -2.0)])
    def test_nonpositive_parameter_rejected(self, kind, param):
        with pytest.raises(EndspecError):
            es.make_cross_section(kind, param)

    def test_unsorted_list_rejected(self):
        with pytest.raises(EndspecError):
            es.make_cross_section("list", [1.0, 0.5])
        with pytest.raises(EndspecError):
            es.make_cross_section("list", [-1.0, 2.0])

    def test_mode_expansion_respects_multiplicity(self):
        cs = es.make_cross_section("circle", 1.0)
        assert cs.modes(5.0) == [0.0, 1.0, 1.0, 4.0, 4.0]


class TestGamma:
    def test_examples(self):
        assert es.in_gamma(0.5)
        assert not es.in_gamma(0.1 + 0.2j)   # fails theta0 > |theta1|
        assert not es.in_gamma(1.0 + 0.8j)   # fails Im^2 < 1/2

    @given(st.floats(min_value=1e-12, max_value=1e6, allow_nan=False))
    def test_positive_reals_admissible(self, t):
        assert es.in_gamma(t)

    def test_default_production_theta(self):
        from endspec.scaling import THETA_DEFAULT, THETA_SWEEP_DEFAULT
        assert es.in_gamma(THETA_DEFAULT)
        assert all(es.in_gamma(t) for t in THETA_SWEEP_DEFAULT)


class TestThetaPrime:
    def test_examples(self):
        assert es.theta_prime(0.0) == 1.0
        assert es.theta_prime(1.0) == 0.25
        v = es.theta_prime(0.3 + 0.2j)
        assert abs(v - (0.55130475 - 0.17374453j)) < 1e-7

    def test_pole_rejected(self):
        with pytest.raises(EndspecError):
            es.theta_prime(-1.0)

    @given(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False))
    def test_conjugation_symmetry(self, t):
        if abs(t + 1) < 1e-6:
            return
        assert es.theta_prime(np.conj(t)) == pytest.approx(np.conj(es.theta_prime(t)), rel=1e-12)

    @given(st.floats(min_value=0.0, max_value=1e3, allow_nan=False))
    def test_real_range(self, t):
        v = es.theta_prime(t)
        assert v.imag == 0
        assert 0 < v.real <= 1

    def test_scaling_parameter_caches_theta_prime(self):
        sp = es.ScalingParameter(0.4 + 0.3j)
        assert sp.theta_prime == es.theta_prime(0.4 + 0.3j)
        with pytest.raises(EndspecError):
            es.ScalingParameter(0.1 + 0.2j)
        relaxed = es.ScalingParameter.relaxed(0.0)
        assert relaxed.theta_prime == 1.0


class TestSurfacePoints:
    def test_physical_branch_at_negative_lambda(self):
        sp = es.surface_point(-1.0, [0.0], (+1,))
        assert sp.branches[0] == pytest.approx(1j)

    def test_two_thresholds(self):
        sp = es.surface_point(-1.0, [0.0, 1.0], (+1, +1))
        assert sp.branches[0] == pytest.approx(1j)
        assert sp.branches[1] == pytest.approx(1j * np.sqrt(2))
        assert sp.branches[1] ** 2 + 1.0 == pytest.approx(-1.0)

    def test_cut_approach_from_above(self):
        sp = es.surface_point(2.0, [0.0, 1.0, 4.0], (+1, +1, +1), approach=+1)
        assert sp.branches[0] == pytest.approx(np.sqrt(2))
        assert sp.branches[1] == pytest.approx(1.0)
        assert sp.branches[2] == pytest.approx(1j * np.sqrt(2))

    def test_cut_without_approach_rejected(self):
        with pytest.raises(EndspecError):
            es.surface_point(2.0, [0.0], (+1,))

    def test_branch_point_rejected(self):
        with pytest.raises(EndspecError):
            es.surface_point(1.0, [0.0, 1.0], (+1, +1))

    def test_flag_count_mismatch(self):
        with pytest.raises(EndspecError):
            es.surface_point(-1.0, [0.0, 1.0], (+1,))

    @given(
        lam=st.complex_numbers(max_magnitude=50, allow_nan=False, allow_infinity=False),
        mus=st.lists(st.floats(min_value=0, max_value=30), min_size=1, max_size=5, unique=True),
        data=st.data(),
    )
    def test_consistency_invariant(self, lam, mus, data):
        if abs(lam.imag) < 1e-9:
            lam += 0.5j
        flags = data.draw(st.lists(st.sampled_from([-1, +1]), min_size=len(mus),
                                   max_size=len(mus)))
        sp = es.surface_point(lam, sorted(mus), flags)
        err = max(abs(L * L + mu - lam) for L, mu in zip(sp.branches, sp.thresholds))
        assert err <= 1e-12 * (1 + abs(lam))
        for L, f in zip(sp.branches, sp.sheet_flags):
            assert (L.imag > 0) == (f == +1)

    def test_cross_section_input_with_e_max(self):
        cs = es.make_cross_section("circle", 1.0)
        sp = es.surface_point(-1.0 + 0.0j, cs, (+1, +1, +1), e_max=5.0)
        assert sp.thresholds == (0.0, 1.0, 4.0)
