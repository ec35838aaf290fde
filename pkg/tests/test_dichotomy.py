"""Dichotomy constants, projection bounds and slope intervals."""

import numpy as np
import pytest
from scipy.linalg import expm, svdvals

import pulselab as pl


class TestRoughnessConstants:
    def test_unperturbed(self):
        c = pl.roughness_constants(1.0, 1.0, 0.0)
        assert c.K == 2.5 and c.rho == 1.0

    def test_perturbed(self):
        c = pl.roughness_constants(1.0, 1.0, 0.1)
        assert c.K == pytest.approx(2.5)
        assert c.rho == pytest.approx(0.8)

    def test_validity_boundary(self):
        with pytest.raises(pl.DichotomyError):
            pl.roughness_constants(1.0, 1.0, 0.25)

    def test_projection_distance(self):
        assert pl.projection_distance_bound(1.0, 1.0, 0.05) == pytest.approx(0.2)
        assert pl.projection_distance_bound(1.0, 1.0, 0.0) == 0.0
        assert pl.projection_distance_bound(2.0, 1.0, 0.01) == pytest.approx(0.32)

    def test_bounded_solution_distance(self):
        c = pl.roughness_constants(1.0, 1.0, 0.0)
        assert pl.bounded_solution_distance_bound(c, 5.0) == 0.0
        c = pl.roughness_constants(1.0, 1.0, 0.1)
        assert pl.bounded_solution_distance_bound(c, 1.0) == pytest.approx(1.25)

    @pytest.mark.parametrize("delta", [0.01, 0.05, 0.1, 0.2])
    def test_background_bound_form(self, delta):
        """For the planar saddle the background bound is 10 delta/(1-2 delta)."""
        c = pl.roughness_constants(1.0, 1.0, delta)
        assert pl.bounded_solution_distance_bound(c, 1.0) == \
            pytest.approx(10 * delta / (1 - 2 * delta), rel=1e-12)

    def test_projection_vector_closeness(self):
        assert pl.projection_vector_closeness(0.0) == 0.0
        assert pl.projection_vector_closeness(0.02) == pytest.approx(0.4)
        assert pl.projection_vector_closeness(1.0 / 8.0) == pytest.approx(1.0)


class TestSaddleDichotomy:
    def test_matrix_exponential_rates(self):
        """The planar saddle [[0,1],[1,0]] has unit dichotomy constants:
        ||Phi(x) P Phi(s)^-1|| = e^{-(x-s)} with the rank-1 projection onto
        the contracting direction."""
        A0 = np.array([[0.0, 1.0], [1.0, 0.0]])
        P = 0.5 * np.array([[1.0, -1.0], [-1.0, 1.0]])
        rng = np.random.default_rng(11)
        for _ in range(100):
            s = rng.uniform(-3, 3)
            x = s + rng.uniform(0, 5)
            M = expm(A0 * x) @ P @ expm(-A0 * s)
            assert abs(svdvals(M)[0] - np.exp(-(x - s))) < 1e-10
            M = expm(A0 * s) @ (np.eye(2) - P) @ expm(-A0 * x)
            assert abs(svdvals(M)[0] - np.exp(-(x - s))) < 1e-10


class TestSlopeInterval:
    def test_zero_delta_degenerates_to_point(self):
        si = pl.slope_interval(0.0, -1.0)
        assert si.C_min == 0.0 and si.C_max == 0.0

    def test_reference_values(self):
        si = pl.slope_interval(0.01, -1.0)
        assert si.C_min == pytest.approx(-0.8235294117647, rel=1e-10)
        assert si.C_max == pytest.approx(0.4516129032258, rel=1e-10)

    def test_singular_delta_lower_bound(self):
        d = (2 - np.sqrt(2)) / 8
        si = pl.slope_interval(d, -1.0)
        assert si.min_unbounded and not si.max_unbounded

    def test_degeneracy_is_polynomial_root(self):
        d = pl.slope_singular_delta(-1.0)[0]
        assert abs(32 * d**2 - 16 * d + 1) < 1e-12
        assert d == pytest.approx((2 - np.sqrt(2)) / 8, abs=1e-15)

    def test_interval_contains_zero_when_connected(self):
        for d in np.linspace(0.0, 0.24, 25):
            si = pl.slope_interval(d, -1.0)
            assert si.contains(0.0)

    def test_cmax_monotone_below_singularity(self):
        d_star = (2 - np.sqrt(2)) / 8
        ds = np.linspace(0.0, d_star * 0.999, 50)
        cm = [pl.slope_interval(d, -1.0).C_max for d in ds]
        assert np.all(np.diff(cm) >= 0)

    def test_validity(self):
        with pytest.raises(pl.DichotomyError):
            pl.slope_interval(0.25, -1.0)
        with pytest.raises(pl.DichotomyError):
            pl.slope_interval(-0.01, -1.0)

    def test_disjoint_wraps_through_infinity(self):
        # just above the lower singular delta (C_aut = -1) the set wraps
        d = (2 - np.sqrt(2)) / 8 + 0.01
        si = pl.slope_interval(d, -1.0)
        assert si.disjoint
        assert si.contains(0.0)
        assert not si.contains((si.C_max + si.C_min) / 2)
