"""Pulse-location reduction: constrained slow field, velocities, rest points,
drift eigenvalues, bifurcation and the two-pulse construction."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

import pulselab as pl

TAU = 0.008281733  # representative drift prefactor a=0.5, m=0.45, D=0.01


def _sech(y):
    e = math.exp(-abs(y))
    return 2 * e / (1 + e * e)


class TestDae:
    def test_flat_single_pulse(self):
        sol = pl.solve_dae(pl.flat(), [0.0])
        assert sol.d_plus[0] == pytest.approx(1.0, abs=1e-7)
        assert sol.d_minus[0] == pytest.approx(-1.0, abs=1e-7)
        assert sol.u0[0] == pytest.approx(3.0, abs=1e-6)
        # the right segment is 1 - e^{-x}
        x, u = sol.segments[1]
        assert np.max(np.abs(u - (1 - np.exp(-x)))) < 1e-6

    def test_symmetric_terrain_even_solution(self):
        sol = pl.solve_dae(pl.gaussian(1.0, 0.5), [0.0])
        assert sol.d_plus[0] == pytest.approx(-sol.d_minus[0], abs=1e-9)

    def test_finite_mu_jump_identity(self):
        """Newton mode: recomputing 6/u0 from the solved derivatives must
        reproduce the iterated amplitudes."""
        mu = 0.012074767078498866
        sol = pl.solve_dae(pl.gaussian(1.0, 0.5), [0.3], mu=mu)
        jump = sol.d_plus - sol.d_minus
        assert np.max(np.abs(jump - 6.0 / sol.u0)) < 1e-10
        assert np.max(sol.jump_residual) < 1e-10

    def test_finite_mu_flat_matches_closed_form(self):
        mu = 0.05
        sol = pl.solve_dae(pl.flat(), [0.0], mu=mu)
        assert sol.u0[0] == pytest.approx(pl.u0_flat(mu), abs=1e-6)

    def test_collision_threshold(self):
        with pytest.raises(pl.SolverError):
            pl.solve_dae(pl.flat(), [0.0, 0.002], h=1e-3)

    def test_two_pulse_ridge_segments(self):
        """Middle-segment structure on the ridge terrain: the solution is the
        background minus scaled decaying solutions, so u(0) matches the
        closed-form combination."""
        beta, P = 1.0, 0.8
        sol = pl.solve_dae(pl.ln_cosh(beta), [-P, P], h=5e-4)
        r = math.sqrt(2.0)
        I1 = quad(lambda z: math.exp(-r * z) * _sech(z), P, math.inf, limit=200)[0]
        I2 = quad(lambda z: math.exp(r * z) * _sech(z), -math.inf, P, limit=200)[0]
        up = lambda x: np.exp(-r * x) * np.cosh(x)
        um = lambda x: np.exp(r * x) * np.cosh(x)
        ub = lambda x: (um(x) * quad(lambda z: math.exp(-r * z) * _sech(z), x, math.inf, limit=200)[0]
                        + up(x) * quad(lambda z: math.exp(r * z) * _sech(z), -math.inf, x, limit=200)[0]) / (2 * r)
        ubP = ub(P)
        expect = ub(0.0) - ubP / (up(P) + um(P)) * (up(0.0) + um(0.0))
        x, u = sol.segments[1]
        mid = np.argmin(np.abs(x))
        assert u[mid] == pytest.approx(expect, abs=1e-6)


class TestVelocity:
    def test_flat_is_zero(self):
        assert abs(pl.pulse_velocity(pl.flat(), [0.7], TAU)[0]) < 1e-10

    def test_symmetric_zero_at_center(self):
        v = pl.pulse_velocity(pl.gaussian(1.0, 0.5), [0.0], TAU)[0]
        assert abs(v) < 1e-10

    @pytest.mark.parametrize("make,args", [
        (pl.gaussian, (1.0, 0.5)), (pl.sech_bump, (-1.0, 1.2)),
        (pl.ln_cosh, (0.7,)),
    ])
    def test_odd_in_position(self, make, args):
        t = make(*args)
        for P in (0.2, 0.5, 1.1):
            vp = pl.pulse_velocity(t, [P], TAU)[0]
            vm = pl.pulse_velocity(t, [-P], TAU)[0]
            assert abs(vp + vm) < 1e-10

    def test_ridge_closed_form(self):
        """Velocity on the ridge terrain reduces to explicit integrals."""
        beta, P = 1.0, 0.6
        r = math.sqrt(1 + beta**2)
        I1 = quad(lambda z: math.exp(r * (P - z)) * _sech(beta * z), P, math.inf,
                  limit=200)[0]
        I2 = quad(lambda z: math.exp(-r * (P - z)) * _sech(beta * z), -math.inf, P,
                  limit=200)[0]
        c = math.cosh(beta * P)
        exact = TAU / 6 * ((c * I1) ** 2 - (c * I2) ** 2)
        v = pl.pulse_velocity(pl.ln_cosh(beta), [P], TAU, h=5e-4, refine=True)[0]
        assert v == pytest.approx(exact, abs=1e-8)

    def test_ridge_pulls_to_center(self):
        assert pl.pulse_velocity(pl.ln_cosh(1.0), [0.5], TAU)[0] < 0
        assert pl.pulse_velocity(pl.ln_cosh(1.0), [-0.5], TAU)[0] > 0


class TestTrajectories:
    def test_flat_pair_separates_with_exponential_speed(self):
        """Two pulses repel; separation speed is proportional to
        exp(-separation), so log speed vs separation has slope -1
        (short-range corrections bend it slightly at moderate gaps)."""
        traj = pl.integrate_pulse_ode(pl.flat(), [-1.75, 1.75], 1500.0, TAU,
                                      h=2e-3, n_out=201)
        gap = traj.P[:, 1] - traj.P[:, 0]
        assert np.all(np.diff(gap) > 0)
        rate = np.gradient(gap, traj.t)
        keep = slice(60, -10)  # late window: larger gaps, cleaner asymptotics
        slope = np.polyfit(gap[keep], np.log(rate[keep]), 1)[0]
        assert slope == pytest.approx(-1.0, abs=0.08)

    def test_bump_center_attracts_below_threshold(self):
        traj = pl.integrate_pulse_ode(pl.gaussian(1.0, 0.5), [0.3], 8000.0, TAU)
        P = traj.P[:, 0]
        assert np.all(np.diff(P) < 0)      # monotone approach to the top
        assert abs(P[-1]) < 0.12           # most of the way to 0 by t=8000

    def test_post_threshold_moves_off_center(self):
        traj = pl.integrate_pulse_ode(pl.gaussian(1.0, 1.5), [0.3], 14000.0, TAU)
        P_end = traj.P[-1, 0]
        assert P_end > 0.5  # heads to the off-center rest point
        roots = pl.find_fixed_points(pl.gaussian(1.0, 1.5), (0.2, 2.0), TAU)
        assert roots and abs(P_end - roots[0]) < 0.05

    def test_collision_terminates(self, monkeypatch):
        """Pulse pairs always repel at short range here, so exercise the
        collision event with a synthetic velocity field pulling both pulses
        to the origin."""
        from pulselab import dynamics

        def closing_field(terrain, positions, tau, **kw):
            return -0.01 * np.asarray(positions)

        monkeypatch.setattr(dynamics, "pulse_velocity", closing_field)
        traj = dynamics.integrate_pulse_ode(pl.flat(), [-0.5, 0.5], 1000.0,
                                            TAU, h=2e-3)
        assert traj.collided
        assert traj.t[-1] < 1000.0
        gap = traj.P[-1, 1] - traj.P[-1, 0]
        assert gap == pytest.approx(2 * 4 * 2e-3, rel=1e-3)


class TestFixedPoints:
    def test_symmetric_zero_always_present(self):
        roots = pl.find_fixed_points(pl.gaussian(1.0, 0.5), (-1.0, 1.0), TAU)
        assert any(abs(r) < 1e-8 for r in roots)

    def test_ridge_unique(self):
        for beta in (0.3, 1.0, 2.0):
            roots = pl.find_fixed_points(pl.ln_cosh(beta), (-2.5, 2.5), TAU,
                                         n_scan=301)
            assert len(roots) == 1
            assert abs(roots[0]) < 1e-8

    def test_cosine_tops_valleys_and_branches(self):
        B = 1.4
        t = pl.cosine(1.0, B)
        period = 2 * math.pi / B
        roots = pl.find_fixed_points(t, (-0.05, period / 2 + 0.05), TAU,
                                     n_scan=301)
        assert any(abs(r) < 1e-6 for r in roots)                      # hilltop
        assert any(abs(r - period / 2) < 1e-6 for r in roots)         # valley
        assert any(0.05 < r < period / 2 - 0.05 for r in roots)       # branch


class TestDriftEigenvalue:
    def test_flat_translation_neutral(self):
        lam = pl.fixed_point_eigenvalue(pl.flat(), 0.0, TAU)
        assert abs(lam) < 1e-9

    def test_ridge_closed_form(self):
        r = math.sqrt(2.0)
        I10 = quad(lambda z: math.exp(-r * z) * _sech(z), 0, math.inf)[0]
        exact = (2 * TAU / 3) * I10 * (r * I10 - 1)
        lam = pl.fixed_point_eigenvalue(pl.ln_cosh(1.0), 0.0, TAU)
        assert lam == pytest.approx(exact, rel=1e-5)
        assert lam < 0  # center is attracting for every ridge steepness

    def test_matches_velocity_derivative(self):
        """Sensitivity-field eigenvalue equals d(velocity)/dP to 1e-4."""
        lam = pl.fixed_point_eigenvalue(pl.ln_cosh(1.0), 0.0, TAU)
        fd = pl.fd_eigenvalue(pl.ln_cosh(1.0), 0.0, TAU)
        assert fd == pytest.approx(lam, rel=1e-4)

    def test_matches_velocity_derivative_off_center(self):
        t = pl.gaussian(1.0, 1.5)
        roots = pl.find_fixed_points(t, (0.2, 2.0), TAU)
        lam = pl.fixed_point_eigenvalue(t, roots[0], TAU)
        fd = pl.fd_eigenvalue(t, roots[0], TAU)
        assert lam < 0
        assert fd == pytest.approx(lam, rel=1e-4)

    def test_scaled_cos_sign_flip_at_threshold(self):
        delta = 0.01
        for B, sign in ((1.2, -1), (1.7, +1)):
            base = pl.cosine(1.0, B)
            t = pl.scaled_pair(delta, base.f, base.g, period=base.period)
            lam = pl.fixed_point_eigenvalue(t, 0.0, TAU, check_fixed=False)
            assert math.copysign(1, lam) == sign

    def test_requires_rest_point(self):
        with pytest.raises(ValueError):
            pl.fixed_point_eigenvalue(pl.ln_cosh(1.0), 0.5, TAU)


@pytest.fixture(scope="module")
def gauss_small_A():
    # narrow branch span: the square-root law is local to the threshold
    return pl.continue_bifurcation("gaussian", 0.01, 0.4, 1.6, TAU,
                                   branch_span=0.12, n_branch=10)


class TestBifurcation:

    def test_threshold_near_formula_value(self, gauss_small_A):
        assert gauss_small_A.B_c == pytest.approx(
            pl.curvature_threshold("gaussian"), rel=0.02)

    def test_branch_square_root_growth(self, gauss_small_A):
        """Just above threshold the off-center rest point grows like
        sqrt(B - B_c): log-log slope 1/2."""
        res = gauss_small_A
        keep = res.branch_P > 1e-4
        lb = np.log(res.branch_B[keep] - res.B_c)
        lp = np.log(res.branch_P[keep])
        slope = np.polyfit(lb, lp, 1)[0]
        assert slope == pytest.approx(0.5, abs=0.05)

    def test_not_found_reported(self):
        res = pl.continue_bifurcation("gaussian", 0.01, 0.1, 0.3, TAU)
        assert res.B_c is None


class TestTwoPulse:
    def test_endpoint_signs(self):
        assert pl.two_pulse_T(0.0, 1.0) > 0
        assert pl.two_pulse_T(12.0, 1.0) == pytest.approx(-1.0, abs=0.01)

    def test_start_value_closed_form(self):
        r = math.sqrt(2.0)
        expect = 0.5 * quad(lambda z: math.exp(-r * z) * _sech(z), 0, math.inf)[0]
        assert pl.two_pulse_T(0.0, 1.0) == pytest.approx(expect, rel=1e-9)

    def test_root(self):
        assert pl.two_pulse_position(1.0) == pytest.approx(0.5108, abs=1e-3)

    def test_root_is_dae_rest_point(self):
        """The closed-form rest separation agrees with the generic constrained
        solve: both pulse velocities vanish there."""
        P = pl.two_pulse_position(1.0)
        v = pl.pulse_velocity(pl.ln_cosh(1.0), [-P, P], TAU, h=5e-4, refine=True)
        assert np.max(np.abs(v)) < 1e-9
