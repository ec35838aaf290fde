"""Pulse-location dynamics: the reduction of the PDE to motion of pulse centers.

An N-pulse state is summarized by positions P_1 < ... < P_N.  Between the
pulses the slow component solves the background equation; at each pulse it
satisfies a value condition and a derivative-jump condition.  The positions
then move by

    dP_j/dt = (tau / 6) [ u'(P_j+)^2 - u'(P_j-)^2 ].

In the mu << 1 regime the value condition degenerates to u(P_j) = 0 and the
segment solves decouple; at finite mu the amplitudes u0_j couple the value
and jump conditions and are found by Newton iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.optimize import brentq

from .slowfield import (freeze_exponents, one_sided_derivative,
                        solve_linear_bvp, SolverError)
from .terrain import Terrain

Array = np.ndarray

COLLISION_CELLS = 4  # pulses closer than this many grid cells end a trajectory


@dataclass(frozen=True)
class DaeSolution:
    """Piecewise slow component around pulses at fixed positions.

    segments : list of (x, u) arrays covering [-L, P_1], [P_1, P_2], ...
    d_plus, d_minus : one-sided derivatives u'(P_j+), u'(P_j-)
    u0 : pulse amplitudes (6 / jump in the mu << 1 regime)
    jump_residual : |(u'(P_j+) - u'(P_j-)) - 6/u0_j|
    """

    positions: Array
    segments: list
    d_plus: Array
    d_minus: Array
    u0: Array
    mu: float
    jump_residual: Array
    periodic: bool

    def u_value(self, j: int) -> float:
        return self.mu * self.u0[j] if self.mu > 0 else 0.0


def _segment_grid(a: float, b: float, h: float):
    n = max(int(round((b - a) / h)) + 1, 9)
    return np.linspace(a, b, n)


def _wrapped_terrain(terrain: Terrain, shift: float) -> tuple:
    """Coefficient callables shifted so a periodic domain can be cut at a pulse."""
    return (lambda x: terrain.f(x + shift), lambda x: terrain.g(x + shift))


def _edge_bcs(terrain: Terrain, L: float):
    fl = float(terrain.f(np.array([-L]))[0])
    gl = float(terrain.g(np.array([-L]))[0])
    fr = float(terrain.f(np.array([L]))[0])
    gr = float(terrain.g(np.array([L]))[0])
    km_r, _ = freeze_exponents(fr, gr, 1.0)
    _, kp_l = freeze_exponents(fl, gl, 1.0)
    return ("robin", kp_l, 1.0 / (1.0 - gl)), ("robin", km_r, 1.0 / (1.0 - gr))


def _solve_segments(terrain: Terrain, positions: Array, values: Array,
                    L: float, h: float, periodic: bool):
    """Solve the background equation on every segment with the pulse values
    as Dirichlet data; returns segments and one-sided derivatives."""
    N = len(positions)
    segs = []
    d_plus = np.empty(N)
    d_minus = np.empty(N)
    if periodic:
        span = terrain.period * max(1, int(round(2 * L / terrain.period)))
        cuts = list(positions) + [positions[0] + span]
        vals = list(values) + [values[0]]
        for j in range(N):
            x = _segment_grid(cuts[j], cuts[j + 1], h)
            u = solve_linear_bvp(x, terrain.f, terrain.g,
                                 ("dirichlet", vals[j]), ("dirichlet", vals[j + 1]),
                                 rhs_val=-1.0)
            segs.append((x, u))
        for j in range(N):
            xr, ur = segs[j]
            d_plus[j] = one_sided_derivative(ur, xr[1] - xr[0], left=True)
            xl, ul = segs[j - 1] if j > 0 else segs[N - 1]
            d_minus[j] = one_sided_derivative(ul, xl[1] - xl[0], left=False)
        return segs, d_plus, d_minus
    bcl, bcr = _edge_bcs(terrain, L)
    cuts = [-L] + list(positions) + [L]
    for j in range(N + 1):
        x = _segment_grid(cuts[j], cuts[j + 1], h)
        left = bcl if j == 0 else ("dirichlet", values[j - 1])
        right = bcr if j == N else ("dirichlet", values[j])
        u = solve_linear_bvp(x, terrain.f, terrain.g, left, right, rhs_val=-1.0)
        segs.append((x, u))
    for j in range(N):
        xl, ul = segs[j]
        xr, ur = segs[j + 1]
        d_minus[j] = one_sided_derivative(ul, xl[1] - xl[0], left=False)
        d_plus[j] = one_sided_derivative(ur, xr[1] - xr[0], left=True)
    return segs, d_plus, d_minus


def solve_dae(terrain: Terrain, positions: Sequence[float], mu: float = 0.0,
              L: float = 20.0, h: float = 1e-3, refine: bool = False,
              max_newton: int = 50, newton_tol: float = 1e-10) -> DaeSolution:
    """Solve the pulse-constrained slow field at fixed positions.

    mu = 0 selects the decoupled regime (pulse values 0, amplitudes from
    the jumps); mu > 0 runs Newton iteration on the amplitudes u0_j so that
    u(P_j) = mu u0_j and the derivative jump equals 6/u0_j simultaneously.
    refine=True Richardson-extrapolates the one-sided derivatives over
    grids h and h/2.
    """
    positions = np.asarray(sorted(float(p) for p in positions))
    if len(positions) > 1 and np.min(np.diff(positions)) <= COLLISION_CELLS * h:
        raise SolverError("pulse positions closer than the collision threshold")
    periodic = terrain.period is not None

    def derivs_for(values, step):
        segs, dp, dm = _solve_segments(terrain, positions, values, L, step, periodic)
        if refine:
            _, dp2, dm2 = _solve_segments(terrain, positions, values, L, step / 2, periodic)
            dp = (4 * dp2 - dp) / 3
            dm = (4 * dm2 - dm) / 3
        return segs, dp, dm

    N = len(positions)
    if mu == 0.0:
        values = np.zeros(N)
        segs, dp, dm = derivs_for(values, h)
        u0 = 6.0 / (dp - dm)
        resid = np.zeros(N)
        return DaeSolution(positions, segs, dp, dm, u0, 0.0, resid, periodic)

    u0 = np.full(N, 3.0)
    for _ in range(max_newton):
        segs, dp, dm = derivs_for(mu * u0, h)
        resid = (dp - dm) - 6.0 / u0
        if np.max(np.abs(resid)) < newton_tol:
            break
        # finite-difference Jacobian over the N amplitudes
        J = np.empty((N, N))
        dc = 1e-6
        for k in range(N):
            u0k = u0.copy()
            u0k[k] += dc
            _, dp2, dm2 = derivs_for(mu * u0k, h)
            J[:, k] = (((dp2 - dm2) - 6.0 / u0k) - resid) / dc
        u0 = u0 - np.linalg.solve(J, resid)
        if np.any(u0 <= 0):
            raise SolverError("Newton iterate left the positive-amplitude region")
    else:
        raise SolverError(f"amplitude Newton did not converge; residuals {resid}")
    return DaeSolution(positions, segs, dp, dm, u0, mu,
                       np.abs((dp - dm) - 6.0 / u0), periodic)


def pulse_velocity(terrain: Terrain, positions: Sequence[float], tau: float,
                   mu: float = 0.0, L: float = 20.0, h: float = 1e-3,
                   refine: bool = False) -> Array:
    """Velocity vector dP_j/dt = (tau/6)(u'(P_j+)^2 - u'(P_j-)^2)."""
    sol = solve_dae(terrain, positions, mu=mu, L=L, h=h, refine=refine)
    return tau / 6.0 * (sol.d_plus**2 - sol.d_minus**2)


@dataclass(frozen=True)
class Trajectory:
    """Integrated pulse paths; collided=True when the run stopped early."""

    t: Array
    P: Array  # shape (nt, N)
    collided: bool


def integrate_pulse_ode(terrain: Terrain, positions0: Sequence[float],
                        t_end: float, tau: float, mu: float = 0.0,
                        L: float = 20.0, h: float = 2e-3,
                        rtol: float = 1e-8, n_out: int = 201) -> Trajectory:
    """Integrate the pulse-location system with adaptive error control.

    Every right-hand-side evaluation re-solves the constrained slow field.
    Trajectories stop at pulse collisions (separation under the grid
    threshold).
    """
    P0 = np.asarray(sorted(float(p) for p in positions0))
    N = len(P0)

    def rhs(t, P):
        return pulse_velocity(terrain, P, tau, mu=mu, L=L, h=h)

    events = None
    if N > 1:
        def min_gap(t, P):
            return float(np.min(np.diff(np.sort(P))) - 2 * COLLISION_CELLS * h)
        min_gap.terminal = True
        min_gap.direction = -1
        events = [min_gap]

    out = solve_ivp(rhs, (0.0, t_end), P0, method="RK45", rtol=rtol,
                    atol=1e-12, dense_output=False,
                    t_eval=np.linspace(0.0, t_end, n_out), events=events)
    collided = bool(events and out.t_events[0].size > 0)
    t = out.t
    P = out.y.T
    if collided:
        t = np.append(t, out.t_events[0][0])
        P = np.vstack([P, out.y_events[0][0]])
    return Trajectory(t=t, P=P, collided=collided)


def find_fixed_points(terrain: Terrain, bracket: tuple, tau: float = 1.0,
                      mu: float = 0.0, L: float = 20.0, h: float = 1e-3,
                      n_scan: int = 400) -> list[float]:
    """Single-pulse rest positions: sign changes of the velocity on a scan
    grid over `bracket`, refined by bisection."""
    lo, hi = bracket
    grid = np.linspace(lo, hi, n_scan)
    v = np.array([pulse_velocity(terrain, [p], tau, mu=mu, L=L, h=h)[0]
                  for p in grid])
    roots = []
    for i in range(n_scan - 1):
        if v[i] == 0.0:
            roots.append(float(grid[i]))
        elif v[i] * v[i + 1] < 0:
            roots.append(float(brentq(
                lambda p: pulse_velocity(terrain, [p], tau, mu=mu, L=L, h=h)[0],
                grid[i], grid[i + 1], xtol=1e-10)))
    if v[-1] == 0.0:
        roots.append(float(grid[-1]))
    return roots


def fixed_point_eigenvalue(terrain: Terrain, P_star: float, tau: float,
                           mu: float = 0.0, L: float = 20.0, h: float = 5e-4,
                           refine: bool = True,
                           check_fixed: bool = True) -> float:
    """Drift eigenvalue of a single-pulse rest position.

    Differentiating the velocity in the position couples the slow field u to
    a sensitivity field w solving the homogeneous background equation with
    w(P+-) = -u'(P+-) and decay in the far field:

        lam = (tau/3) [ u'(P+)(u''(P+) + w'(P+)) - u'(P-)(u''(P-) + w'(P-)) ]

    (mu << 1 regime; u''(P+-) is evaluated from the equation itself).
    """
    if check_fixed:
        v = pulse_velocity(terrain, [P_star], tau, mu=mu, L=L, h=h)[0]
        if abs(v) > 1e-8:
            raise ValueError(f"P={P_star} is not a rest position (velocity {v:g})")
    if mu != 0.0:
        raise NotImplementedError("the sensitivity-field eigenvalue route is "
                                  "implemented in the mu << 1 regime only; use "
                                  "fd_eigenvalue for finite mu")
    periodic = terrain.period is not None

    def both_routes(step):
        sol = solve_dae(terrain, [P_star], mu=0.0, L=L, h=step)
        dp, dm = sol.d_plus[0], sol.d_minus[0]
        fP = float(terrain.f(np.array([P_star]))[0])
        upp_p = -fP * dp - 1.0
        upp_m = -fP * dm - 1.0
        if periodic:
            span = terrain.period * max(1, int(round(2 * L / terrain.period)))
            x = _segment_grid(P_star, P_star + span, step)
            w = solve_linear_bvp(x, terrain.f, terrain.g,
                                 ("dirichlet", -dp), ("dirichlet", -dm), rhs_val=0.0)
            wp_p = one_sided_derivative(w, x[1] - x[0], left=True)
            wp_m = one_sided_derivative(w, x[1] - x[0], left=False)
        else:
            bcl, bcr = _edge_bcs(terrain, L)
            xr = _segment_grid(P_star, L, step)
            wr = solve_linear_bvp(xr, terrain.f, terrain.g,
                                  ("dirichlet", -dp), (bcr[0], bcr[1], 0.0), rhs_val=0.0)
            xl = _segment_grid(-L, P_star, step)
            wl = solve_linear_bvp(xl, terrain.f, terrain.g,
                                  (bcl[0], bcl[1], 0.0), ("dirichlet", -dm), rhs_val=0.0)
            wp_p = one_sided_derivative(wr, xr[1] - xr[0], left=True)
            wp_m = one_sided_derivative(wl, xl[1] - xl[0], left=False)
        return tau / 3.0 * (dp * (upp_p + wp_p) - dm * (upp_m + wp_m))

    lam = both_routes(h)
    if refine:
        lam2 = both_routes(h / 2)
        lam = (4 * lam2 - lam) / 3
    return float(lam)


def fd_eigenvalue(terrain: Terrain, P_star: float, tau: float, mu: float = 0.0,
                  L: float = 20.0, h: float = 5e-4, step: float = 1e-3) -> float:
    """Centered finite-difference d(velocity)/dP cross-check of the drift
    eigenvalue; works in both mu regimes."""
    vp = pulse_velocity(terrain, [P_star + step], tau, mu=mu, L=L, h=h, refine=True)[0]
    vm = pulse_velocity(terrain, [P_star - step], tau, mu=mu, L=L, h=h, refine=True)[0]
    return float((vp - vm) / (2 * step))


@dataclass(frozen=True)
class BifurcationResult:
    """Critical curvature and the emerging off-center rest positions."""

    family: str
    A: float
    B_c: Optional[float]
    branch_B: Array
    branch_P: Array


def continue_bifurcation(family: str, A: float, B_lo: float, B_hi: float,
                         tau: float, mu: float = 0.0, L: float = 20.0,
                         h: float = 1e-3, n_branch: int = 12,
                         branch_span: float = 0.6) -> BifurcationResult:
    """Locate the curvature B_c where the centered rest position changes
    stability, then track the off-center rest positions for B > B_c.

    The terrain family is one of gaussian / sech / cosine with height
    amplitude A.  Returns B_c=None when the drift eigenvalue does not change
    sign inside [B_lo, B_hi].
    """
    from . import terrain as _terrain
    makers = {"gaussian": _terrain.gaussian, "sech": _terrain.sech_bump,
              "cosine": _terrain.cosine}
    try:
        make = makers[family]
    except KeyError:
        raise ValueError(f"unknown family {family!r}")

    def lam_of(B: float) -> float:
        return fixed_point_eigenvalue(make(A, B), 0.0, tau, L=L, h=h,
                                      check_fixed=False)

    lo, hi = lam_of(B_lo), lam_of(B_hi)
    if lo * hi > 0:
        return BifurcationResult(family, A, None, np.empty(0), np.empty(0))
    B_c = float(brentq(lam_of, B_lo, B_hi, xtol=1e-10))
    Bs, Ps = [], []
    for B in np.linspace(B_c * 1.01, min(B_hi, B_c * (1 + branch_span)), n_branch):
        t = make(A, B)
        upper = t.period / 2 if t.period is not None else 3.0 / math.sqrt(max(B, 1e-3))
        roots = [p for p in find_fixed_points(t, (1e-4, upper), tau, L=L, h=h)
                 if p > 1e-3]
        if roots:
            Bs.append(B)
            Ps.append(roots[0])
    return BifurcationResult(family, A, B_c, np.asarray(Bs), np.asarray(Ps))


# --- symmetric two-pulse rest positions on the ridge terrain ----------------

def _sech(y: float) -> float:
    """Overflow-safe sech for quadrature over unbounded intervals."""
    a = abs(y)
    e = math.exp(-a)
    return 2 * e / (1 + e * e)


def two_pulse_T(P: float, beta: float) -> float:
    """Stationarity function of the symmetric pulse pair on the ridge
    h = -2 ln cosh(beta x): its positive root is the rest half-separation.

    T(P) = u_b'(P) - u_b(P) [ (r/2)(tanh(r P) - 1) + beta tanh(beta P) ],
    built from the closed-form background of that terrain (r = sqrt(1+beta^2)).
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    r = math.sqrt(1 + beta * beta)
    I1 = quad(lambda z: math.exp(-r * z) * _sech(beta * z), P, math.inf,
              limit=200)[0]
    I2 = quad(lambda z: math.exp(r * z) * _sech(beta * z), -math.inf, P,
              limit=200)[0]
    up = math.exp(-r * P) * math.cosh(beta * P)
    um = math.exp(r * P) * math.cosh(beta * P)
    ub = (um * I1 + up * I2) / (2 * r)
    ubp = (um * (r + beta * math.tanh(beta * P)) * I1
           + up * (-r + beta * math.tanh(beta * P)) * I2) / (2 * r)
    return ubp - ub * (0.5 * r * (math.tanh(r * P) - 1) + beta * math.tanh(beta * P))


def two_pulse_position(beta: float, P_max: float = 20.0) -> float:
    """Root of two_pulse_T: T(0) > 0 and T -> -beta < 0, so a sign change
    exists; located by bisection."""
    return float(brentq(two_pulse_T, 1e-9, P_max, args=(beta,), xtol=1e-12))
