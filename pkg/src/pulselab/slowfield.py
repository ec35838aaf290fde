"""Linear slow-field solvers on the critical manifold.

Everything here discretizes variants of the scalar equation

    u'' + f(x) u' + (g(x) - sigma) u = rhs

with second-order central differences.  The far-field boundary rows encode
the decaying (or background-approaching) behavior through Robin conditions
built from the frozen-coefficient exponents at the domain ends, which keeps
the truncation error exponentially small instead of O(e^-L) boundary-layer
pollution from Dirichlet rows.

The background solution u_b solves the sigma=1, rhs=-1 problem on the full
interval; the decaying solutions u_plus / u_minus are computed on their own
half interval [0, L] / [-L, 0] (solving them globally is hopeless: the
boundary truncation error at the far end is amplified by e^{2L} and flips
the selected mode).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp
from scipy.linalg import solve_banded
from scipy.sparse.linalg import splu

from .terrain import Terrain

Array = np.ndarray


class SolverError(RuntimeError):
    """Linear solve failed or produced non-finite values."""


def freeze_exponents(fval: float, gval: float, sigma=1.0):
    """Characteristic exponents k^2 + f k + (g - sigma) = 0 of the
    frozen-coefficient operator: (decaying, growing) as x -> +inf."""
    disc = np.sqrt(fval * fval + 4.0 * (sigma - gval) + 0j)
    k_minus = (-fval - disc) / 2.0
    k_plus = (-fval + disc) / 2.0
    if abs(k_minus.imag) < 1e-14 and abs(k_plus.imag) < 1e-14:
        return k_minus.real, k_plus.real
    return k_minus, k_plus


def _interior_rows(ab, fv, c, h):
    ab[0, 2:] = 1 / h**2 + fv[1:-1] / (2 * h)
    ab[1, 1:-1] = -2 / h**2 + c[1:-1]
    ab[2, :-2] = 1 / h**2 - fv[1:-1] / (2 * h)


def _robin_row(ab, rhs, side, n, h, kappa, ref, fval, cval, rval):
    """Ghost-node elimination of u'(end) = kappa (u(end) - ref); second order."""
    if side == 0:
        ab[1, 0] = -2 / h**2 - 2 * kappa / h + cval + fval * kappa
        ab[0, 1] = 2 / h**2
        rhs[0] = rval - (2 * kappa / h + fval * kappa) * ref
    else:
        ab[1, n - 1] = -2 / h**2 + 2 * kappa / h + cval + fval * kappa
        ab[2, n - 2] = 2 / h**2
        rhs[n - 1] = rval + (2 * kappa / h + fval * kappa) * ref


def _dirichlet_row(ab, rhs, side, n, value):
    if side == 0:
        ab[1, 0] = 1.0
        ab[0, 1] = 0.0
        rhs[0] = value
    else:
        ab[1, n - 1] = 1.0
        ab[2, n - 2] = 0.0
        rhs[n - 1] = value


def _banded_matvec(ab, x):
    y = ab[1] * x
    y[:-1] += ab[0, 1:] * x[1:]
    y[1:] += ab[2, :-1] * x[:-1]
    return y


def solve_linear_bvp(x: Array, f: Callable, g: Callable, bc_left, bc_right,
                     rhs_val=0.0, sigma=1.0) -> Array:
    """Solve u'' + f u' + (g - sigma) u = rhs on the grid x.

    rhs_val is a scalar or an array over the grid.  Boundary specs:
    ('dirichlet', value) or ('robin', kappa, ref) meaning u' = kappa (u - ref)
    at that end.  Complex sigma (spectral parameter) switches the solve to
    complex arithmetic.
    """
    n = x.size
    h = x[1] - x[0]
    fv = f(x)
    c = g(x) - sigma
    dtype = complex if (np.iscomplexobj(c) or any(np.iscomplexobj(np.asarray(b[1:])) for b in (bc_left, bc_right))) else float
    ab = np.zeros((3, n), dtype=dtype)
    rhs = np.empty(n, dtype=dtype)
    rhs[:] = rhs_val
    _interior_rows(ab, fv, c, h)
    for side, bc in ((0, bc_left), (n - 1, bc_right)):
        i = 0 if side == 0 else n - 1
        if bc[0] == "dirichlet":
            _dirichlet_row(ab, rhs, side, n, bc[1])
        elif bc[0] == "robin":
            _robin_row(ab, rhs, side, n, h, bc[1], bc[2], fv[i], c[i],
                       complex(rhs[i]) if dtype is complex else float(rhs[i]))
        else:
            raise ValueError(f"unknown boundary spec {bc!r}")
    try:
        u = solve_banded((1, 1), ab, rhs)
        # one step of iterative refinement: the 1/h^2 row scale otherwise
        # leaves O(kappa * eps) roundoff in the solution
        u = u + solve_banded((1, 1), ab, rhs - _banded_matvec(ab, u))
    except np.linalg.LinAlgError as exc:  # pragma: no cover - scipy raises ValueError mostly
        raise SolverError(str(exc)) from exc
    if not np.all(np.isfinite(u)):
        raise SolverError(
            "linear solve produced non-finite values (coefficients too large "
            f"for a guaranteed dichotomy?); condition estimate {_cond_estimate(ab):.3g}")
    return u


def _cond_estimate(ab) -> float:
    """One-norm condition estimate of a (1,1)-banded matrix (failure reports)."""
    n = ab.shape[1]
    A = sp.diags([ab[2, :-1], ab[1], ab[0, 1:]], [-1, 0, 1], format="csc")
    norm1 = float(np.max(np.abs(ab).sum(axis=0)))
    try:
        from scipy.sparse.linalg import onenormest, splu as _splu
        lu = _splu(A)
        inv_norm = float(onenormest(sp.linalg.LinearOperator(
            (n, n), matvec=lu.solve, rmatvec=lambda y: lu.solve(y, trans="T"))))
        return norm1 * inv_norm
    except Exception:
        return math.inf


def solve_periodic_bvp(x: Array, f: Callable, g: Callable,
                       rhs_val: float = 0.0, sigma=1.0) -> Array:
    """Periodic variant on the grid x = [x0, ..., x0 + P - h] (last node omitted)."""
    n = x.size
    h = x[1] - x[0]
    fv = f(x)
    c = g(x) - sigma
    lower = 1 / h**2 - fv / (2 * h)
    upper = 1 / h**2 + fv / (2 * h)
    main = -2 / h**2 + c
    A = sp.diags([lower[1:], main, upper[:-1]], [-1, 0, 1], format="lil")
    A[0, n - 1] = lower[0]
    A[n - 1, 0] = upper[n - 1]
    u = splu(A.tocsc()).solve(np.full(n, rhs_val, dtype=float))
    if not np.all(np.isfinite(u)):
        raise SolverError("periodic solve produced non-finite values")
    return u


def derivative_on_grid(u: Array, h: float) -> Array:
    """Fourth-order first derivative on a uniform grid (one-sided at the ends)."""
    n = u.size
    d = np.empty_like(u)
    d[2:-2] = (u[:-4] - 8 * u[1:-3] + 8 * u[3:-1] - u[4:]) / (12 * h)
    d[0] = one_sided_derivative(u, h, left=True)
    d[-1] = one_sided_derivative(u, h, left=False)
    d[1] = (u[2] - u[0]) / (2 * h)
    d[-2] = (u[-1] - u[-3]) / (2 * h)
    return d


def one_sided_derivative(u: Array, h: float, left: bool):
    """Fourth-order five-point one-sided first derivative at an array end."""
    if left:
        return (-25 * u[0] + 48 * u[1] - 36 * u[2] + 16 * u[3] - 3 * u[4]) / (12 * h)
    return (25 * u[-1] - 48 * u[-2] + 36 * u[-3] - 16 * u[-4] + 3 * u[-5]) / (12 * h)


def default_halfwidth(delta: float) -> float:
    """Domain truncation: decay rate of the slow field is (1 - 2 delta), so
    max(20, 30/(1-2 delta)) keeps the truncation error below ~1e-8; clamped
    at 60 for terrains outside the guaranteed-dichotomy range."""
    if delta < 0.4:
        return float(min(60.0, max(20.0, 30.0 / (1.0 - 2.0 * delta))))
    return 60.0


def _background_bcs(f, g, L, sigma=1.0):
    fl, gl = float(f(np.array([-L]))[0]), float(g(np.array([-L]))[0])
    fr, gr = float(f(np.array([L]))[0]), float(g(np.array([L]))[0])
    km_r, _ = freeze_exponents(fr, gr, sigma)
    _, kp_l = freeze_exponents(fl, gl, sigma)
    ustar_l = 1.0 / (sigma - gl)
    ustar_r = 1.0 / (sigma - gr)
    return ("robin", kp_l, ustar_l), ("robin", km_r, ustar_r)


def solve_bounded(terrain: Terrain, L: float, n: int, refine: bool = False):
    """Bounded background solution of u'' + f u' + g u - u + 1 = 0 on [-L, L].

    Returns (x, u_b, p_b).  The solve is performed on the deviation
    d = u - 1 (rhs -g, far-field references shifted), which keeps the
    roundoff of the ill-scaled 1/h^2 rows proportional to the deviation
    instead of the O(1) background; flat terrain comes out exactly 1.
    Periodic terrains are solved on an integer number of periods with
    periodic boundary rows instead of far-field ones.  With refine=True the
    solution is Richardson-extrapolated from grids with spacing h and h/2
    (returned on the coarse grid).
    """
    if terrain.period is not None:
        k = max(1, int(round(2 * L / terrain.period)))
        span = k * terrain.period
        x = np.linspace(-span / 2, span / 2, n + 1)[:-1]
        u = solve_periodic_bvp(x, terrain.f, terrain.g, rhs_val=-1.0)
        h = x[1] - x[0]
        ue = np.concatenate([u[-2:], u, u[:2]])  # periodic extension
        du = (ue[:-4] - 8 * ue[1:-3] + 8 * ue[3:-1] - ue[4:]) / (12 * h)
        return x, u, du
    bcl, bcr = _background_bcs(terrain.f, terrain.g, L)
    shift = lambda bc: (bc[0], bc[1], bc[2] - 1.0)

    def deviation(nn):
        xg = np.linspace(-L, L, nn)
        d = solve_linear_bvp(xg, terrain.f, terrain.g, shift(bcl), shift(bcr),
                             rhs_val=-terrain.g(xg))
        return xg, d

    x, d = deviation(n)
    if refine:
        _, d2 = deviation(2 * n - 1)
        d = (4 * d2[::2] - d) / 3
    p = derivative_on_grid(d, x[1] - x[0])
    return x, 1.0 + d, p


def solve_decaying(terrain: Terrain, side: str, L: float, n: int, sigma=1.0):
    """Decaying solution of u'' + f u' + (g - sigma) u = 0, normalized to 1 at x=0.

    side='plus' solves on [0, L] with the frozen decay exponent at +L;
    side='minus' mirrors on [-L, 0].  Returns (x, u).
    """
    if side not in ("plus", "minus"):
        raise ValueError("side must be 'plus' or 'minus'")
    if side == "plus":
        x = np.linspace(0.0, L, n)
        fr = float(terrain.f(np.array([L]))[0])
        gr = float(terrain.g(np.array([L]))[0])
        km, _ = freeze_exponents(fr, gr, sigma)
        u = solve_linear_bvp(x, terrain.f, terrain.g,
                             ("dirichlet", 1.0), ("robin", km, 0.0), sigma=sigma)
    else:
        x = np.linspace(-L, 0.0, n)
        fl = float(terrain.f(np.array([-L]))[0])
        gl = float(terrain.g(np.array([-L]))[0])
        _, kp = freeze_exponents(fl, gl, sigma)
        u = solve_linear_bvp(x, terrain.f, terrain.g,
                             ("robin", kp, 0.0), ("dirichlet", 1.0), sigma=sigma)
    return x, u


def slopes(terrain: Terrain, L: float, n: int, refine: bool = True):
    """Slopes (Cs0, Cu0) = (u_plus'(0), u_minus'(0)) of the decaying solutions.

    Richardson extrapolation over grids h and h/2 cancels the leading O(h^2)
    error of both the solve and the one-sided derivative stencil.
    """
    out = []
    for side in ("plus", "minus"):
        left_end = side == "plus"
        x1, u1 = solve_decaying(terrain, side, L, n)
        if np.abs(u1[0 if left_end else -1]) < 1e-12:
            raise SolverError("degenerate normalization of decaying solution")
        s1 = one_sided_derivative(u1, x1[1] - x1[0], left=left_end)
        if refine:
            x2, u2 = solve_decaying(terrain, side, L, 2 * n - 1)
            s2 = one_sided_derivative(u2, x2[1] - x2[0], left=left_end)
            out.append((4 * s2 - s1) / 3)
        else:
            out.append(s1)
    return out[0], out[1]


@dataclass(frozen=True)
class SlowFieldSolution:
    """Grid-sampled slow field: background solution, decaying solutions, slopes."""

    x: Array
    u_b: Array
    p_b: Array
    x_plus: Optional[Array]
    u_plus: Optional[Array]
    x_minus: Optional[Array]
    u_minus: Optional[Array]
    Cs0: Optional[float]
    Cu0: Optional[float]
    L: float

    @property
    def u_b0(self) -> float:
        return float(np.interp(0.0, self.x, self.u_b))


def solve_slow_field(terrain: Terrain, L: Optional[float] = None,
                     n: Optional[int] = None, refine: bool = True,
                     delta: Optional[float] = None) -> SlowFieldSolution:
    """Full slow-field solve: background plus both decaying solutions and slopes.

    For periodic terrains only the (periodic) background is computed; the
    decaying solutions and slopes are undefined there and set to None.
    """
    if L is None:
        if delta is None:
            from .terrain import terrain_delta
            delta = terrain_delta(terrain)
        L = default_halfwidth(delta)
    if n is None:
        n = 2 * int(round(L / 1e-3)) + 1 if L <= 40 else 80001
    x, u_b, p_b = solve_bounded(terrain, L, n)
    if terrain.period is not None:
        return SlowFieldSolution(x, u_b, p_b, None, None, None, None, None, None, L)
    m = n // 2 + 1
    xp, up = solve_decaying(terrain, "plus", L, m)
    xm, um = solve_decaying(terrain, "minus", L, m)
    Cs0, Cu0 = slopes(terrain, L, m, refine=refine)
    return SlowFieldSolution(x, u_b, p_b, xp, up, xm, um, float(Cs0), float(Cu0), L)


def ode_residual(x: Array, u: Array, terrain: Terrain, rhs_val: float, sigma=1.0) -> Array:
    """Residual u'' + f u' + (g - sigma) u - rhs on the interior nodes (central FD)."""
    h = x[1] - x[0]
    upp = (u[:-2] - 2 * u[1:-1] + u[2:]) / h**2
    up = (u[2:] - u[:-2]) / (2 * h)
    xi = x[1:-1]
    return upp + terrain.f(xi) * up + (terrain.g(xi) - sigma) * u[1:-1] - rhs_val
