"""Spectral analysis of the pulse linearization.

The spectrum splits into the essential part (left of max{-m,-1}), a set of
large eigenvalues controlled by a nonlocal condition built from the fast
reduced operator, and one small eigenvalue near zero born from the broken
translation invariance.  The large-eigenvalue condition couples the
nonlocal response integral R(lambda) of the fast field to the slow-field
slope at the pulse position:

    t22(lambda) = 1 + (3 - R(lambda)) / (u0^2 mu C sqrt(1 + m lambda)).

Zeros of t22 on the region right of the essential spectrum are the large
eigenvalues (the scaled eigenvalue is lambda = lambda_unscaled / m).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad
from scipy.linalg import eigh_tridiagonal, solve_banded
from scipy.optimize import brentq

from .existence import homoclinic_peak
from .slowfield import one_sided_derivative, solve_decaying
from .terrain import Terrain

Array = np.ndarray

POLE_UPPER = 1.25
POLE_LOWER = -0.75
POLE_GUARD = 1e-3


def essential_spectrum(m: float) -> float:
    """Right edge max{-m, -1} of the essential spectrum (unscaled eigenvalue)."""
    if m <= 0:
        raise ValueError("m must be positive")
    return max(-m, -1.0)


def reduced_operator_eigs(L_f: float = 40.0, n: int = 4000, k: int = 3,
                          return_vectors: bool = False):
    """Top-k eigenvalues of v'' - (1 - 3 sech^2(xi/2)) v, Dirichlet ends.

    The continuum values are 5/4, 0, -3/4; the finite-difference values
    converge to them at second order in the grid spacing.
    """
    if L_f < 30 or n < 1000:
        raise ValueError("need L_f >= 30 and n >= 1000")
    x = np.linspace(-L_f, L_f, n)
    h = x[1] - x[0]
    diag = -2 / h**2 - (1 - 3 / np.cosh(x / 2) ** 2)
    off = np.full(n - 1, 1 / h**2)
    if return_vectors:
        w, v = eigh_tridiagonal(diag, off, select="i", select_range=(n - k, n - 1))
        return w[::-1], v[:, ::-1], x
    w = eigh_tridiagonal(diag, off, select="i", select_range=(n - k, n - 1),
                         eigvals_only=True)
    return w[::-1]


@dataclass(frozen=True)
class RValue:
    """Nonlocal response integral at a spectral parameter."""

    lam: complex
    R: complex
    near_pole: bool


def _sqrt_decay(lam) -> complex:
    """Principal branch sqrt(1 + lam); positive real part right of the
    essential spectrum."""
    return cmath.sqrt(1 + lam)


def eval_R(lam, L_f: float = 40.0, h: float = 0.005) -> RValue:
    """R(lambda) = int omega * V where (L^r - lambda) V = omega^2.

    Solved as a banded BVP with decay conditions V' = -/+ sqrt(1+lam) V at
    +-L_f.  Near the simple poles at 5/4 and -3/4 the solve is refused and
    the value flagged.  Near lambda = 0 the translation direction omega' is
    projected out of V (the forcing omega^2 is orthogonal to it, so R is
    unaffected by the kernel).
    """
    lam = complex(lam)
    if abs(lam - POLE_UPPER) < POLE_GUARD or abs(lam - POLE_LOWER) < POLE_GUARD:
        return RValue(lam, complex(math.nan, math.nan), True)
    n = int(round(2 * L_f / h)) + 1
    x = np.linspace(-L_f, L_f, n)
    w = homoclinic_peak(x)
    b = (w**2).astype(complex)
    c = -(1 - 3 / np.cosh(x / 2) ** 2) - lam
    kdec = _sqrt_decay(lam)
    ab = np.zeros((3, n), dtype=complex)
    ab[0, 2:] = 1 / h**2
    ab[1, 1:-1] = -2 / h**2 + c[1:-1]
    ab[2, :-2] = 1 / h**2
    # ghost-eliminated Robin rows: V' = +k V at -L, V' = -k V at +L
    ab[1, 0] = -2 / h**2 + c[0] - 2 * kdec / h
    ab[0, 1] = 2 / h**2
    ab[1, -1] = -2 / h**2 + c[-1] - 2 * kdec / h
    ab[2, -2] = 2 / h**2
    V = solve_banded((1, 1), ab, b)
    if abs(lam) < 1e-4:
        wp = -w * np.tanh(x / 2)  # translation direction
        V = V - (V @ wp) / (wp @ wp) * wp
    R = np.trapezoid(w * V, x)
    if abs(lam.imag) == 0.0:
        R = complex(R.real, 0.0) if abs(R.imag) < 1e-10 * max(1.0, abs(R.real)) else R
    return RValue(lam, R, False)


def eval_R_dense(lam, L_f: float = 40.0, h: float = 0.04) -> complex:
    """Independent dense-matrix route for R: assemble the full operator with
    Dirichlet ends and solve with a general dense solver (cross-check oracle)."""
    n = int(round(2 * L_f / h)) + 1
    x = np.linspace(-L_f, L_f, n)
    w = homoclinic_peak(x)
    A = np.zeros((n, n), dtype=complex)
    idx = np.arange(1, n - 1)
    A[idx, idx] = -2 / h**2 - (1 - 3 / np.cosh(x[idx] / 2) ** 2) - lam
    A[idx, idx - 1] = 1 / h**2
    A[idx, idx + 1] = 1 / h**2
    A[0, 0] = 1.0
    A[-1, -1] = 1.0
    b = (w**2).astype(complex)
    b[0] = b[-1] = 0.0
    V = np.linalg.solve(A, b)
    return complex(np.trapezoid(w * V, x))


@dataclass(frozen=True)
class SlowSlope:
    """Slope of the decaying slow mode at x = 0 for a spectral parameter."""

    lam: complex
    value: complex
    dichotomy_ok: bool


def delta_c_lambda(lam, m: float) -> float:
    """Perturbation budget (1/4)|sqrt(1+m lam)| |sqrt((1+m lam)/(2+m lam))|
    under which the slow eigenvalue system keeps its dichotomy."""
    z = 1 + m * complex(lam)
    return 0.25 * abs(cmath.sqrt(z)) * abs(cmath.sqrt(z / (z + 1)))


def delta_c_stability() -> float:
    """Uniform dichotomy threshold sqrt(6)/24 over the region right of the
    essential spectrum (excluding a half-disc at its tip)."""
    return math.sqrt(6.0) / 24.0


def slow_slope_for_lambda(terrain: Terrain, lam, m: float,
                          L: float = 20.0, n: int = 20001,
                          refine: bool = False,
                          delta: Optional[float] = None) -> SlowSlope:
    """Slope p(0)/u(0) of the slow-field solution decaying as x -> -infinity
    of u'' + f u' + (g - (1 + m lam)) u = 0.

    Flat terrain returns sqrt(1 + m lam) exactly.  For nonflat terrain the
    solve proceeds even when the terrain size exceeds the dichotomy budget
    delta_c(lambda); the flag records the violation.  refine=True Richardson
    extrapolates the slope over grids h and h/2.
    """
    lam = complex(lam)
    sigma = 1 + m * lam
    if terrain.kind == "flat":
        return SlowSlope(lam, cmath.sqrt(sigma), True)
    if delta is None:
        from .terrain import terrain_delta
        delta = terrain_delta(terrain)
    ok = delta < delta_c_lambda(lam, m)
    if sigma.imag == 0:
        sigma = sigma.real
    x, u = solve_decaying(terrain, "minus", L, n, sigma=sigma)
    slope = one_sided_derivative(u, x[1] - x[0], left=False)
    if refine:
        x2, u2 = solve_decaying(terrain, "minus", L, 2 * n - 1, sigma=sigma)
        slope2 = one_sided_derivative(u2, x2[1] - x2[0], left=False)
        slope = (4 * slope2 - slope) / 3
    return SlowSlope(lam, complex(slope), ok)


def nlep_residual(lam, u0: float, mu: float, m: float,
                  terrain: Optional[Terrain] = None,
                  L_f: float = 40.0, h_f: float = 0.005,
                  delta: Optional[float] = None) -> complex:
    """Transmission residual t22 whose zeros are the large eigenvalues.

    Flat terrain (or terrain=None) uses the exact slope sqrt(1 + m lam).
    """
    r = eval_R(lam, L_f=L_f, h=h_f)
    if r.near_pole:
        return complex(math.nan, math.nan)
    if terrain is None or terrain.kind == "flat":
        slope = cmath.sqrt(1 + m * complex(lam))
    else:
        slope = slow_slope_for_lambda(terrain, lam, m, delta=delta).value
    return 1 + (3 - r.R) / (u0**2 * mu * slope)


def find_large_eigs(u0: float, mu: float, m: float,
                    terrain: Optional[Terrain] = None,
                    lam_max: float = 2.0, n_scan: int = 1200,
                    L_f: float = 40.0, h_f: float = 0.01) -> list[float]:
    """Real-branch roots of the large-eigenvalue condition.

    Scans t22 on the real interval (-1 + guard, lam_max], skipping the pole
    guards, and refines each sign change by bisection.  Returns scaled
    eigenvalues lambda (multiply by m for the unscaled ones); the list may
    be empty.
    """
    lo = -1.0 + 10 * POLE_GUARD
    grid = np.linspace(lo, lam_max, n_scan)
    keep = (np.abs(grid - POLE_UPPER) > 2 * POLE_GUARD) & \
           (np.abs(grid - POLE_LOWER) > 2 * POLE_GUARD)
    grid = grid[keep]
    delta = None
    if terrain is not None and terrain.kind != "flat":
        from .terrain import terrain_delta
        delta = terrain_delta(terrain)

    def resid(lv: float) -> float:
        t = nlep_residual(lv, u0, mu, m, terrain, L_f=L_f, h_f=h_f, delta=delta)
        return t.real

    vals = np.array([resid(lv) for lv in grid])
    roots = []
    for i in range(len(grid) - 1):
        a, b = vals[i], vals[i + 1]
        if not (np.isfinite(a) and np.isfinite(b)):
            continue
        if abs(grid[i + 1] - grid[i]) > 2.5 * (grid[1] - grid[0]):
            continue  # do not bracket across a pole guard gap
        if a == 0.0:
            roots.append(float(grid[i]))
        elif a * b < 0:
            roots.append(float(brentq(resid, grid[i], grid[i + 1], xtol=1e-10)))
    return roots


def _pole_expansion_weights(L_f: float = 40.0, n: int = 2001):
    """Spectral decomposition of the fast reduced operator on a grid:
    R(lambda) = sum_k w_k / (lam_k - lambda) with w_k from the eigenvectors.
    Used for fast evaluation of R on dense lambda grids."""
    x = np.linspace(-L_f, L_f, n)
    h = x[1] - x[0]
    diag = -2 / h**2 - (1 - 3 / np.cosh(x / 2) ** 2)
    off = np.full(n - 1, 1 / h**2)
    lam_k, vecs = eigh_tridiagonal(diag, off)
    w = homoclinic_peak(x)
    wk = (vecs.T @ w) * (vecs.T @ (w**2)) * h
    keep = np.abs(wk) > 1e-14 * np.max(np.abs(wk))
    return lam_k[keep], wk[keep]


def skeleton_points(m: float, re_range=(-1.5, 1.5), im_range=(-1.5, 1.5),
                    n_grid: int = 161, L_f: float = 40.0, n_fast: int = 2001) -> Array:
    """Points of the curve Im[(R(lambda) - 3)/sqrt(1 + m lambda)] = 0.

    On this skeleton the large-eigenvalue condition can have complex roots
    (its left side is real).  Zero crossings are located on the edges of a
    rectangular grid by linear interpolation; returns an (N, 2) array of
    (Re lambda, Im lambda) points.
    """
    lam_k, wk = _pole_expansion_weights(L_f=L_f, n=n_fast)
    re = np.linspace(*re_range, n_grid)
    im = np.linspace(*im_range, n_grid)
    LR, LI = np.meshgrid(re, im, indexing="ij")
    lam = LR + 1j * LI
    R = (wk[None, None, :] / (lam_k[None, None, :] - lam[:, :, None])).sum(axis=2)
    F = np.imag((R - 3) / np.sqrt(1 + m * lam + 0j))
    mask = (np.abs(lam - POLE_UPPER) < 5e-2) | (np.abs(lam - POLE_LOWER) < 5e-2) \
        | (np.abs(lam.imag) < 1e-12) & (lam.real <= -1.0)
    F = np.where(mask, np.nan, F)
    pts = []
    s = np.sign(F)
    for axis in (0, 1):
        a = F if axis == 0 else F.T
        sa = s if axis == 0 else s.T
        flip = (sa[:-1, :] * sa[1:, :] < 0) & np.isfinite(a[:-1, :]) & np.isfinite(a[1:, :])
        ii, jj = np.nonzero(flip)
        t = a[ii, jj] / (a[ii, jj] - a[ii + 1, jj])
        if axis == 0:
            pts.append(np.column_stack([re[ii] + t * (re[ii + 1] - re[ii]), im[jj]]))
        else:
            pts.append(np.column_stack([re[jj], im[ii] + t * (im[ii + 1] - im[ii])]))
    if not pts:
        return np.empty((0, 2))
    return np.vstack(pts)


# --- small eigenvalue (broken translation invariance) -----------------------

QUAD_UPPER = 40.0  # integrand decay e^{-2x}: truncation below 1e-30


def _drift_prefactor(delta: float, u0: float, mu: float, tau: float) -> float:
    den = u0 - tau * (1 - mu * u0)
    if den <= 0.5 * u0:
        import warnings
        warnings.warn("tau large: near the drift-instability regime, the "
                      "small-eigenvalue expansion degrades", RuntimeWarning)
    return 2 * tau * delta / den


def small_eig_general(delta: float, f_base_prime: Callable, g_base_prime: Callable,
                      u0: float, mu: float, tau: float) -> float:
    """Small eigenvalue for a scaled pair (f, g) = delta (f~, g~):

    lam0 = 2 tau delta / (u0 - tau(1 - mu u0)) *
           int_0^inf e^{-2x} [f~'(x)(1 - mu u0) + g~'(x)(e^x + mu u0 - 1)] dx
    """
    c = 1 - mu * u0
    val = quad(lambda x: math.exp(-2 * x) * (f_base_prime(x) * c
                                             + g_base_prime(x) * (math.exp(x) - c)),
               0, QUAD_UPPER, limit=400)[0]
    return _drift_prefactor(delta, u0, mu, tau) * val


def small_eig_double_limit(delta: float, f_base_prime: Callable,
                           g_base_prime: Callable, tau: float) -> float:
    """Joint limit mu -> 0, tau -> 0 of the small eigenvalue:
    (2/3) tau delta int_0^inf e^{-2x} [f~' + g~'(e^x - 1)] dx."""
    val = quad(lambda x: math.exp(-2 * x) * (f_base_prime(x)
                                             + g_base_prime(x) * (math.exp(x) - 1)),
               0, QUAD_UPPER, limit=400)[0]
    return (2.0 / 3.0) * tau * delta * val


def small_eig_height(delta: float, h_base: Callable, h_base_pp0: float,
                     u0: float, mu: float, tau: float) -> float:
    """Height-function form: for f~ = h~', g~ = h~'',
    lam0 = pref * [-mu u0 h~''(0) + h~(0)(1 - 2 mu u0)
                   + int_0^inf h~(x)(e^{-x} - 4(1 - mu u0) e^{-2x}) dx]."""
    c = 1 - mu * u0
    val = quad(lambda x: h_base(x) * (math.exp(-x) - 4 * c * math.exp(-2 * x)),
               0, QUAD_UPPER, limit=400)[0]
    bracket = -mu * u0 * h_base_pp0 + h_base(0.0) * (1 - 2 * mu * u0) + val
    return _drift_prefactor(delta, u0, mu, tau) * bracket


def small_eig_height_limit(delta: float, h_base: Callable, tau: float) -> float:
    """Joint limit of the height-function form:
    (2/3) tau delta [h~(0) + int_0^inf h~(x)(e^{-x} - 4 e^{-2x}) dx]."""
    val = quad(lambda x: h_base(x) * (math.exp(-x) - 4 * math.exp(-2 * x)),
               0, QUAD_UPPER, limit=400)[0]
    return (2.0 / 3.0) * tau * delta * (h_base(0.0) + val)


def small_eig_weak_curvature(delta: float, sigma: float, h_hat_pp0: float,
                             u0: float, mu: float, tau: float) -> float:
    """Slowly varying height h~(x) = h^(sigma x), sigma << 1:
    lam0 = tau delta sigma^2 (1 - mu u0) / (u0 - tau(1 - mu u0)) * h^''(0);
    the pulse is stable on hilltops (h^''(0) < 0) and unstable in valleys."""
    return 0.5 * _drift_prefactor(delta, u0, mu, tau) * sigma**2 * (1 - mu * u0) * h_hat_pp0


def small_eig_strong_curvature(delta: float, sigma: float, h_brv0: float,
                               h_brv_pp0: float, u0: float, mu: float,
                               tau: float) -> float:
    """Rapidly varying height h~(x) = h_brv(x / sigma), sigma << 1:
    lam0 = pref * [-(mu u0 / sigma^2) h_brv''(0) + (1 - 2 mu u0) h_brv(0)];
    the stability verdict of the weak-curvature case flips."""
    return _drift_prefactor(delta, u0, mu, tau) * (
        -mu * u0 * h_brv_pp0 / sigma**2 + (1 - 2 * mu * u0) * h_brv0)


def _sech(y: float) -> float:
    e = math.exp(-abs(y))
    return 2 * e / (1 + e * e)


_FAMILIES = {
    "gaussian": lambda B: (lambda x: math.exp(-B * x * x)),
    "sech": lambda B: (lambda x: _sech(B * x)),
    "cosine": lambda B: (lambda x: math.cos(B * x)),
}


def curvature_threshold(family: str, bracket=(0.05, 5.0)) -> float:
    """Critical curvature B_c where the small eigenvalue of the unit-height
    bump h(x; B) changes sign in the joint limit (root of
    h(0) + int_0^inf h(x)(e^{-x} - 4 e^{-2x}) dx in B).

    For the cosine family the bracket integral is
    1 + 1/(1+B^2) - 8/(4+B^2), whose positive root is sqrt(2)."""
    try:
        shape = _FAMILIES[family]
    except KeyError:
        raise ValueError(f"unknown family {family!r}; pick from {sorted(_FAMILIES)}")

    def S(B: float) -> float:
        h = shape(B)
        val = quad(lambda x: h(x) * (math.exp(-x) - 4 * math.exp(-2 * x)),
                   0, QUAD_UPPER, limit=400)[0]
        return h(0.0) + val

    return float(brentq(S, *bracket, xtol=1e-12))


@dataclass(frozen=True)
class SpectrumReport:
    """Summary of the pulse spectrum for one terrain/parameter pairing."""

    essential_sup: float
    reduced_eigs: Array
    large_eig_roots: list
    small_eig: Optional[float]
    delta_c: float


def spectrum_report(u0: float, mu: float, m: float,
                    terrain: Optional[Terrain] = None,
                    small_eig: Optional[float] = None,
                    lam_max: float = 2.0) -> SpectrumReport:
    """Assemble essential spectrum, reduced-operator eigenvalues, real-branch
    roots of the large-eigenvalue condition, and the dichotomy threshold."""
    return SpectrumReport(
        essential_sup=essential_spectrum(m),
        reduced_eigs=np.asarray(reduced_operator_eigs()),
        large_eig_roots=find_large_eigs(u0, mu, m, terrain, lam_max=lam_max),
        small_eig=small_eig,
        delta_c=delta_c_stability(),
    )
