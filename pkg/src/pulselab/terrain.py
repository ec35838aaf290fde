"""Terrain catalog: the coefficient pair (f, g) of the advection/reaction terms.

Every terrain provides vectorized callables ``f(x)`` and ``g(x)``.  Kinds
derived from a height profile h carry h itself (and h''' where available,
used by the perturbation formulas for the drift eigenvalue).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import minimize_scalar

Array = np.ndarray


@dataclass(frozen=True)
class Terrain:
    """Coefficient pair (f, g), optionally derived from a height function h.

    Attributes
    ----------
    kind : str
        Catalog name ("flat", "gaussian", ...).
    f, g : callables
        Advection and reaction coefficients, vectorized over x.
    symmetric : bool
        True when f is odd and g is even (checked numerically for custom
        terrains, structural for the catalog).
    h, g_prime : callables or None
        Height function and dg/dx = h''' when available analytically.
    delta_scale : float or None
        For scaled pairs f = delta*f_base, g = delta*g_base: the multiplier.
    f_base, g_base : callables or None
        The unscaled pair of a scaled-pair terrain.
    period : float or None
        Spatial period for periodic terrains (drives periodic solvers).
    x_range : tuple or None
        Valid evaluation range of a sampled custom terrain.
    """

    kind: str
    f: Callable[[Array], Array]
    g: Callable[[Array], Array]
    symmetric: bool
    params: tuple = ()
    h: Optional[Callable[[Array], Array]] = None
    g_prime: Optional[Callable[[Array], Array]] = None
    delta_scale: Optional[float] = None
    f_base: Optional[Callable[[Array], Array]] = None
    g_base: Optional[Callable[[Array], Array]] = None
    f_base_prime: Optional[Callable[[Array], Array]] = None
    g_base_prime: Optional[Callable[[Array], Array]] = None
    h_base: Optional[Callable[[Array], Array]] = None
    period: Optional[float] = None
    x_range: Optional[tuple] = None

    def label(self) -> str:
        if self.params:
            return f"{self.kind}({', '.join(f'{p:g}' for p in self.params)})"
        return self.kind


def terrain_eval(t: Terrain, x) -> tuple:
    """Evaluate (f, g) at x; raises outside the sample range of custom terrains."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("positions must be finite")
    if t.x_range is not None:
        lo, hi = t.x_range
        if np.any(x < lo) or np.any(x > hi):
            raise ValueError(f"x outside sampled terrain range [{lo}, {hi}]")
    return t.f(x), t.g(x)


def flat() -> Terrain:
    z = lambda x: np.zeros_like(np.asarray(x, dtype=float))
    return Terrain("flat", z, z, symmetric=True, h=z, g_prime=z)


def gaussian(A: float, B: float) -> Terrain:
    """Bump terrain h(x) = A exp(-B x^2), B > 0."""
    if B <= 0:
        raise ValueError("B must be positive")
    h = lambda x: A * np.exp(-B * x**2)
    f = lambda x: -2 * A * B * x * np.exp(-B * x**2)
    g = lambda x: (-2 * A * B + 4 * A * B**2 * x**2) * np.exp(-B * x**2)
    gp = lambda x: (12 * A * B**2 * x - 8 * A * B**3 * x**3) * np.exp(-B * x**2)
    return Terrain("gaussian", f, g, symmetric=True, params=(A, B), h=h, g_prime=gp)


def sech_bump(A: float, B: float) -> Terrain:
    """Bump terrain h(x) = A sech(B x), B > 0."""
    if B <= 0:
        raise ValueError("B must be positive")
    h = lambda x: A / np.cosh(B * x)
    f = lambda x: -A * B * np.tanh(B * x) / np.cosh(B * x)
    g = lambda x: A * B**2 * (np.tanh(B * x)**2 - 1 / np.cosh(B * x)**2) / np.cosh(B * x)
    gp = lambda x: A * B**3 * np.tanh(B * x) * (5 / np.cosh(B * x)**2 - np.tanh(B * x)**2) / np.cosh(B * x)
    return Terrain("sech", f, g, symmetric=True, params=(A, B), h=h, g_prime=gp)


def cosine(A: float, B: float) -> Terrain:
    """Periodic terrain h(x) = A cos(B x), B > 0; period 2 pi / B."""
    if B <= 0:
        raise ValueError("B must be positive")
    h = lambda x: A * np.cos(B * x)
    f = lambda x: -A * B * np.sin(B * x)
    g = lambda x: -A * B**2 * np.cos(B * x)
    gp = lambda x: A * B**3 * np.sin(B * x)
    return Terrain("cosine", f, g, symmetric=True, params=(A, B), h=h,
                   g_prime=gp, period=2 * np.pi / B)


def ln_cosh(beta: float) -> Terrain:
    """Ridge terrain h(x) = -2 ln cosh(beta x); f, g have nonzero far-field limits."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    h = lambda x: -2 * np.log(np.cosh(np.clip(beta * x, -700, 700))) * 1.0
    f = lambda x: -2 * beta * np.tanh(beta * x)
    g = lambda x: -2 * beta**2 / np.cosh(np.clip(beta * x, -350, 350))**2
    gp = lambda x: 4 * beta**3 * np.tanh(beta * x) / np.cosh(np.clip(beta * x, -350, 350))**2
    return Terrain("ln_cosh", f, g, symmetric=True, params=(beta,), h=h, g_prime=gp)


def scaled_pair(delta: float,
                f_base: Callable[[Array], Array],
                g_base: Callable[[Array], Array],
                f_base_prime: Optional[Callable] = None,
                g_base_prime: Optional[Callable] = None,
                h_base: Optional[Callable] = None,
                symmetric: bool = True,
                period: Optional[float] = None) -> Terrain:
    """Terrain f = delta * f_base, g = delta * g_base with small delta.

    Used by the perturbation formulas; carries the base pair so the
    eigenvalue expressions can be evaluated at unit scale.
    """
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    f = lambda x: delta * f_base(x)
    g = lambda x: delta * g_base(x)
    gp = None if g_base_prime is None else (lambda x: delta * g_base_prime(x))
    h = None if h_base is None else (lambda x: delta * h_base(x))
    return Terrain("scaled_pair", f, g, symmetric=symmetric, params=(delta,),
                   h=h, g_prime=gp, delta_scale=delta,
                   f_base=f_base, g_base=g_base,
                   f_base_prime=f_base_prime, g_base_prime=g_base_prime,
                   h_base=h_base, period=period)


def scaled_height(delta: float, h_base: Callable, h1: Callable, h2: Callable,
                  h3: Optional[Callable] = None, period: Optional[float] = None) -> Terrain:
    """Scaled pair derived from a height profile: f = delta*h1, g = delta*h2.

    h1, h2, h3 are the first three derivatives of h_base; for height-derived
    pairs f_base' = g_base, so only h3 adds information.
    """
    return scaled_pair(delta, h1, h2, f_base_prime=h2, g_base_prime=h3,
                       h_base=h_base, period=period)


def custom(x: Array, f_samples: Array, g_samples: Array) -> Terrain:
    """Terrain from sampled (f, g) curves with cubic interpolation.

    Evaluation outside the sample range raises.  The symmetry flag is set
    from a numerical oddness/evenness test on the samples.
    """
    x = np.asarray(x, dtype=float)
    fs = CubicSpline(x, np.asarray(f_samples, dtype=float))
    gs = CubicSpline(x, np.asarray(g_samples, dtype=float))
    xs = np.linspace(max(x[0], -x[-1]) * 0.99, min(x[-1], -x[0]) * 0.99, 501)
    sym = (np.max(np.abs(fs(xs) + fs(-xs))) <= 1e-10
           and np.max(np.abs(gs(xs) - gs(-xs))) <= 1e-10)
    return Terrain("custom", lambda y: fs(y), lambda y: gs(y), symmetric=bool(sym),
                   g_prime=lambda y: gs(y, 1), x_range=(float(x[0]), float(x[-1])))


def terrain_delta(t: Terrain, halfwidth: float = 50.0, n: int = 2001) -> float:
    """Supremum of sqrt(f^2 + g^2) on [-halfwidth, halfwidth].

    Grid search followed by a golden-section refinement around the grid
    maximizer.  All catalog terrains decay or are periodic, so the window
    default of 50 captures (or approaches) the supremum.
    """
    if halfwidth <= 0 or n < 100:
        raise ValueError("need halfwidth > 0 and n >= 100")
    if t.x_range is not None:
        halfwidth = min(halfwidth, -t.x_range[0], t.x_range[1])
    x = np.linspace(-halfwidth, halfwidth, n)
    amp = np.hypot(t.f(x), t.g(x))
    i = int(np.argmax(amp))
    best = float(amp[i])
    lo = x[max(i - 1, 0)]
    hi = x[min(i + 1, n - 1)]
    if hi > lo:
        neg = lambda y: -float(np.hypot(t.f(np.asarray([y]))[0], t.g(np.asarray([y]))[0]))
        res = minimize_scalar(neg, bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-12})
        best = max(best, -res.fun)
    return best
