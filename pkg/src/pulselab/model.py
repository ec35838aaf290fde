"""Model parameters, derived scale quantities and assumption checks.

The model is the water/vegetation system

    U_t = U_xx + f(x) U_x + g(x) U + a - U - U V^2
    V_t = D^2 V_xx - m V + U V^2

with rainfall a > 0, mortality m > 0 and diffusivity ratio D > 0.  The
coefficient pair (f, g) describes the terrain; on sloped ground it derives
from a height profile h as f = h', g = h''.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .terrain import Terrain, terrain_delta


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of the model; all strictly positive."""

    a: float
    m: float
    D: float

    def __post_init__(self):
        if not (self.a > 0 and self.m > 0 and self.D > 0):
            raise ValueError(f"parameters must be positive, got a={self.a}, m={self.m}, D={self.D}")


@dataclass(frozen=True)
class ScaleSet:
    """Derived dimensionless scale quantities.

    epsilon = a / m
    mu      = m sqrt(m) D / a^2
    tau     = D a^2 / m^(3/2)   (== epsilon^4 * mu * m)
    nu      = m^2 D / a^2       (== mu * sqrt(m))
    """

    epsilon: float
    mu: float
    tau: float
    nu: float


def derive_scales(params: ModelParams) -> ScaleSet:
    """Compute the four scale quantities from the physical parameters."""
    a, m, D = params.a, params.m, params.D
    eps = a / m
    mu = m * math.sqrt(m) * D / a**2
    tau = D * a**2 / m**1.5
    nu = m**2 * D / a**2
    return ScaleSet(epsilon=eps, mu=mu, tau=tau, nu=nu)


@dataclass(frozen=True)
class AssumptionReport:
    """Outcome of the standing-assumption checks.

    The checks never abort: downstream code decides whether a violation is a
    warning or a refusal.  Each flag comes with the measured quantity it was
    judged on.
    """

    a1_small_epsilon: bool
    a2_symmetry: bool
    a3_delta_below_quarter: bool
    a4_farfield_decay: bool
    a5_bounded_coefficients: bool
    epsilon: float
    symmetry_residual_f: float
    symmetry_residual_g: float
    delta: float
    farfield_level: float
    sup_f: float
    sup_g: float

    @property
    def all_satisfied(self) -> bool:
        return (self.a1_small_epsilon and self.a2_symmetry
                and self.a3_delta_below_quarter and self.a4_farfield_decay
                and self.a5_bounded_coefficients)


# a1 asks for epsilon "small"; one decade below unity is our cut.
EPSILON_SMALL = 0.1
# a5 asks for O(1) coefficient norms.
SUP_NORM_LIMIT = 100.0
SYMMETRY_TOL = 1e-12
FARFIELD_TOL = 1e-6


def check_assumptions(params: ModelParams, terrain: Terrain,
                      halfwidth: float = 50.0, n: int = 4001) -> AssumptionReport:
    """Evaluate the five standing assumptions for a parameter/terrain pairing."""
    eps = params.a / params.m
    x = np.linspace(-halfwidth, halfwidth, n)
    fv, gv = terrain.f(x), terrain.g(x)
    res_f = float(np.max(np.abs(fv + fv[::-1])))
    res_g = float(np.max(np.abs(gv - gv[::-1])))
    delta = terrain_delta(terrain, halfwidth=halfwidth, n=n)
    # far-field: coefficient magnitude over the outer 20% of the window
    tail = x >= 0.8 * halfwidth
    tail_level = float(np.max(np.hypot(fv[tail], gv[tail])))
    tail = x <= -0.8 * halfwidth
    tail_level = max(tail_level, float(np.max(np.hypot(fv[tail], gv[tail]))))
    sup_f = float(np.max(np.abs(fv)))
    sup_g = float(np.max(np.abs(gv)))
    return AssumptionReport(
        a1_small_epsilon=eps <= EPSILON_SMALL,
        a2_symmetry=(res_f <= SYMMETRY_TOL and res_g <= SYMMETRY_TOL),
        a3_delta_below_quarter=delta < 0.25,
        a4_farfield_decay=tail_level <= FARFIELD_TOL,
        a5_bounded_coefficients=(sup_f <= SUP_NORM_LIMIT and sup_g <= SUP_NORM_LIMIT),
        epsilon=eps,
        symmetry_residual_f=res_f,
        symmetry_residual_g=res_g,
        delta=delta,
        farfield_level=tail_level,
        sup_f=sup_f,
        sup_g=sup_g,
    )
