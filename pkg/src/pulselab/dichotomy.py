"""Exponential-dichotomy constants and the geometric bounds built on them.

The planar slow subsystem is a bounded perturbation of the saddle
Y' = [[0,1],[1,0]] Y, which has dichotomy constants K_aut = rho_aut = 1.
Perturbing the coefficient matrix by a bounded A(x) with
sup ||A(x)|| = delta keeps a dichotomy as long as delta < rho_aut/(4 K_aut^2),
with explicitly degraded constants.  From the perturbed projections one
gets quantitative bounds on how far the stable/unstable directions and the
bounded solution can move; those bounds are the workhorse of both the
existence and the stability pipelines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class DichotomyConstants:
    """Dichotomy constants of the perturbed system.

    K = (5/2) K_aut^2 and rho = rho_aut - 2 K_aut delta; valid only while
    rho stays positive, which the constructor guarantees.
    """

    K_aut: float
    rho_aut: float
    delta: float
    K: float
    rho: float


class DichotomyError(ValueError):
    """Perturbation too large: no dichotomy is guaranteed."""


def roughness_constants(K_aut: float, rho_aut: float, delta: float) -> DichotomyConstants:
    """Perturbed dichotomy constants; requires delta < rho_aut / (4 K_aut^2)."""
    if K_aut <= 0 or rho_aut <= 0 or delta < 0:
        raise ValueError("need K_aut, rho_aut > 0 and delta >= 0")
    if delta >= rho_aut / (4 * K_aut**2):
        raise DichotomyError(
            f"delta={delta:g} >= rho_aut/(4 K_aut^2)={rho_aut / (4 * K_aut**2):g}: "
            "no dichotomy guaranteed")
    return DichotomyConstants(K_aut=K_aut, rho_aut=rho_aut, delta=delta,
                              K=2.5 * K_aut**2, rho=rho_aut - 2 * K_aut * delta)


def projection_distance_bound(K_aut: float, rho_aut: float, delta: float) -> float:
    """Bound 4 K_aut^3 delta / rho_aut on the distance between the perturbed
    and unperturbed dichotomy projections."""
    roughness_constants(K_aut, rho_aut, delta)  # validity check
    return 4 * K_aut**3 * delta / rho_aut


def bounded_solution_distance_bound(consts: DichotomyConstants, F_norm: float) -> float:
    """Bound 4 delta K_aut K / (rho_aut rho) * ||F|| on the distance between
    the bounded solutions of the perturbed and unperturbed inhomogeneous systems."""
    return 4 * consts.delta * consts.K_aut * consts.K / (consts.rho_aut * consts.rho) * F_norm


def projection_vector_closeness(delta: float) -> float:
    """Bound sqrt(8 delta) on the distance between the unit vectors spanning
    the perturbed and unperturbed rank-1 projections (up to sign)."""
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    return math.sqrt(8 * delta)


@dataclass(frozen=True)
class SlopeInterval:
    """Admissible interval for the slope difference C - C_aut.

    The bounds degenerate to +-infinity when a projection line passes
    through the vertical axis; those cases are encoded by the unbounded
    flags, never by floating-point infinities.  When both bounds are finite
    and C_max < C_min the admissible set wraps through infinity (disjoint).
    """

    C_aut: float
    delta: float
    C_min: float | None
    C_max: float | None
    min_unbounded: bool
    max_unbounded: bool
    disjoint: bool

    def contains(self, value: float) -> bool:
        """Membership of `value` in the (closure of the) admissible set for
        C - C_aut; closed comparisons so the degenerate delta=0 point counts."""
        if self.min_unbounded and self.max_unbounded:
            return True
        if self.min_unbounded:
            return value <= self.C_max
        if self.max_unbounded:
            return value >= self.C_min
        if self.disjoint:
            return value <= self.C_max or value >= self.C_min
        return self.C_min <= value <= self.C_max


# relative threshold for singular-denominator detection: delta is a computed
# supremum, exact-equality tests would be meaningless
_SINGULAR_RTOL = 1e-12


def slope_interval(delta: float, C_aut: float) -> SlopeInterval:
    """Admissible slope-difference interval for perturbation size delta.

    C_min = -(1+C_aut^2) * s / ((1-4 delta) + C_aut s)
    C_max = +(1+C_aut^2) * s / ((1-4 delta) - C_aut s)
    with s = 2 sqrt(2) sqrt(delta) sqrt(1-2 delta); a vanishing denominator
    sends the respective bound to -/+ infinity.
    """
    if delta < 0 or delta >= 0.25:
        raise DichotomyError(f"slope interval requires 0 <= delta < 1/4, got {delta:g}")
    s = 2 * math.sqrt(2.0) * math.sqrt(delta) * math.sqrt(1 - 2 * delta)
    num = (1 + C_aut**2) * s
    den_min = (1 - 4 * delta) + C_aut * s
    den_max = (1 - 4 * delta) - C_aut * s
    scale = max(abs(1 - 4 * delta), abs(C_aut * s), 1e-300)
    min_unb = abs(den_min) <= _SINGULAR_RTOL * scale
    max_unb = abs(den_max) <= _SINGULAR_RTOL * scale
    C_min = None if min_unb else -num / den_min
    C_max = None if max_unb else num / den_max
    disjoint = (not min_unb and not max_unb and C_max < C_min)
    return SlopeInterval(C_aut=C_aut, delta=delta, C_min=C_min, C_max=C_max,
                         min_unbounded=min_unb, max_unbounded=max_unb,
                         disjoint=disjoint)


def slope_singular_delta(C_aut: float) -> tuple[float, float]:
    """The two delta values where the slope bounds degenerate:
    (1/4)(1 + C_aut/sqrt(1+C_aut^2)) for C_min and the mirrored value for C_max."""
    w = C_aut / math.sqrt(1 + C_aut**2)
    return 0.25 * (1 + w), 0.25 * (1 - w)
