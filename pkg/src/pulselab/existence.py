"""Leading-order construction of stationary pulse solutions.

The fast subsystem carries an explicit homoclinic orbit; matching its
take-off/touch-down jump against the slow-field geometry at x = 0 fixes the
admissible pulse amplitudes u0.  A pulse exists when the background value
u_b(0) is positive, the stable slope Cs0 is negative, and the matching
discriminant u_b(0)^2 + 12 mu / Cs0 is positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import ModelParams, derive_scales
from .slowfield import SlowFieldSolution, solve_slow_field
from .terrain import Terrain

Array = np.ndarray


def homoclinic_peak(xi: Array) -> Array:
    """The fast homoclinic shape 3/2 sech^2(xi/2)."""
    return 1.5 / np.cosh(np.clip(np.asarray(xi, dtype=float) / 2, -350, 350)) ** 2


def fast_homoclinic(xi, u0: float):
    """Fast-field pulse (v, q) = (omega(xi)/u0, omega'(xi)/u0)."""
    if u0 == 0:
        raise ValueError("u0 must be nonzero")
    xi = np.asarray(xi, dtype=float)
    w = homoclinic_peak(xi)
    v = w / u0
    q = -w * np.tanh(xi / 2) / u0
    return v, q


def hamiltonian(v, q, u):
    """Invariant 1/2 q^2 - 1/2 v^2 + 1/3 u v^3 of the planar fast subsystem."""
    v = np.asarray(v, dtype=float)
    q = np.asarray(q, dtype=float)
    return 0.5 * q**2 - 0.5 * v**2 + u * v**3 / 3.0


def takeoff_touchdown(u, epsilon: float, which: str):
    """Take-off ('o') / touch-down ('d') momentum p = -/+ 3 eps / u, u > 0."""
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0):
        raise ValueError("take-off/touch-down curves are defined for u > 0")
    if which == "o":
        return -3.0 * epsilon / u
    if which == "d":
        return 3.0 * epsilon / u
    raise ValueError("which must be 'o' or 'd'")


@dataclass(frozen=True)
class PulseAmplitudes:
    """Roots of the amplitude matching condition mu*Cs0*(u0 - u_b0) = 3/u0."""

    u_b0: float
    Cs0: float
    mu: float
    discriminant: float
    u0_minus: Optional[float]
    u0_plus: Optional[float]
    exists: bool

    def branch(self, name: str) -> float:
        val = self.u0_minus if name == "minus" else self.u0_plus
        if val is None:
            raise ValueError("no pulse amplitude on this branch")
        return val


def compute_u0(u_b0: float, Cs0: float, mu: float) -> PulseAmplitudes:
    """Pulse amplitudes u0 = (u_b0 +- sqrt(u_b0^2 + 12 mu / Cs0)) / (2 mu).

    A negative discriminant (or a nonpositive smaller root) means no pulse;
    that is reported through the flags, not an exception.
    """
    if mu <= 0:
        raise ValueError("mu must be positive")
    if Cs0 >= 0:
        return PulseAmplitudes(u_b0, Cs0, mu, math.nan, None, None, False)
    disc = u_b0**2 + 12.0 * mu / Cs0
    if disc < 0:
        return PulseAmplitudes(u_b0, Cs0, mu, disc, None, None, False)
    root = math.sqrt(disc)
    u0m = (u_b0 - root) / (2 * mu)
    u0p = (u_b0 + root) / (2 * mu)
    exists = u_b0 > 0 and u0m > 0
    return PulseAmplitudes(u_b0, Cs0, mu, disc,
                           u0m if exists else None,
                           u0p if u0p > 0 else None,
                           exists)


def u0_flat(mu: float, branch: str = "minus") -> float:
    """Closed-form amplitudes (1 -+ sqrt(1 - 12 mu)) / (2 mu) of flat terrain."""
    if not 0 < mu <= 1.0 / 12.0:
        raise ValueError("flat-terrain pulses require 0 < mu <= 1/12")
    root = math.sqrt(1 - 12 * mu)
    return (1 - root) / (2 * mu) if branch == "minus" else (1 + root) / (2 * mu)


@dataclass(frozen=True)
class ExistenceReport:
    """The three existence conditions with their measured quantities."""

    u_b0: float
    Cs0: float
    mu: float
    background_positive: bool
    slope_negative: bool
    discriminant_positive: bool
    amplitudes: PulseAmplitudes

    @property
    def exists(self) -> bool:
        return (self.background_positive and self.slope_negative
                and self.discriminant_positive)


def existence_check(terrain: Terrain, params: ModelParams,
                    slow: Optional[SlowFieldSolution] = None) -> ExistenceReport:
    """Evaluate the pulse existence conditions for a terrain/parameter pairing."""
    scales = derive_scales(params)
    if slow is None:
        slow = solve_slow_field(terrain)
    if slow.Cs0 is None:
        raise ValueError("existence check needs the decaying solutions "
                         "(periodic terrains carry no far-field slopes)")
    ub0 = slow.u_b0
    amps = compute_u0(ub0, slow.Cs0, scales.mu)
    return ExistenceReport(
        u_b0=ub0, Cs0=slow.Cs0, mu=scales.mu,
        background_positive=ub0 > 0,
        slope_negative=slow.Cs0 < 0,
        discriminant_positive=(not math.isnan(amps.discriminant)) and amps.discriminant > 0,
        amplitudes=amps,
    )


@dataclass(frozen=True)
class PulseProfile:
    """Leading-order pulse profile, stitched from fast and slow pieces.

    Fast grid: xi in [-40, 40]; u is the plateau u0 blended into the slow
    tails over two cells at the seams +-1/sqrt(eps); v, q are the fast
    homoclinic.  Slow grid: the full slow interval with (u, p) of the tail
    formula (u_b - (u_b(0) - mu u0) u_+-) / mu.
    """

    u0: float
    branch: str
    position: float
    epsilon: float
    mu: float
    xi: Array
    u: Array
    p: Array
    v: Array
    q: Array
    x_slow: Array
    u_slow: Array
    p_slow: Array

    def physical_fields(self, params: ModelParams):
        """Unscaled (x, U, V) of the pulse on the fast grid:
        x = D xi / sqrt(m), U = a mu u, V = a v / (sqrt(m) D)."""
        fac_x = params.D / math.sqrt(params.m)
        scales = derive_scales(params)
        x = fac_x * self.xi + self.position
        U = params.a * scales.mu * self.u
        V = params.a / (math.sqrt(params.m) * params.D) * self.v
        return x, U, V


class PulseConstructionError(RuntimeError):
    """Existence conditions failed; carries the report."""

    def __init__(self, report: ExistenceReport):
        self.report = report
        failed = [name for name, ok in (
            ("background_positive", report.background_positive),
            ("slope_negative", report.slope_negative),
            ("discriminant_positive", report.discriminant_positive)) if not ok]
        super().__init__(f"no pulse: failed condition(s) {', '.join(failed)}")


def assemble_profile(terrain: Terrain, params: ModelParams, branch: str = "minus",
                     slow: Optional[SlowFieldSolution] = None,
                     xi_max: float = 40.0, xi_step: float = 0.01) -> PulseProfile:
    """Stitch the leading-order pulse profile for the given branch.

    The seam sits at |xi| = 1/sqrt(eps); u blends linearly from the fast
    plateau to the slow tail over two fast-grid cells there (the profile is
    only defined up to O(sqrt(eps)) at the seam).
    """
    scales = derive_scales(params)
    if slow is None:
        slow = solve_slow_field(terrain)
    report = existence_check(terrain, params, slow=slow)
    if not report.exists:
        raise PulseConstructionError(report)
    u0 = report.amplitudes.branch(branch)
    eps, mu = scales.epsilon, scales.mu
    ub0 = slow.u_b0

    n_half = int(round(xi_max / xi_step))
    xi = np.linspace(-xi_max, xi_max, 2 * n_half + 1)  # exactly symmetric grid
    v, q = fast_homoclinic(xi, u0)
    x_of_xi = eps**2 * mu * xi  # the slow variable is the unscaled position

    # slow tails on the fast grid
    amp = ub0 - mu * u0
    u_tail = np.empty_like(xi)
    p_tail = np.empty_like(xi)
    pos = xi >= 0
    for side, mask in (("plus", pos), ("minus", ~pos)):
        xs = slow.x_plus if side == "plus" else slow.x_minus
        us = slow.u_plus if side == "plus" else slow.u_minus
        xq = np.clip(x_of_xi[mask], xs[0], xs[-1])
        ub = np.interp(xq, slow.x, slow.u_b)
        pb = np.interp(xq, slow.x, slow.p_b)
        ud = np.interp(xq, xs, us)
        h = xs[1] - xs[0]
        dud = np.interp(xq, xs, np.gradient(us, h))
        u_tail[mask] = (ub - amp * ud) / mu
        p_tail[mask] = eps * (pb - amp * dud)

    seam = 1.0 / math.sqrt(eps)
    blend_w = 2 * xi_step
    lam = np.clip((np.abs(xi) - seam) / blend_w, 0.0, 1.0)  # 0 fast, 1 slow
    u = (1 - lam) * u0 + lam * u_tail
    p = lam * p_tail
    v = (1 - lam) * v
    q = (1 - lam) * q

    tail, tail_d = _tail_on_full_grid(slow)
    return PulseProfile(
        u0=u0, branch=branch, position=0.0, epsilon=eps, mu=mu,
        xi=xi, u=u, p=p, v=v, q=q,
        x_slow=slow.x,
        u_slow=(slow.u_b - amp * tail) / mu,
        p_slow=(slow.p_b - amp * tail_d) / mu,
    )


def _tail_on_full_grid(slow: SlowFieldSolution):
    """Decaying-solution samples (and derivative) patched onto the full slow
    grid, each side taken from its own half interval."""
    out = np.empty_like(slow.x)
    out_d = np.empty_like(slow.x)
    pos = slow.x >= 0
    for mask, xs, us in ((pos, slow.x_plus, slow.u_plus),
                         (~pos, slow.x_minus, slow.u_minus)):
        out[mask] = np.interp(slow.x[mask], xs, us)
        out_d[mask] = np.interp(slow.x[mask], xs, np.gradient(us, xs[1] - xs[0]))
    return out, out_d
