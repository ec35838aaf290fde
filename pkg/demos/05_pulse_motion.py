"""Slow pulse motion: trajectories, rest points, the curvature pitchfork and
stationary pulse pairs.

Terrain breaks translation invariance, so a pulse drifts with velocity
(tau/6)[u'(P+)^2 - u'(P-)^2].  On a bump the top attracts at weak curvature
and repels past a critical curvature B_c, where a pitchfork hands stability
to a symmetric pair of off-center rest points.  On the log-cosh ridge the
attraction is strong enough to hold a stationary two-pulse state.
"""

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import pulselab as pl

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

tau = pl.derive_scales(pl.ModelParams(0.5, 0.45, 0.01)).tau
fig, axes = plt.subplots(1, 3, figsize=(14, 4))

# trajectories on weak and strong curvature bumps
for B, style in ((0.5, "-"), (1.5, "--")):
    for P0 in (0.15, 0.45, 0.9):
        traj = pl.integrate_pulse_ode(pl.gaussian(1.0, B), [P0], 12000.0, tau,
                                      n_out=120)
        axes[0].plot(traj.t, traj.P[:, 0], style, lw=1,
                     color="C0" if B == 0.5 else "C3")
axes[0].set_title("position vs time (solid B=0.5, dashed B=1.5)")
axes[0].set_xlabel("t")

# pitchfork: drift eigenvalue of the centered rest point and the new branch
res = pl.continue_bifurcation("gaussian", 1.0, 0.4, 1.9, tau,
                              n_branch=14, branch_span=0.9)
Bs = np.linspace(0.4, 1.9, 25)
lams = [pl.fixed_point_eigenvalue(pl.gaussian(1.0, B), 0.0, tau,
                                  check_fixed=False) for B in Bs]
axes[1].plot(Bs, np.zeros_like(Bs), "C0", lw=1)
axes[1].plot(res.branch_B, res.branch_P, "C3.-", label="off-center rest points")
axes[1].plot(res.branch_B, -res.branch_P, "C3.-")
axes[1].axvline(res.B_c, ls=":", c="k", label=f"B_c = {res.B_c:.3f}")
axes[1].set_title("pitchfork of the bump top (A = 1)")
axes[1].set_xlabel("curvature B")
axes[1].set_ylabel("rest position")
axes[1].legend(fontsize=8)
print(f"gaussian A=1: B_c = {res.B_c:.4f}")
print("formula-route thresholds as A -> 0:",
      {f: round(pl.curvature_threshold(f), 4) for f in ("gaussian", "sech", "cosine")})

# stationary two-pulse state on the ridge
betas = np.linspace(0.3, 3.0, 18)
seps = [pl.two_pulse_position(b) for b in betas]
axes[2].plot(betas, seps, ".-")
axes[2].set_title("two-pulse rest half-separation on the ridge")
axes[2].set_xlabel("ridge steepness beta")
print(f"two-pulse rest separation at beta=1: +-{pl.two_pulse_position(1.0):.4f}")

fig.tight_layout()
fig.savefig(OUT / "pulse_motion.png", dpi=130)
print(f"figure -> {OUT / 'pulse_motion.png'}")
