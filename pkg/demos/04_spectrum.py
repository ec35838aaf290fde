"""Stability of a pulse: essential spectrum, the nonlocal response R, the
transmission residual and the complex skeleton.

Large eigenvalues solve 1 + (3 - R(lam))/(u0^2 mu C sqrt(1+m lam)) = 0.
On the lower amplitude branch with small mu this has no roots in the right
half-plane; on the upper branch a root parks next to lam = 5/4 and kills
the pulse.  Complex eigenvalues can only live on the skeleton where the
condition is real.
"""

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import pulselab as pl

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

m = 0.45
mu = 0.01
print("essential spectrum edge (unscaled):", pl.essential_spectrum(m))
print("reduced-operator eigenvalues:", pl.reduced_operator_eigs(40.0, 4000))
print("uniform perturbation budget delta_c =", pl.delta_c_stability())

lams = np.linspace(-0.95, 2.0, 321)
Rv, t22_lo, t22_hi = [], [], []
u0_lo, u0_hi = pl.u0_flat(mu), pl.u0_flat(mu, "plus")
for lv in lams:
    r = pl.eval_R(lv)
    if r.near_pole:
        Rv.append(np.nan), t22_lo.append(np.nan), t22_hi.append(np.nan)
        continue
    Rv.append(r.R.real)
    t22_lo.append(pl.nlep_residual(lv, u0_lo, mu, m).real)
    t22_hi.append(pl.nlep_residual(lv, u0_hi, mu, m).real)

fig, axes = plt.subplots(1, 3, figsize=(14, 4))
axes[0].plot(lams, Rv)
axes[0].axhline(3, ls=":", c="k")
axes[0].set_ylim(-30, 40)
axes[0].set_title("nonlocal response R(lam)")
axes[1].plot(lams, t22_lo, label="lower branch")
axes[1].plot(lams, t22_hi, label="upper branch")
axes[1].axhline(0, ls=":", c="k")
axes[1].set_ylim(-12, 6)
axes[1].set_title("transmission residual")
axes[1].legend(fontsize=8)

pts = pl.skeleton_points(m, n_grid=201)
axes[2].plot(pts[:, 0], pts[:, 1], ".", ms=2)
axes[2].plot([pl.essential_spectrum(m) / m], [0], "kx")
axes[2].set_title("complex skeleton (m = 0.45)")
axes[2].set_xlabel("Re lam")
fig.tight_layout()
fig.savefig(OUT / "spectrum.png", dpi=130)

roots_lo = pl.find_large_eigs(u0_lo, mu, m)
roots_hi = pl.find_large_eigs(u0_hi, mu, m)
print("real-branch roots, lower branch:", roots_lo or "none")
print("real-branch roots, upper branch:", roots_hi, "(near 5/4 -> unstable)")
print(f"figure -> {OUT / 'spectrum.png'}")
