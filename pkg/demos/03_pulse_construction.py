"""Building a stationary pulse: amplitudes, existence conditions, profile.

A pulse has a narrow vegetation spike of amplitude 3/(2 u0) riding on a
water dip down to mu*u0, where u0 solves the matching condition between the
fast jump and the slow field.  Two amplitude branches exist below
mu = 1/12; the lower branch is the physically stable one.
"""

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import pulselab as pl

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

params = pl.ModelParams(a=0.5, m=0.45, D=0.01)
scales = pl.derive_scales(params)

# amplitude branches over mu for flat ground
mus = np.linspace(1e-3, 1 / 12 - 1e-9, 300)
lo = [pl.u0_flat(m, "minus") for m in mus]
hi = [pl.u0_flat(m, "plus") for m in mus]

fig, axes = plt.subplots(1, 3, figsize=(14, 4))
axes[0].plot(mus, lo, label="lower branch")
axes[0].plot(mus, hi, label="upper branch")
axes[0].axvline(1 / 12, ls=":", c="k")
axes[0].set_xlabel("mu")
axes[0].set_title("pulse amplitudes u0 (flat)")
axes[0].set_yscale("log")
axes[0].legend()

for name, t in (("flat", pl.flat()), ("ridge beta=1", pl.ln_cosh(1.0))):
    rep = pl.existence_check(t, params)
    print(f"{name}: u_b(0) = {rep.u_b0:.6f}, Cs0 = {rep.Cs0:.6f}, "
          f"mu = {rep.mu:.5f} -> exists: {rep.exists}, "
          f"u0 = {rep.amplitudes.u0_minus:.5f} / {rep.amplitudes.u0_plus:.2f}")

profile = pl.assemble_profile(pl.ln_cosh(1.0), params)
x, U, V = profile.physical_fields(params)
axes[1].plot(x, V, "r")
axes[1].set_title("vegetation spike V(x)")
axes[1].set_xlim(-0.6, 0.6)
axes[2].plot(profile.x_slow, params.a * scales.mu * profile.u_slow, "b",
             label="water around the pulse")
axes[2].plot(profile.x_slow, params.a * (1 + (profile.u_slow * 0)), "k:",
             lw=0.8, label="flat reference")
axes[2].set_title("water level U(x)")
axes[2].legend(fontsize=8)
fig.tight_layout()
fig.savefig(OUT / "pulse_profile.png", dpi=130)
print(f"figure -> {OUT / 'pulse_profile.png'}")
