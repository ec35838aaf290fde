"""The slow field: background solution, decaying solutions, and the
perturbation bounds that control them.

On terrain the uniform water level is replaced by a bounded background
solution u_b; pulses ride on it and their construction only needs u_b(0)
and the slope of the stable direction at the origin.  Both quantities obey
explicit bounds in terms of delta = sup |(f, g)|, which this script
verifies numerically for a family of ridge terrains.
"""

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import pulselab as pl

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

fig, axes = plt.subplots(1, 2, figsize=(11, 4))

print(f"{'beta':>6} {'delta':>8} {'sup dev':>10} {'bound':>10} "
      f"{'Cs0 + 1':>10} {'interval':>24}")
for beta in (0.02, 0.05, 0.08, 0.1):
    t = pl.ln_cosh(beta)
    delta = pl.terrain_delta(t)
    sol = pl.solve_slow_field(t, L=25.0, n=20001)

    # distance of the background from the flat state vs the dichotomy bound
    dev = float(np.max(np.hypot(sol.u_b - 1, sol.p_b)))
    consts = pl.roughness_constants(1.0, 1.0, delta)
    bound = pl.bounded_solution_distance_bound(consts, 1.0)

    # stable-direction slope vs the admissible interval around -1
    si = pl.slope_interval(delta, -1.0)
    print(f"{beta:>6} {delta:>8.4f} {dev:>10.5f} {bound:>10.5f} "
          f"{sol.Cs0 + 1:>10.6f} ({si.C_min:>9.5f}, {si.C_max:>9.5f})")
    assert dev <= bound and si.contains(sol.Cs0 + 1)

    axes[0].plot(sol.x, sol.u_b, label=f"beta={beta}")

t = pl.ln_cosh(0.5)
sol = pl.solve_slow_field(t, L=20.0, n=20001)
axes[1].semilogy(sol.x_plus, np.abs(sol.u_plus), label="decaying (right)")
axes[1].semilogy(sol.x_minus, np.abs(sol.u_minus), label="decaying (left)")
r = np.sqrt(1 + 0.5**2)
axes[1].semilogy(sol.x_plus, np.exp(-r * sol.x_plus) * np.cosh(0.5 * sol.x_plus),
                 "k:", label="closed form")

axes[0].set_title("background solutions, ridge terrains")
axes[0].legend(fontsize=8)
axes[1].set_title("decaying solutions, beta = 0.5")
axes[1].legend(fontsize=8)
fig.tight_layout()
fig.savefig(OUT / "slow_field.png", dpi=130)
print(f"figure -> {OUT / 'slow_field.png'}")
