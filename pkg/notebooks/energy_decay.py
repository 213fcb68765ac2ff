# %% [markdown]
# # Detected energy at high and low detector frequency
#
# Energy k0 * N collected by a left mover on the final ray, for two diamond
# packet bandwidths.  A slope below -1 on the log-log plot means the total
# energy over all k0 converges.

# %%
import numpy as np

from diamondmirror.sweeps import build_config, run_sweep

res = run_sweep(build_config("energy-decay", {"method": "fast"}))
for key, slope in res.summary.items():
    print(f"{key}: {slope:+.3f}")

# %% the raw curves
rows = np.array(res.rows, dtype=float)
for d in np.unique(rows[:, 0]):
    sel = rows[rows[:, 0] == d]
    print(f"delta={d:g}: " + " ".join(f"{e:.2e}" for e in sel[:, 2]))

# %% toward k0 -> 0 the exact path is needed (the detector is not narrowband)
low = run_sweep(build_config("energy-decay", {"k0_grid": {"min": 0.01, "max": 0.1, "n": 6, "log": True},
                                              "method": "kg"}))
for d, k0, e in low.rows:
    print(f"delta={d:g} k0={k0:.4f} energy={e:.3e}")

# %% figure
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

fig, ax = plt.subplots(figsize=(5, 3.5))
for d in np.unique(rows[:, 0]):
    sel = rows[rows[:, 0] == d]
    ax.loglog(sel[:, 1], sel[:, 2], "o-", label=f"delta/a = {d:g}")
ax.set_xlabel("k0 / a")
ax.set_ylabel("k0 N")
ax.legend()
fig.tight_layout()
fig.savefig("energy_decay.png", dpi=120)
