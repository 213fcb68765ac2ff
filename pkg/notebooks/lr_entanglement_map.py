# %% [markdown]
# # Left-right entanglement and the mirror phase
#
# A left-moving detector sits on the final half-ray (centre +2) and a
# right-moving detector is scanned.  Changing the mirror phase phi moves the
# entanglement from one ray to the other.

# %%
import numpy as np

from diamondmirror.sweeps import build_config, run_sweep

cfg = build_config("eof-map-lr", {"phi": [0, "pi/2"], "omega0_grid": [0.5, 2, 4],
                                  "center_grid": [-4, 4, 17]})
res = run_sweep(cfg)
print(f"{len(res.rows)} points, {res.failures} failures")

# %% best scan position for each (phi, omega0)
rows = np.array(res.rows, dtype=float)
for phi in np.unique(rows[:, 1]):
    for w0 in np.unique(rows[:, 2]):
        sel = rows[(rows[:, 1] == phi) & (rows[:, 2] == w0)]
        best = sel[np.argmax(sel[:, 4])]
        print(f"phi={phi:.3f} w0={w0:.2f}: max EoF {best[4]:.3e} at {best[3]:+.1f}, "
              f"log-neg {best[5]:.3e}")

# %% command line equivalent:
#   diamondmirror eof-map-lr --phi 0,pi/2 --omega0-grid 0.5 2 4 --center-grid -4 4 17

# %% figure: EoF maximised over omega0, one curve per phase
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

fig, ax = plt.subplots(figsize=(6, 3.5))
for phi in np.unique(rows[:, 1]):
    sel = rows[rows[:, 1] == phi]
    cs = np.unique(sel[:, 3])
    ax.plot(cs, [sel[sel[:, 3] == c, 4].max() for c in cs], label=f"phi = {phi:.2f}")
ax.set_xlabel("a x centre of the right detector")
ax.set_ylabel("max EoF over omega0")
ax.legend()
fig.tight_layout()
fig.savefig("lr_entanglement_map.png", dpi=120)
