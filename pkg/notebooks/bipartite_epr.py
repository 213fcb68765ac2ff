# %% [markdown]
# # Two-mode squeezing between co-centred left and right detectors
#
# Low-frequency detectors (k0 = 0.02) coupled to a broad diamond packet
# (omega0 = 0.01, delta = 0.4).  The EPR variance product drops below one,
# i.e. the output is two-mode squeezed, with an optimum at intermediate
# detector bandwidth.

# %%
import numpy as np

from diamondmirror.sweeps import build_config, run_sweep

cfg = build_config("eof-bipartite", {"center_grid": [-1, 1, 3]})
res = run_sweep(cfg)
rows = np.array(res.rows, dtype=float)

# %%
for c in np.unique(rows[:, 1]):
    sel = rows[rows[:, 1] == c]
    i = np.argmin(sel[:, 3])
    print(f"centre {c:+.1f}: min sqrt(VxVp) = {sel[i, 3]:.4f} at sigma = {sel[i, 0]:.3f}, "
          f"EoF there {sel[i, 2]:.3e}")

# %% the full sigma scan at the centre
for s, _, e, epr in rows[rows[:, 1] == 0.0]:
    print(f"sigma={s:.3f}  EoF={e:.3e}  EPR={epr:.4f}")
