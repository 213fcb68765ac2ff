# %% [markdown]
# # Same-side entanglement
#
# Both detectors are left movers: one fixed on the final ray (+2), one
# scanned.  The entanglement sits near the initial ray and does not depend on
# the mirror phase.  Scan points whose detector modes fail to commute
# (|[a_1, a_2^dag]| >= 0.05) are skipped.

# %%
import numpy as np

from diamondmirror.bogoliubov import detector_commutator
from diamondmirror.modes import Direction, Frame, WavepacketSpec
from diamondmirror.sweeps import build_config, run_sweep

# %% how independent are the two detectors at the nominal geometry?
for k0 in (8.0, 12.0, 16.0):
    f1 = WavepacketSpec(Frame.MINKOWSKI, Direction.LEFT, k0, 3.2, 2.0)
    f2 = WavepacketSpec(Frame.MINKOWSKI, Direction.LEFT, k0, 3.2, -2.0)
    print(f"k0={k0:g}: |commutator| = {abs(detector_commutator(f1, f2)):.2e}")

# %%
cfg = build_config("eof-map-ll", {"phi": [0, "pi/2"], "omega0_grid": [0.5, 2, 4],
                                  "center_grid": [-4, 0, 9]})
res = run_sweep(cfg)
rows = np.array(res.rows, dtype=float)
print(f"{len(rows)} points, {res.skipped} skipped by the overlap gate")

# %% phase independence, then the best scan positions
a, b = (rows[rows[:, 1] == p] for p in np.unique(rows[:, 1]))
print("max |EoF(phi=0) - EoF(phi=pi/2)| =", np.abs(a[:, 4] - b[:, 4]).max())
for k0 in np.unique(a[:, 0]):
    sel = a[a[:, 0] == k0]
    best = sel[np.argmax(sel[:, 4])]
    print(f"k0={k0:g}: max EoF {best[4]:.3e} at w0={best[2]:.2f}, centre {best[3]:+.1f}")
