"""Output phasor loci and deamplification along the iso-gain contour.

    jpa distort --config profiles/typical.toml --out out
    jpa deamp-scan --config profiles/typical.toml --out out
    python scripts/plot_distortion.py out
"""

import sys
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

from _load import load

out = Path(sys.argv[1] if len(sys.argv) > 1 else "out")
fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(10, 4.5))

sw = load(out / "distort_sweeps.csv")
for g in np.unique(sw["target_gain_db"]):
    s = sw[sw["target_gain_db"] == g]
    ax0.plot(s["out_i"], s["out_q"], label=f"{g:g} dB")
ax0.set_aspect("equal")
ax0.set_xlabel("I (√photons/s)")
ax0.set_ylabel("Q (√photons/s)")
ax0.legend()

if (out / "deamp_scan.csv").exists():
    d = load(out / "deamp_scan.csv")
    for side in ("below_lmg", "above_lmg"):
        s = d[d["side"] == side]
        ax1.plot(s["f_ratio"], s["deamp_ratio_db"], "o-", ms=3, label=side.replace("_", " "))
    ax1.set_xlabel("$f_p / f_c$")
    ax1.set_ylabel(r"$\sigma^2_{out}/\sigma^2_{in}$ (dB)")
    ax1.legend()

fig.tight_layout()
fig.savefig(out / "distortion.png", dpi=150)
