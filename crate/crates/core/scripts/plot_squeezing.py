"""S(theta) for one operating point and min S along the scan.

    jpa squeeze --config profiles/typical.toml --out out
    jpa squeeze-scan --config profiles/typical.toml --out out
    python scripts/plot_squeezing.py out
"""

import sys
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

from _load import load

out = Path(sys.argv[1] if len(sys.argv) > 1 else "out")
fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(10, 4))

s = load(out / "squeeze_theta.csv")
ax0.errorbar(s["theta"] / np.pi, s["s_db"], yerr=s["stderr_db"], fmt=".-")
ax0.axhline(0, color="k", lw=0.5)
ax0.set_xlabel(r"AMP phase $\theta/\pi$")
ax0.set_ylabel("S (dB)")

if (out / "squeeze_scan.csv").exists():
    sc = load(out / "squeeze_scan.csv")
    ax1.errorbar(sc["p_db"], sc["min_s_db"], yerr=sc["stderr_db"], fmt="o-")
    for x, y, side in zip(sc["p_db"], sc["min_s_db"], sc["side"]):
        if side == "on_lmg":
            ax1.annotate("LMG", (x, y), textcoords="offset points", xytext=(4, 4))
    ax1.set_xlabel("pump power re $P_c$ (dB)")
    ax1.set_ylabel("min S (dB)")

fig.tight_layout()
fig.savefig(out / "squeezing.png", dpi=150)
