"""Gain map with the LMG overlaid.

    jpa gain-map --config profiles/typical.toml --out out
    jpa lmg --config profiles/typical.toml --out out
    python scripts/plot_gain_map.py out
"""

import sys
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

from _load import load

out = Path(sys.argv[1] if len(sys.argv) > 1 else "out")
m = load(out / "gainmap.csv")
f = np.unique(m["f_ratio"])
p = np.unique(m["p_db"])
g = m["gain_db"].astype(float).reshape(len(f), len(p))

fig, ax = plt.subplots(figsize=(6, 4.5))
mesh = ax.pcolormesh(p, f, np.clip(g, 0, 30), shading="auto", cmap="viridis")
fig.colorbar(mesh, label="direct gain (dB)")
if (out / "lmg.csv").exists():
    lmg = load(out / "lmg.csv")
    ax.plot(lmg["p_db"], lmg["f_ratio"], "w--", lw=1, label="LMG")
    ax.legend(loc="lower right")
ax.set_xlabel("pump power re $P_c$ (dB)")
ax.set_ylabel("$f_p / f_c$")
fig.tight_layout()
fig.savefig(out / "gain_map.png", dpi=150)
