"""Noise calibration data with the fitted model, one curve per fridge temperature.

    jpa noise-fit --config profiles/typical.toml --out out

The profile points at profiles/noise_data.csv, which `jpa synth-noise
--format csv` regenerates.
    python scripts/plot_noise_fit.py out
"""

import sys
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

from _load import load

out = Path(sys.argv[1] if len(sys.argv) > 1 else "out")
r = load(out / "noise_fit_residuals.csv")

fig, (ax0, ax1) = plt.subplots(2, 1, figsize=(6, 6), sharex=True,
                               gridspec_kw={"height_ratios": [3, 1]})
for tf in np.unique(r["T_fridge_K"]):
    s = r[r["T_fridge_K"] == tf]
    line, = ax0.plot(s["T_vts_K"] * 1e3, s["psd_out_quanta"], ".", ms=2)
    ax0.plot(s["T_vts_K"] * 1e3, s["model_quanta"], "-", color=line.get_color(),
             label=f"{tf * 1e3:g} mK")
    ax1.plot(s["T_vts_K"] * 1e3, s["rel_residual"], ".", ms=2, color=line.get_color())
ax0.set_ylabel("output noise (quanta)")
ax0.legend(title="fridge")
ax1.set_xlabel("VTS temperature (mK)")
ax1.set_ylabel("rel. residual")
fig.tight_layout()
fig.savefig(out / "noise_fit.png", dpi=150)
