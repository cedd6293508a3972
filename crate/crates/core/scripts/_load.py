"""Reader for the tool's CSV files (first line is a '# config_sha256=' comment)."""

import numpy as np


def load(path):
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return np.genfromtxt(lines, delimiter=",", names=True, dtype=None,
                         encoding="utf-8", missing_values="", filling_values=np.nan)
