"""Sweep each design variable around the reference point and report the direction of each response.

    python3 demos/02_trends.py
"""

import numpy as np

from regen_turboshaft import REFERENCE_POINT
from regen_turboshaft.engine import Envelope, trend_study

METRICS = ("P_out", "eta_th", "PSFC", "mdot_NOx")


def arrow(y):
    d = np.diff(y)
    if np.all(d > 0):
        return "rises"
    if np.all(d < 0):
        return "falls"
    return "turns"


print(f"{'variable':<9}" + "".join(f"{m:>11}" for m in METRICS))
for name, (lo, hi) in Envelope().items():
    if lo == hi:
        continue
    _, points = trend_study(name, lo, hi, 9, REFERENCE_POINT)
    if not all(p.feasible for p in points):
        print(f"{name:<9} (contains infeasible points)")
        continue
    cells = [arrow([getattr(p, m) for p in points]) for m in METRICS]
    print(f"{name:<9}" + "".join(f"{c:>11}" for c in cells))

print()
print("Every sweep spans the default envelope and holds the other inputs at the reference point.")
print("Use `regen-turboshaft trends --axis <name> --out file.csv` for plot-ready tables.")
