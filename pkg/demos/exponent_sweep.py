"""How the bound depends on the exponent p of the test function.

    python demos/exponent_sweep.py [out.csv]
"""
import sys

import numpy as np

from trheight.bounds import optimize_exponent, sweep
from trheight.cli import write_sweep_csv

# %% Coarse scan: the bound rises from p = 2, peaks a little past 3, then falls.
reports = sweep(1.5, 6.0, 0.25)
best = max(reports, key=lambda r: r.bound)
for r in reports:
    bar = "#" * int(max(0.0, r.bound - 0.20) * 1500)
    flag = "  <- grid max" if r is best else ""
    print(f"p = {r.p:4.2f}  bound = {r.bound:.7f}  {bar}{flag}")

# %% Zoom in around the peak.
fine = sweep(3.0, 3.5, 0.05)
print("\nfine grid:", np.round([r.bound for r in fine], 7))

# %% Golden-section search.
p_star, rep = optimize_exponent(2.0, 5.0, tol=1e-5)
print(f"\noptimal exponent p* = {p_star:.5f}, bound = {rep.bound:.8f}")
print(f"gain over p = 3: {rep.bound - reports[6].bound:.2e}")

if len(sys.argv) > 1:
    write_sweep_csv(sys.argv[1], reports)
    print(f"wrote {sys.argv[1]}")
