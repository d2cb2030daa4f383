"""Backward orbit of x -> x - 1/x: totally real numbers of small height.

    python demos/smyth_tree.py
"""
import numpy as np

from trheight.algebra import roots, weil_height
from trheight.equidist import Family, family_polynomial, preimage_tree, smyth_height_sequence

# %% Depth 1 preimages of 1 are the golden ratio and its conjugate.
print("depth 1:", preimage_tree(1).points)

# %% Each level doubles the number of points; all are real.
for k in (2, 3, 4):
    pts = np.sort(preimage_tree(k).points)
    print(f"depth {k}: {len(pts)} points in [{pts[0]:.4f}, {pts[-1]:.4f}]")

# %% The same numbers as roots of an explicit integer polynomial (up to depth 6).
q4 = family_polynomial(Family.smyth_preimages(4, 1))
print(f"\nQ_4 = {q4}")
gap = np.max(np.abs(np.sort(roots(q4).as_complex().real) - np.sort(preimage_tree(4).points)))
print(f"tree vs polynomial roots: max gap {gap:.1e}")
print(f"h(Q_4) = {weil_height(q4).value:.10f}")

# %% Heights along the tree climb towards 0.27328.
seq = smyth_height_sequence(16)
prev = None
for k, h in seq:
    gap = "" if prev is None else f"  gap {h - prev:.2e}"
    print(f"depth {k:2d}: {h:.9f}{gap}")
    prev = h
