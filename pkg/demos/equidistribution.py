"""Conjugates of height-zero numbers spread out over the unit circle.

    python demos/equidistribution.py
"""
import math

from trheight.algebra import cyclotomic, parse_polynomial
from trheight.bounds import frl_inequality_terms
from trheight.equidist import empirical_c, galois_average, real_rooted_corpus
from trheight.geometry import TestFunction

f = TestFunction(3)
target = 1 / (6 * math.pi)

# %% Roots of unity: the average of f_3 over the conjugates approaches 1/(6 pi).
print(f"{'n':>4} {'degree':>6} {'average':>12} {'discrepancy':>12} {'Lip/d':>10}")
for n in (8, 16, 32, 64, 128, 256):
    t = frl_inequality_terms(cyclotomic(n), f, 0.0)
    print(f"{n:4d} {t.degree:6d} {t.galois_average:12.9f} {t.discrepancy_lhs:12.3e} {t.lip_term:10.3e}")

# %% Totally real numbers cannot do that: their average is pinned at 1/8.
corpus = real_rooted_corpus(10, seed=1)
print("\ntotally real averages:", sorted({round(galois_average(p, f), 15) for p in corpus}))

# %% How large must the constant c be on a corpus?
pole_heavy = [parse_polynomial("x^2 + 1") ** k for k in (4, 8, 16)]
fit = empirical_c(pole_heavy + [cyclotomic(n) for n in range(4, 65)], f)
print(f"\nempirical c = {fit.value:.4f} (set by member {fit.binding_index})")
