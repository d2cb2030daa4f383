"""Walk through the height lower bound for totally real numbers, piece by piece.

    python demos/certificate.py
"""
import math

from trheight.algebra import parse_polynomial, weil_height
from trheight.bounds import frl_inequality_terms, lower_bound
from trheight.geometry import TestFunction, eval_test_function, lipschitz_estimate
from trheight.quadrature import circle_integral, circle_integral_closed_form, dirichlet_energy

# %% The test function: product of chordal distances to the poles +-i, cubed.
f = TestFunction(3)
for z in (0.7, -12.0, 1j, complex(math.cos(math.pi / 4), math.sin(math.pi / 4))):
    print(f"f_3({z}) = {eval_test_function(f, z):.10f}")
# Constant 1/8 on the real line, so every totally real number averages to 1/8.

# %% Its average over the unit circle and its Dirichlet energy.
circ = circle_integral(f)
energy = dirichlet_energy(f)
print(f"circle integral  {circ.value:.15f}  (1/(6 pi) = {1 / (6 * math.pi):.15f}, Gamma form {circle_integral_closed_form(3):.15f})")
print(f"Dirichlet energy {energy.value:.15f}  (3/140 = {3 / 140:.15f}), error estimate {energy.error_estimate:.1e}")

# %% The bound: (1/8 - I)^2 / E.
rep = lower_bound(3)
print(f"liminf h >= {rep.bound:.10f}  +/- {rep.bound_error:.1e}")
print(f"Schinzel's golden-ratio height: {weil_height(parse_polynomial('x^2 - x - 1')).value:.10f}")

# %% The finite-degree inequality for a concrete totally real number.
terms = frl_inequality_terms(parse_polynomial("x^2 - x - 1"), f, c=1.0)
print(f"|avg - I| = {terms.discrepancy_lhs:.7f}, Lip/d = {terms.lip_term:.5f}, "
      f"sqrt(h + c log d / d) sqrt(E) = {terms.rhs - terms.lip_term:.5f}, holds: {terms.holds}")
lo, hi = lipschitz_estimate(f, 256)
print(f"Lipschitz constant bracket [{lo:.5f}, {hi:.5f}]")
