"""Height lower bound from a test function, exponent search, and the
finite-degree equidistribution inequality.

For f_p constant (= 2^-p) on the real line, every totally real alpha has
conjugate average 2^-p, so the equidistribution inequality forces, in the
limit of large degree,

    liminf h(alpha) >= (2^-p - I(p))^2 / E(p),

with I(p) the circle average and E(p) the Dirichlet energy of f_p.
"""

from __future__ import annotations

import functools
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .algebra import IntPolynomial, height_from_roots, roots
from .geometry import LipschitzBracket, TestFunction, eval_test_function, lipschitz_estimate
from .quadrature import QuadratureConfig, circle_integral, dirichlet_energy

__all__ = [
    "BoundReport",
    "FRLTerms",
    "lower_bound",
    "sweep",
    "optimize_exponent",
    "frl_inequality_terms",
]

LIPSCHITZ_DENSITY = 128
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class BoundReport:
    p: float
    main_term: float
    circle_integral: float
    energy: float
    bound: float
    lipschitz_bracket: tuple = (math.nan, math.nan)
    circle_error: float = 0.0
    energy_error: float = 0.0
    bound_error: float = 0.0
    converged: bool = True
    failure: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.failure is None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lipschitz_bracket"] = list(self.lipschitz_bracket)
        return d


@functools.lru_cache(maxsize=256)
def _pieces(p: float, cfg: QuadratureConfig):
    tf = TestFunction(p)
    return circle_integral(tf, cfg), dirichlet_energy(tf, cfg)


@functools.lru_cache(maxsize=64)
def _lipschitz(p: float, density: int) -> LipschitzBracket:
    return lipschitz_estimate(TestFunction(p), density)


def lower_bound(p: float, cfg: Optional[QuadratureConfig] = None,
                lipschitz_density: int = LIPSCHITZ_DENSITY) -> BoundReport:
    """Certificate for ``liminf h >= (2^-p - I(p))^2 / E(p)``.

    The Lipschitz bracket is attached for reference only; its term is divided
    by the degree and drops out of the liminf.

    >>> round(lower_bound(3).bound, 6)
    0.241573
    """
    cfg = cfg or QuadratureConfig()
    p = TestFunction(p).p
    circ, energy = _pieces(p, cfg)
    if not (circ.converged and energy.converged):
        raise ArithmeticError(
            f"quadrature did not converge at p={p} "
            f"(circle err {circ.error_estimate:.2e}, energy err {energy.error_estimate:.2e})"
        )
    main = 2.0 ** (-p) - circ.value
    bound = main * main / energy.value
    bound_err = 2.0 * abs(main) * circ.error_estimate / energy.value + bound * energy.error_estimate / energy.value
    return BoundReport(
        p=p,
        main_term=main,
        circle_integral=circ.value,
        energy=energy.value,
        bound=bound,
        lipschitz_bracket=tuple(_lipschitz(p, lipschitz_density)),
        circle_error=circ.error_estimate,
        energy_error=energy.error_estimate,
        bound_error=bound_err,
    )


def _failed(p: float, exc: Exception) -> BoundReport:
    nan = math.nan
    return BoundReport(p, nan, nan, nan, nan, converged=False, failure=f"{type(exc).__name__}: {exc}")


def sweep_grid(p_lo: float, p_hi: float, step: float) -> np.ndarray:
    """Inclusive grid ``p_lo, p_lo + step, ...`` up to ``p_hi`` (with 1e-9 slack)."""
    if not (1 < p_lo < p_hi):
        raise ValueError("need 1 < p_lo < p_hi")
    if not step > 0:
        raise ValueError("step must be positive")
    n = int(math.floor((p_hi - p_lo) / step + 1e-9)) + 1
    return p_lo + step * np.arange(n)


def sweep(p_lo: float, p_hi: float, step: float,
          cfg: Optional[QuadratureConfig] = None) -> list[BoundReport]:
    """Bound reports on an inclusive exponent grid.

    A point whose quadrature fails is reported with ``failure`` set and NaN
    values; the sweep carries on.
    """
    out = []
    for p in sweep_grid(p_lo, p_hi, step):
        try:
            out.append(lower_bound(float(p), cfg))
        except (ArithmeticError, ValueError) as exc:
            out.append(_failed(float(p), exc))
    return out


def optimize_exponent(p_lo: float, p_hi: float, tol: float = 1e-4,
                      cfg: Optional[QuadratureConfig] = None) -> tuple[float, BoundReport]:
    """Golden-section search for the exponent maximising the bound.

    Unimodality on the bracket is assumed, not checked.  The returned report
    is the best of every exponent probed, endpoints included, so it is never
    worse than either endpoint.
    """
    if not (1 < p_lo < p_hi):
        raise ValueError("need 1 < p_lo < p_hi")
    if not tol > 0:
        raise ValueError("tol must be positive")
    probes: dict[float, BoundReport] = {}

    def value(p):
        if p not in probes:
            probes[p] = lower_bound(p, cfg)
        return probes[p].bound

    a, b = p_lo, p_hi
    value(a)
    value(b)
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = value(c), value(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = value(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = value(d)
    value(0.5 * (a + b))
    p_star = max(probes, key=lambda p: (probes[p].bound, -abs(p - 0.5 * (a + b))))
    return p_star, probes[p_star]


@dataclass(frozen=True)
class FRLTerms:
    """Every term of the finite-degree equidistribution inequality

        |avg_f - I| <= Lip(f)/d + sqrt(h + c log(d)/d) * sqrt(E)

    ``lip_term`` uses the upper end of the Lipschitz bracket.
    """

    degree: int
    height: float
    galois_average: float
    circle_integral: float
    discrepancy_lhs: float
    lip_term: float
    energy_root: float
    c: float
    rhs: float
    holds: bool

    def required_c(self) -> float:
        """Smallest c >= 0 making the inequality hold (0 if it already holds at c = 0)."""
        excess = self.discrepancy_lhs - self.lip_term
        if excess <= 0:
            return 0.0
        need = (excess / self.energy_root) ** 2 - self.height
        if need <= 0:
            return 0.0
        if self.degree < 2:
            return math.inf
        return need * self.degree / math.log(self.degree)


def frl_inequality_terms(poly: IntPolynomial, tf: TestFunction, c: float,
                         cfg: Optional[QuadratureConfig] = None,
                         lipschitz_density: int = LIPSCHITZ_DENSITY) -> FRLTerms:
    if poly.degree < 1:
        raise ValueError("polynomial must have degree >= 1")
    if c < 0:
        raise ValueError("c must be nonnegative")
    cfg = cfg or QuadratureConfig()
    rs = roots(poly, cfg.working_precision)
    avg = float(np.mean(eval_test_function(tf, rs.as_complex())))
    h = height_from_roots(rs).value
    circ, energy = _pieces(tf.p, cfg)
    lip_upper = _lipschitz(tf.p, lipschitz_density).upper
    d = poly.degree
    lhs = abs(avg - circ.value)
    lip_term = lip_upper / d
    energy_root = math.sqrt(energy.value)
    rhs = lip_term + math.sqrt(h + c * math.log(d) / d) * energy_root
    return FRLTerms(
        degree=d,
        height=h,
        galois_average=avg,
        circle_integral=circ.value,
        discrepancy_lhs=lhs,
        lip_term=lip_term,
        energy_root=energy_root,
        c=float(c),
        rhs=rhs,
        holds=lhs <= rhs,
    )
