"""Test corpora of algebraic numbers, conjugate averages, and the backward
orbit of Smyth's map H(x) = x - 1/x.

H has real Julia set; its depth-k preimages of a preperiodic seed are totally
real and have canonical height zero, and their equal-mass averages of
log+|x| converge to the integral of log+|x| against the canonical measure of
H (about 0.27328).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .algebra import IntPolynomial, cyclotomic, roots
from .geometry import TestFunction, eval_test_function
from .quadrature import QuadratureConfig

__all__ = [
    "Family",
    "PreimageTree",
    "galois_average",
    "family_polynomial",
    "preimage_tree",
    "az_pairing_estimate",
    "smyth_height_sequence",
    "empirical_c",
    "EmpiricalC",
    "real_rooted_corpus",
    "totally_real_family_corpus",
    "smyth_map",
    "DEPTH_CAP",
]

DEPTH_CAP = 16
SMYTH_LIMIT = 0.27328

Rational = Union[int, Fraction]


def smyth_map(x):
    """H(x) = x - 1/x."""
    return x - 1 / x


def _is_preperiodic_seed(seed: Fraction, max_steps: int = 64, max_height: int = 10**6) -> bool:
    # a preperiodic orbit has bounded height, while H roughly squares the
    # numerator and denominator of every other rational, so stop early once
    # they grow
    seen = set()
    x: Optional[Fraction] = seed
    for _ in range(max_steps):
        if x is None or x in seen:
            return True
        if max(abs(x.numerator), x.denominator) > max_height:
            return False
        seen.add(x)
        x = None if x == 0 else x - 1 / x
    return False


@dataclass(frozen=True)
class Family:
    """A parametrised family of algebraic numbers.

    Build with :meth:`roots_of_unity`, :meth:`radical` or
    :meth:`smyth_preimages`.
    """

    kind: str
    n: int = 1
    base: int = 2
    depth: int = 0
    seed: Fraction = Fraction(1)

    def __post_init__(self):
        if self.kind not in ("roots_of_unity", "radical", "smyth_preimages"):
            raise ValueError(f"unknown family kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.base < 2:
            raise ValueError("base must be >= 2")
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        seed = Fraction(self.seed)
        object.__setattr__(self, "seed", seed)
        if self.kind == "smyth_preimages" and not _is_preperiodic_seed(seed):
            raise ValueError(f"seed {seed} is not preperiodic for x - 1/x")

    @classmethod
    def roots_of_unity(cls, n: int) -> "Family":
        return cls("roots_of_unity", n=n)

    @classmethod
    def radical(cls, base: int, n: int) -> "Family":
        return cls("radical", n=n, base=base)

    @classmethod
    def smyth_preimages(cls, depth: int, seed: Rational = 1) -> "Family":
        return cls("smyth_preimages", depth=depth, seed=Fraction(seed))


def _smyth_polynomial(depth: int, seed: Fraction) -> IntPolynomial:
    # Q_{k+1}(x) = x^D Q_k((x^2 - 1)/x) = sum_j a_j (x^2 - 1)^j x^(D - j)
    q = IntPolynomial((-seed.numerator, seed.denominator))
    x2m1 = IntPolynomial((-1, 0, 1))
    for _ in range(depth):
        deg = q.degree
        acc = IntPolynomial(())
        power = IntPolynomial((1,))
        for j, a in enumerate(q.coefficients):
            if a:
                acc = acc + (power * a).shift(deg - j)
            power = power * x2m1
        q = acc
    return q


def family_polynomial(fam: Family) -> IntPolynomial:
    """Integer polynomial whose roots are the family's numbers.

    ``smyth_preimages(k, s)`` gives Q_k with Q_0 = (denominator) x - (numerator)
    of s and Q_{k+1}(x) = x^deg(Q_k) Q_k((x^2 - 1)/x); its roots are the
    k-fold preimages of s under H.
    """
    if fam.kind == "roots_of_unity":
        return cyclotomic(fam.n)
    if fam.kind == "radical":
        return IntPolynomial((-fam.base,) + (0,) * (fam.n - 1) + (1,))
    return _smyth_polynomial(fam.depth, fam.seed)


@dataclass(frozen=True)
class PreimageTree:
    depth: int
    seed: Fraction
    points: np.ndarray = field(repr=False)

    def forward(self, steps: Optional[int] = None) -> np.ndarray:
        """Apply H ``steps`` times (default: depth) to every point."""
        x = self.points.copy()
        for _ in range(self.depth if steps is None else steps):
            x = smyth_map(x)
        return x


def _preimages(y: np.ndarray) -> np.ndarray:
    # roots of x^2 - y x - 1; take the large-magnitude root without
    # cancellation and recover the other from the product -1
    s = np.where(y >= 0, 1.0, -1.0)
    big = 0.5 * (y + s * np.sqrt(y * y + 4.0))
    return np.concatenate([big, -1.0 / big])


def preimage_tree(depth: int, seed: Rational = 1, cap: int = DEPTH_CAP) -> PreimageTree:
    """The 2**depth real solutions of H^depth(x) = seed."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if depth > cap:
        raise ValueError(f"depth {depth} exceeds the cap {cap}")
    seed = Fraction(seed)
    if not _is_preperiodic_seed(seed):
        raise ValueError(f"seed {seed} is not preperiodic for x - 1/x")
    pts = np.array([float(seed)])
    for _ in range(depth):
        pts = _preimages(pts)
    return PreimageTree(depth, seed, pts)


def _mean_log_plus(points: np.ndarray) -> float:
    return math.fsum(np.log(np.maximum(np.abs(points), 1.0)).tolist()) / len(points)


def az_pairing_estimate(depth: int, cap: int = DEPTH_CAP) -> float:
    """Equal-mass average of log+|x| over the depth-k preimages of 1.

    Converges to the Arakelov-Zhang pairing of H with z^2 (about 0.27328).
    """
    return _mean_log_plus(preimage_tree(depth, 1, cap).points)


def smyth_height_sequence(max_depth: int, seed: Rational = 1,
                          cap: int = DEPTH_CAP) -> list[tuple[int, float]]:
    """``(depth, height)`` for depth 0..max_depth.

    Q_depth is monic with constant term +-1, so the height is exactly the
    equal-mass log+ average over the tree.
    """
    if max_depth > cap:
        raise ValueError(f"depth {max_depth} exceeds the cap {cap}")
    return [(k, _mean_log_plus(preimage_tree(k, seed, cap).points)) for k in range(max_depth + 1)]


def galois_average(poly: IntPolynomial, tf: TestFunction, precision: int = 128) -> float:
    """Mean of f_p over the roots of ``poly``, with multiplicity.

    >>> galois_average(IntPolynomial((-1, -1, 1)), TestFunction(3))
    0.125
    """
    if poly.degree < 1:
        raise ValueError("polynomial must have degree >= 1")
    vals = np.asarray(eval_test_function(tf, roots(poly, precision).as_complex()))
    return math.fsum(vals.tolist()) / len(vals)


@dataclass(frozen=True)
class EmpiricalC:
    """Fitted constant and the per-member requirements behind it.

    ``per_member[k]`` is 0 where the Lipschitz term alone already covers the
    discrepancy.  The fit uses the upper Lipschitz estimate, so ``value`` is a
    lower estimate of any admissible constant.
    """

    value: float
    per_member: tuple
    binding_index: int

    def __float__(self):
        return self.value


def empirical_c(corpus: Sequence[IntPolynomial], tf: TestFunction,
                cfg: Optional[QuadratureConfig] = None) -> EmpiricalC:
    """Smallest c >= 0 for which the equidistribution inequality holds on every member."""
    from .bounds import frl_inequality_terms

    if not corpus:
        raise ValueError("corpus must be nonempty")
    if any(p.degree < 2 for p in corpus):
        raise ValueError("every corpus member needs degree >= 2")
    needs = tuple(frl_inequality_terms(p, tf, 0.0, cfg).required_c() for p in corpus)
    k = int(np.argmax(needs))
    return EmpiricalC(float(needs[k]), needs, k)


def real_rooted_corpus(count: int = 50, seed: int = 0, max_factors: int = 4) -> list[IntPolynomial]:
    """Random square-free integer polynomials whose roots are all real.

    Each member is a product of distinct factors, either linear ``b x - a`` or
    irreducible quadratics ``x^2 + a x + b`` with positive non-square
    discriminant.
    """
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        factors: set = set()
        for _ in range(int(rng.integers(1, max_factors + 1))):
            if rng.random() < 0.5:
                a, b = int(rng.integers(-9, 10)), int(rng.integers(1, 5))
                g = math.gcd(a, b)
                factors.add((-a // g, b // g))
            else:
                a, b = int(rng.integers(-9, 10)), int(rng.integers(-9, 10))
                disc = a * a - 4 * b
                if disc > 0 and math.isqrt(disc) ** 2 != disc:
                    factors.add((b, a, 1))
        if not factors:
            continue
        poly = IntPolynomial((1,))
        for f in sorted(factors):
            poly = poly * IntPolynomial(f)
        out.append(poly)
    return out


def totally_real_family_corpus(max_base: int = 30, max_depth: int = 6) -> list[IntPolynomial]:
    """Family members that are totally real and not just roots 0, +-1.

    Candidates are radicals x^n - b (n <= 3), Smyth preimage polynomials for
    the preperiodic seeds 1, -1 and 0, and cyclotomic polynomials up to 30;
    only those with an all-real root set survive the filter.
    """
    fams = [Family.radical(b, n) for b in range(2, max_base + 1) for n in (1, 2, 3)]
    fams += [Family.smyth_preimages(k, s) for s in (1, -1, 0) for k in range(0, max_depth + 1)]
    fams += [Family.roots_of_unity(n) for n in range(1, 31)]
    out = []
    for fam in fams:
        poly = family_polynomial(fam)
        if poly.degree < 1:
            continue
        rs = roots(poly)
        if not rs.all_real():
            continue
        if all(abs(z) < 1e-30 or abs(abs(z) - 1) < 1e-30 for z in rs.roots):
            continue
        out.append(poly)
    return out
