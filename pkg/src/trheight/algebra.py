"""Integer polynomials, their complex roots, Mahler measure and Weil height.

Roots are computed with the Aberth-Ehrlich simultaneous iteration: a fast
double-precision pass followed by polishing in MPFR (through gmpy2) at the
requested working precision; results are handed back as mpmath numbers.  Every root carries an inclusion radius derived from the
Weierstrass corrections, so downstream quantities (Mahler measure, height)
come with an error estimate.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence

import gmpy2
import mpmath
import numpy as np

__all__ = [
    "IntPolynomial",
    "RootSet",
    "HeightValue",
    "PolynomialSyntaxError",
    "RootFindingError",
    "parse_polynomial",
    "roots",
    "mahler_measure",
    "weil_height",
    "height_from_roots",
    "is_totally_real",
    "cyclotomic",
]

DEFAULT_PRECISION = 128


class PolynomialSyntaxError(ValueError):
    """Raised when polynomial text cannot be parsed.

    ``position`` is the 0-based character offset of the offending token.
    """

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class RootFindingError(RuntimeError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message}; residual achieved {residual:.3e}")
        self.residual = residual


@dataclass(frozen=True)
class IntPolynomial:
    """Univariate polynomial with integer coefficients, ascending order.

    Trailing zero coefficients are stripped on construction, so the zero
    polynomial is ``IntPolynomial(())`` with degree 0.
    """

    coefficients: tuple[int, ...]

    def __post_init__(self):
        coeffs = []
        for c in self.coefficients:
            if isinstance(c, bool) or not isinstance(c, (int, np.integer)):
                raise TypeError(f"coefficient {c!r} is not an integer")
            coeffs.append(int(c))
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coefficients", tuple(coeffs))

    @classmethod
    def from_roots(cls, int_roots: Sequence[int]) -> "IntPolynomial":
        p = cls((1,))
        for r in int_roots:
            p = p * cls((-r, 1))
        return p

    @classmethod
    def monomial(cls, k: int, c: int = 1) -> "IntPolynomial":
        return cls((0,) * k + (c,))

    @property
    def degree(self) -> int:
        return max(len(self.coefficients) - 1, 0)

    @property
    def leading(self) -> int:
        return self.coefficients[-1] if self.coefficients else 0

    @property
    def constant(self) -> int:
        return self.coefficients[0] if self.coefficients else 0

    def is_zero(self) -> bool:
        return not self.coefficients

    def reverse(self) -> "IntPolynomial":
        """Coefficients in reverse order; the roots become their reciprocals."""
        return IntPolynomial(self.coefficients[::-1])

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def __add__(self, other: "IntPolynomial") -> "IntPolynomial":
        a, b = self.coefficients, other.coefficients
        n = max(len(a), len(b))
        return IntPolynomial(
            tuple((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))
        )

    def __neg__(self) -> "IntPolynomial":
        return IntPolynomial(tuple(-c for c in self.coefficients))

    def __sub__(self, other: "IntPolynomial") -> "IntPolynomial":
        return self + (-other)

    def __mul__(self, other) -> "IntPolynomial":
        if isinstance(other, int):
            return IntPolynomial(tuple(c * other for c in self.coefficients))
        a, b = self.coefficients, other.coefficients
        if not a or not b:
            return IntPolynomial(())
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] += ai * bj
        return IntPolynomial(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "IntPolynomial":
        result = IntPolynomial((1,))
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def shift(self, k: int) -> "IntPolynomial":
        """Multiply by x**k."""
        return IntPolynomial((0,) * k + self.coefficients) if self.coefficients else self

    def exact_div(self, other: "IntPolynomial") -> "IntPolynomial":
        """Quotient of an exact division over Z; raises if a remainder is left."""
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        rem = list(self.coefficients)
        db, lb = other.degree, other.leading
        q = [0] * max(len(rem) - db, 0)
        for k in range(len(rem) - 1 - db, -1, -1):
            c, r = divmod(rem[k + db], lb)
            if r:
                raise ValueError("division is not exact over the integers")
            q[k] = c
            if c:
                for j, bj in enumerate(other.coefficients):
                    rem[k + j] -= c * bj
        if any(rem):
            raise ValueError("division is not exact over the integers")
        return IntPolynomial(tuple(q))

    def derivative(self) -> "IntPolynomial":
        return IntPolynomial(tuple(k * c for k, c in enumerate(self.coefficients) if k))

    def __str__(self) -> str:
        if not self.coefficients:
            return "0"
        parts = []
        for k in range(len(self.coefficients) - 1, -1, -1):
            c = self.coefficients[k]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if k == 0:
                body = str(a)
            else:
                mono = "x" if k == 1 else f"x^{k}"
                body = mono if a == 1 else f"{a}*{mono}"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


_NUMBER = re.compile(r"\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?")
_INTEGER = re.compile(r"[+-]?\d+")


def _parse_coefficient_list(text: str) -> IntPolynomial:
    coeffs = []
    pos = 0
    for item in text.split(","):
        token = item.strip()
        offset = pos + (len(item) - len(item.lstrip()))
        if not token:
            raise PolynomialSyntaxError("empty coefficient", offset)
        if not _INTEGER.fullmatch(token):
            if _NUMBER.fullmatch(token.lstrip("+-")):
                raise PolynomialSyntaxError(f"non-integer coefficient {token!r}", offset)
            raise PolynomialSyntaxError(f"malformed coefficient {token!r}", offset)
        coeffs.append(int(token))
        pos += len(item) + 1
    return IntPolynomial(tuple(coeffs))


def _parse_expression(text: str) -> IntPolynomial:
    s = text.replace("−", "-").replace("**", "^")
    n = len(s)
    i = 0
    terms: dict[int, int] = {}

    def skip_ws(j):
        while j < n and s[j].isspace():
            j += 1
        return j

    def read_int(j):
        m = re.compile(r"\d+").match(s, j)
        if not m:
            raise PolynomialSyntaxError("expected an integer", j)
        return int(m.group()), m.end()

    first = True
    i = skip_ws(i)
    if i == n:
        raise PolynomialSyntaxError("empty polynomial", 0)
    while True:
        i = skip_ws(i)
        sign = 1
        if i < n and s[i] in "+-":
            sign = -1 if s[i] == "-" else 1
            i = skip_ws(i + 1)
        elif not first:
            raise PolynomialSyntaxError("expected '+' or '-'", i)
        if i >= n:
            raise PolynomialSyntaxError("dangling sign", i)
        first = False

        coeff = 1
        have_coeff = False
        m = _NUMBER.match(s, i)
        if m:
            if not _INTEGER.fullmatch(m.group()):
                raise PolynomialSyntaxError(f"non-integer coefficient {m.group()!r}", i)
            coeff = int(m.group())
            have_coeff = True
            i = skip_ws(m.end())
            if i < n and s[i] == "*":
                i = skip_ws(i + 1)
                if i >= n or s[i] != "x":
                    raise PolynomialSyntaxError("expected 'x' after '*'", i)
        power = 0
        if i < n and s[i] == "x":
            power = 1
            i = skip_ws(i + 1)
            if i < n and s[i] == "^":
                power, i = read_int(skip_ws(i + 1))
        elif not have_coeff:
            raise PolynomialSyntaxError(f"unexpected character {s[i]!r}", i)
        terms[power] = terms.get(power, 0) + sign * coeff
        i = skip_ws(i)
        if i >= n:
            break
    deg = max(terms)
    return IntPolynomial(tuple(terms.get(k, 0) for k in range(deg + 1)))


def parse_polynomial(text: str) -> IntPolynomial:
    """Parse ``"x^2 - x - 1"`` or an ascending coefficient list ``"-1,-1,1"``.

    >>> parse_polynomial("x^2 - x - 1").coefficients
    (-1, -1, 1)
    >>> parse_polynomial("-1,-1,1").coefficients
    (-1, -1, 1)
    """
    if "," in text:
        return _parse_coefficient_list(text)
    return _parse_expression(text)


@dataclass(frozen=True)
class RootSet:
    """Roots of ``source`` with multiplicity, each with an inclusion radius.

    ``roots`` are mpmath complex numbers sorted by real then imaginary part.
    ``radii[i]`` bounds the distance from ``roots[i]`` to a true root whenever
    the disks are pairwise disjoint.
    """

    roots: tuple
    radii: tuple
    source: IntPolynomial
    precision: int = DEFAULT_PRECISION

    def __len__(self):
        return len(self.roots)

    def as_complex(self) -> np.ndarray:
        return np.array([complex(r) for r in self.roots], dtype=complex)

    @property
    def max_radius(self) -> float:
        return float(max(self.radii)) if self.radii else 0.0

    def all_real(self, tol: float = 1e-20) -> bool:
        return all(abs(z.imag) <= tol * (1 + abs(z)) for z in self.roots)


@dataclass(frozen=True)
class HeightValue:
    value: float
    precision_bits: int
    error: float = 0.0

    def __float__(self):
        return self.value


def _fujiwara_bound(coeffs: Sequence[int]) -> float:
    n = len(coeffs) - 1
    lead = abs(coeffs[-1])
    best = 0.0
    for k in range(1, n + 1):
        c = abs(coeffs[n - k])
        if c == 0:
            continue
        if k == n:
            c = c / 2
        # log-domain ratio keeps huge integer coefficients finite
        val = math.exp((math.log(c) - math.log(lead)) / k)
        best = max(best, val)
    return 2.0 * best


def _initial_points(coeffs: Sequence[int]) -> np.ndarray:
    n = len(coeffs) - 1
    radius = _fujiwara_bound(coeffs) or 1.0
    k = np.arange(n)
    # perturbed circle: an irrational offset breaks real-axis symmetry
    angles = 2 * np.pi * k / n + 0.4
    radii = radius * (1.0 + 0.01 * np.sin(1.7 * k + 0.3))
    return radii * np.exp(1j * angles)


def _aberth_double(coeffs: Sequence[int], z: np.ndarray, max_iter: int = 400) -> np.ndarray:
    try:
        a = np.array([float(c) for c in coeffs[::-1]])
    except OverflowError:
        return z
    if not np.all(np.isfinite(a)):
        return z
    n = len(z)
    da = a[:-1] * np.arange(n, 0, -1)
    absa = np.abs(a)
    eps = np.finfo(float).eps
    with np.errstate(all="ignore"):
        for _ in range(max_iter):
            p = np.polyval(a, z)
            dp = np.polyval(da, z)
            bound = np.polyval(absa, np.abs(z))
            done = np.abs(p) <= 8 * n * eps * bound
            if done.all():
                break
            ratio = p / dp
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            s = inv.sum(axis=1)
            w = ratio / (1.0 - ratio * s)
            w[done] = 0.0
            bad = ~np.isfinite(w)
            if bad.any():
                return z
            z = z - w
            if np.max(np.abs(w) / (1.0 + np.abs(z))) < 1e-15:
                break
    return z


def _horner_mp(coeffs, z):
    p = coeffs[-1]
    dp = 0
    for c in reversed(coeffs[:-1]):
        dp = dp * z + p
        p = p * z + c
    return p, dp


def _to_mpmath(z) -> mpmath.mpc:
    re_ = mpmath.mpf(tuple(int(v) for v in z.real.as_mantissa_exp())) if z.real else mpmath.mpf(0)
    im_ = mpmath.mpf(tuple(int(v) for v in z.imag.as_mantissa_exp())) if z.imag else mpmath.mpf(0)
    return mpmath.mpc(re_, im_)


def _aberth_mp(coeffs_int, z0, wp: int, max_iter: int):
    """Gauss-Seidel Aberth iteration at ``wp`` bits; returns roots and radii.

    Arithmetic runs on gmpy2 (MPFR) numbers; results are mpmath values.
    """
    n = len(z0)
    ctx = gmpy2.context(gmpy2.get_context(), precision=wp)
    with ctx:
        coeffs = [gmpy2.mpfr(c) for c in coeffs_int]
        abs_coeffs = [abs(c) for c in coeffs]
        eps = gmpy2.mpfr(2) ** (-wp)
        z = [gmpy2.mpc(complex(v)) for v in z0]
        frozen = [False] * n
        residual = gmpy2.inf()
        for _ in range(max_iter):
            moved = False
            residual = gmpy2.mpfr(0)
            for i in range(n):
                if frozen[i]:
                    continue
                zi = z[i]
                p, dp = _horner_mp(coeffs, zi)
                r = abs(zi)
                bound = gmpy2.mpfr(0)
                for c in reversed(abs_coeffs):
                    bound = bound * r + c
                tol = 8 * n * eps * bound
                ap = abs(p)
                residual = max(residual, ap / bound if bound else ap)
                if ap <= tol:
                    frozen[i] = True
                    continue
                ratio = p / dp if dp != 0 else gmpy2.mpc(eps, eps)
                s = gmpy2.mpc(0)
                for j in range(n):
                    if j != i and z[j] != zi:
                        s += 1 / (zi - z[j])
                w = ratio / (1 - ratio * s)
                z[i] = zi - w
                if abs(w) <= eps * (1 + abs(z[i])):
                    frozen[i] = True
                moved = True
            if not moved:
                break
        else:
            raise RootFindingError(
                f"Aberth iteration did not converge in {max_iter} sweeps at {wp} bits",
                float(residual),
            )

    with ctx, mpmath.workprec(wp):
        lead = coeffs[-1]
        radii = []
        for i in range(n):
            p, _ = _horner_mp(coeffs, z[i])
            prod = gmpy2.mpc(lead)
            for j in range(n):
                if j != i:
                    prod *= z[i] - z[j]
            if prod == 0:
                radii.append(mpmath.inf)
            else:
                # Braess-Hadeler inclusion: disks of radius n|W_i| hold the roots
                rad = n * abs(p / prod) + 4 * eps * (1 + abs(z[i]))
                radii.append(mpmath.mpf(tuple(int(v) for v in rad.as_mantissa_exp())))
        found = [_to_mpmath(v) for v in z]
    return found, radii


def _isolated(z, radii) -> list[bool]:
    zc = np.array([complex(v) for v in z])
    rc = np.array([float(r) for r in radii])
    dist = np.abs(zc[:, None] - zc[None, :])
    np.fill_diagonal(dist, np.inf)
    return list(np.all(dist > rc[:, None] + rc[None, :], axis=1))


def roots(poly: IntPolynomial, precision: int = DEFAULT_PRECISION, max_iter: int = 500) -> RootSet:
    """All complex roots of ``poly`` with multiplicity.

    The roots are found in double precision, then polished at ``precision``
    bits.  If an isolated root's inclusion radius exceeds
    ``2**(-precision/2)``, the working precision is doubled (at most twice)
    and the polish repeated.

    Raises
    ------
    ValueError
        If ``poly`` has degree 0.
    RootFindingError
        If the iteration does not settle within ``max_iter`` sweeps.
    """
    if poly.degree < 1:
        raise ValueError("root finding needs a polynomial of degree >= 1")
    coeffs = list(poly.coefficients)
    n_zero = 0
    while coeffs[0] == 0:
        coeffs.pop(0)
        n_zero += 1

    found: list = []
    radii: list = []
    if len(coeffs) > 1:
        z0 = _aberth_double(coeffs, _initial_points(coeffs))
        target = mpmath.mpf(2) ** (-precision / 2)
        wp = precision
        for attempt in range(3):
            found, radii = _aberth_mp(coeffs, z0, wp, max_iter)
            iso = _isolated(found, radii)
            if all(r <= target for r, ok in zip(radii, iso) if ok):
                break
            z0 = np.array([complex(v) for v in found])
            wp *= 2
        with mpmath.workprec(wp):
            found = [+v for v in found]
    found.extend([mpmath.mpc(0)] * n_zero)
    radii = list(radii) + [mpmath.mpf(0)] * n_zero
    order = sorted(range(len(found)), key=lambda k: (found[k].real, found[k].imag))
    return RootSet(
        roots=tuple(found[k] for k in order),
        radii=tuple(radii[k] for k in order),
        source=poly,
        precision=precision,
    )


def _mahler_with_error(rs: RootSet) -> tuple:
    with mpmath.workprec(rs.precision + 16):
        m = abs(mpmath.mpf(rs.source.leading))
        log_m = mpmath.log(m)
        err = mpmath.mpf(0)
        for z, r in zip(rs.roots, rs.radii):
            a = abs(z)
            if a > 1:
                m *= a
                log_m += mpmath.log(a)
            if a + r > 1:
                # log max(1, t) is 1-Lipschitz
                err += r
        return m, log_m, err


def mahler_measure(poly: IntPolynomial, precision: int = DEFAULT_PRECISION):
    """|leading coefficient| times the product of max(1, |root|), as an mpf."""
    value, _, _ = _mahler_with_error(roots(poly, precision))
    return value


def weil_height(poly: IntPolynomial, precision: int = DEFAULT_PRECISION) -> HeightValue:
    """Absolute logarithmic Weil height ``log M(poly) / degree``.

    Irreducibility is not checked.  For a reducible input the value is the
    same ``(1/degree) log M`` quantity, i.e. the degree-weighted mean of the
    heights of its factors.

    >>> round(weil_height(parse_polynomial("x^2 - x - 1")).value, 7)
    0.2406059
    """
    if poly.degree < 1:
        raise ValueError("the height needs a polynomial of degree >= 1")
    return height_from_roots(roots(poly, precision))


def height_from_roots(rs: RootSet) -> HeightValue:
    """Weil height of ``rs.source`` from an already computed root set."""
    _, log_m, err = _mahler_with_error(rs)
    d = rs.source.degree
    return HeightValue(value=max(float(log_m) / d, 0.0), precision_bits=rs.precision, error=float(err) / d)


def is_totally_real(poly: IntPolynomial, tol: float = 1e-20, precision: int = DEFAULT_PRECISION) -> bool:
    """True iff every root satisfies ``|Im z| <= tol * (1 + |z|)``.

    Repeated real roots come out of the iteration with imaginary parts of
    order ``2**(-precision/m)`` for multiplicity ``m``; loosen ``tol`` or
    pass square-free input in that case.
    """
    return roots(poly, precision).all_real(tol)


def cyclotomic(n: int) -> IntPolynomial:
    """The n-th cyclotomic polynomial, by exact division of x^n - 1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return _cyclotomic_cached(n)


_CYCLOTOMIC: dict[int, IntPolynomial] = {}


def _cyclotomic_cached(n: int) -> IntPolynomial:
    if n in _CYCLOTOMIC:
        return _CYCLOTOMIC[n]
    p = IntPolynomial((-1,) + (0,) * (n - 1) + (1,))
    for d in range(1, n):
        if n % d == 0:
            p = p.exact_div(_cyclotomic_cached(d))
    _CYCLOTOMIC[n] = p
    return p
