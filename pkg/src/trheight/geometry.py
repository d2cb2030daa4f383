"""Chordal geometry of the Riemann sphere and the test functions f_p.

f_p(z) = d(z, i)^p * d(z, -i)^p, where d is the chordal metric normalised to
take values in [0, 1].  Since d(z, i) d(z, -i) = |z^2 + 1| / (2 (1 + |z|^2)),
f_p is identically 2^-p on the extended real line and vanishes at +-i.

Functions here accept scalars or numpy arrays of complex numbers.  In array
form a non-finite entry stands for the point at infinity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

import numpy as np

__all__ = [
    "ProjPoint",
    "TestFunction",
    "LipschitzBracket",
    "chordal_distance",
    "eval_test_function",
    "gradient",
    "circle_restriction",
    "lipschitz_estimate",
]


@dataclass(frozen=True)
class ProjPoint:
    """A point of P^1(C): a finite complex ``value``, or infinity when ``None``."""

    value: Optional[complex] = None

    def __post_init__(self):
        if self.value is not None:
            v = complex(self.value)
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise ValueError("finite ProjPoint needs a finite value; use ProjPoint.infinity()")
            object.__setattr__(self, "value", v)

    @classmethod
    def infinity(cls) -> "ProjPoint":
        return cls(None)

    @property
    def is_infinity(self) -> bool:
        return self.value is None

    def __complex__(self) -> complex:
        return complex(math.inf, 0.0) if self.value is None else self.value


INFINITY = ProjPoint.infinity()

PointLike = Union[ProjPoint, complex, float, np.ndarray]


def _as_array(z: PointLike) -> np.ndarray:
    if isinstance(z, ProjPoint):
        return np.asarray(complex(z))
    return np.asarray(z, dtype=complex)


def _unwrap(out: np.ndarray):
    return float(out) if out.ndim == 0 else out


def chordal_distance(a: PointLike, b: PointLike):
    """Chordal distance ``|a - b| / (sqrt(1 + |a|^2) sqrt(1 + |b|^2))``.

    With ``b`` at infinity this is ``1 / sqrt(1 + |a|^2)``, and
    ``d(inf, inf) = 0``.

    >>> round(chordal_distance(1 + 1j, 1 - 1j), 12)
    0.666666666667
    """
    za, zb = np.broadcast_arrays(_as_array(a), _as_array(b))
    inf_a = ~np.isfinite(za)
    inf_b = ~np.isfinite(zb)
    fa = np.where(inf_a, 0, za)
    fb = np.where(inf_b, 0, zb)
    # hypot avoids overflow of 1 + |z|^2 for huge |z|
    na = np.hypot(1.0, np.abs(fa))
    nb = np.hypot(1.0, np.abs(fb))
    with np.errstate(invalid="ignore", over="ignore"):
        finite = np.abs(fa - fb) / na / nb
        # |a - b| overflows only when one side is huge; fall back to unit vectors
        bad = ~np.isfinite(finite)
        if bad.any():
            finite = np.where(bad, np.abs(fa / na / nb - fb / na / nb), finite)
    out = np.where(inf_a & inf_b, 0.0, np.where(inf_a, 1.0 / nb, np.where(inf_b, 1.0 / na, finite)))
    return _unwrap(np.minimum(out, 1.0))


@dataclass(frozen=True)
class TestFunction:
    """Member f_p of the test-function family, poles fixed at +-i.

    ``p > 1`` is enforced: that is exactly when d(., i)^p is C^1 at i.
    """

    __test__ = False  # keep pytest from collecting this class

    p: float

    def __post_init__(self):
        p = float(self.p)
        if not p > 1:
            raise ValueError(f"exponent must exceed 1, got {self.p}")
        object.__setattr__(self, "p", p)

    @property
    def sup(self) -> float:
        """Maximum value 2^-p, attained on the extended real line."""
        return 0.5 ** self.p

    def __call__(self, z: PointLike):
        return eval_test_function(self, z)


_I = 1j


def _pole_product(z: np.ndarray) -> np.ndarray:
    """d(z, i) d(z, -i) = |z^2 + 1| / (2 (1 + |z|^2)), infinity mapped to 1/2."""
    inf = ~np.isfinite(z)
    z = np.where(inf, 0, z)
    # z -> 1/z is an isometry fixing {i, -i}; use it only where squaring overflows
    huge = np.abs(z) > 1e100
    with np.errstate(divide="ignore"):
        z = np.where(huge, 1.0 / np.where(huge, z, 1), z)
    x, y = z.real, z.imag
    # on the real line numerator and denominator are the same float, so the
    # value is exactly 1/2 there
    m = np.hypot(x * x - y * y + 1.0, 2.0 * x * y)
    return np.where(inf, 0.5, m / (2.0 * (1.0 + x * x + y * y)))


def eval_test_function(tf: TestFunction, z: PointLike):
    """``d(z, i)^p * d(z, -i)^p``; equals ``2^-p`` at infinity."""
    m = _pole_product(_as_array(z))
    # numpy's vectorised pow may round 0.5**p differently from the scalar one
    return _unwrap(np.where(m == 0.5, tf.sup, m ** tf.p))


def _modulus_gradient(x, y):
    """|z^2 + 1| and its partial derivatives in x and y."""
    a = x * x - y * y + 1.0
    b = 2.0 * x * y
    m = np.hypot(a, b)
    with np.errstate(invalid="ignore", divide="ignore"):
        mx = 2.0 * (x * a + y * b) / m
        my = 2.0 * (x * b - y * a) / m
    return m, mx, my


def gradient(tf: TestFunction, z):
    """Analytic partial derivatives ``(df/dx, df/dy)`` of f_p at finite ``z``.

    At the poles +-i the gradient is (0, 0), its limit for p > 1.
    """
    zz = np.asarray(z, dtype=complex)
    x, y = zz.real, zz.imag
    m, mx, my = _modulus_gradient(x, y)
    w = 1.0 + x * x + y * y
    g = m / (2.0 * w)
    with np.errstate(invalid="ignore", divide="ignore"):
        gx = (mx * w - 2.0 * x * m) / (2.0 * w * w)
        gy = (my * w - 2.0 * y * m) / (2.0 * w * w)
        scale = tf.p * g ** (tf.p - 1.0)
        fx = np.where(m > 0, scale * gx, 0.0)
        fy = np.where(m > 0, scale * gy, 0.0)
    if zz.ndim == 0:
        return float(fx), float(fy)
    return fx, fy


def circle_restriction(tf: TestFunction, theta):
    """Closed form ``f_p(e^{i theta}) = |cos theta|^p / 2^p``."""
    t = np.asarray(theta, dtype=float)
    return _unwrap(np.abs(np.cos(t)) ** tf.p * 2.0 ** (-tf.p))


class LipschitzBracket(NamedTuple):
    lower: float
    upper: float


def _disk_grid(n: int) -> np.ndarray:
    r = np.arange(n + 1) / n
    t = 2 * np.pi * np.arange(n) / n
    return r[:, None] * np.exp(1j * t)[None, :]


def lipschitz_estimate(tf: TestFunction, grid_density: int = 128) -> LipschitzBracket:
    """Bracket the chordal Lipschitz constant of f_p.

    f_p is invariant under z -> 1/z, an isometry of the chordal metric, so a
    polar grid on the closed unit disk sees every value and every local
    slope.

    ``lower`` is the largest difference quotient over adjacent grid pairs and
    over pairs formed with the anchors 0, 1, +-i and infinity.  ``upper`` is
    pi/2 times the largest spherical gradient ``(1 + |z|^2) |grad f|`` on the
    grid: on a sphere of diameter 1, arc length is at most pi/2 times chord
    length.  ``upper`` is a sampled supremum, not an enclosure.
    """
    if grid_density < 8:
        raise ValueError("grid_density must be at least 8")
    grid = _disk_grid(grid_density)
    vals = np.asarray(eval_test_function(tf, grid))

    quotients = []
    for axis in (0, 1):
        shifted = np.roll(grid, -1, axis=axis)
        fshift = np.roll(vals, -1, axis=axis)
        if axis == 0:
            shifted, fshift, g0, f0 = shifted[:-1], fshift[:-1], grid[:-1], vals[:-1]
        else:
            g0, f0 = grid, vals
        dist = np.asarray(chordal_distance(g0, shifted))
        ok = dist > 0
        quotients.append(np.max(np.abs(f0 - fshift)[ok] / dist[ok]))

    flat = grid.ravel()
    fflat = vals.ravel()
    for anchor in (0.0, 1.0, 1j, -1j, complex(math.inf, 0)):
        dist = np.asarray(chordal_distance(flat, anchor))
        fa = eval_test_function(tf, anchor)
        ok = dist > 0
        quotients.append(np.max(np.abs(fflat - fa)[ok] / dist[ok]))
    lower = float(max(quotients))

    fx, fy = gradient(tf, flat)
    spherical = (1.0 + np.abs(flat) ** 2) * np.hypot(fx, fy)
    upper = float(0.5 * np.pi * np.max(spherical))
    return LipschitzBracket(lower, max(upper, lower))
