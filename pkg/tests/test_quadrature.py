import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from trheight.geometry import TestFunction, circle_restriction, eval_test_function, gradient
from trheight.quadrature import (
    GAUSS_WEIGHTS,
    KRONROD_WEIGHTS,
    NODES,
    QuadratureConfig,
    circle_integral,
    circle_integral_closed_form,
    dirichlet_energy,
    dirichlet_form,
    dirichlet_pairing,
    gauss_kronrod,
    haar_circle_average,
)


def grad_sq_oracle(p, z):
    """|grad f_p|^2 written out independently from the library.

    f = g^p with g = |h| / (2w), h = z^2 + 1, w = 1 + |z|^2.  For analytic h
    the gradient of |h|, read as a complex number, is conj(h') h / |h|.
    """
    h = z * z + 1
    w = 1 + np.abs(z) ** 2
    ah = np.abs(h)
    grad_abs_h = np.conj(2 * z) * h / ah
    grad_g = grad_abs_h / (2 * w) - ah * (2 * z) / (2 * w * w)
    g = ah / (2 * w)
    return (p * g ** (p - 1)) ** 2 * np.abs(grad_g) ** 2


def energy_oracle_scipy(p):
    # full disk in polar coordinates, doubled for |z| > 1, normalised by 1/(2 pi)
    val, err = integrate.dblquad(
        lambda r, t: grad_sq_oracle(p, r * np.exp(1j * t)) * r,
        0, 2 * np.pi, 0, 1, epsabs=1e-13, epsrel=1e-11,
    )
    return 2 * val / (2 * np.pi)


# --- configuration ----------------------------------------------------------------

@pytest.mark.parametrize("kwargs", [dict(abs_tol=0), dict(rel_tol=-1), dict(max_subdivisions=3),
                                    dict(working_precision=32)])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        QuadratureConfig(**kwargs)


# --- Gauss-Kronrod rule ------------------------------------------------------------

def test_rule_structure():
    assert NODES.shape == KRONROD_WEIGHTS.shape == GAUSS_WEIGHTS.shape == (15,)
    assert KRONROD_WEIGHTS.sum() == pytest.approx(2, abs=1e-15)
    assert GAUSS_WEIGHTS.sum() == pytest.approx(2, abs=1e-15)
    gl_nodes, gl_weights = np.polynomial.legendre.leggauss(7)
    assert np.allclose(NODES[1::2], gl_nodes, atol=1e-15)
    assert np.allclose(GAUSS_WEIGHTS[1::2], gl_weights, atol=1e-15)


def _moment(k):
    return 0.0 if k % 2 else 2.0 / (k + 1)


@pytest.mark.parametrize("k", range(0, 23))
def test_kronrod_exact_to_degree_22(k):
    assert abs(KRONROD_WEIGHTS @ NODES ** k - _moment(k)) < 1e-15


@pytest.mark.parametrize("k", range(0, 14))
def test_gauss_exact_to_degree_13(k):
    assert abs(GAUSS_WEIGHTS @ NODES ** k - _moment(k)) < 1e-15


@pytest.mark.parametrize("weights, k", [(GAUSS_WEIGHTS, 14), (KRONROD_WEIGHTS, 24)])
def test_exactness_stops(weights, k):
    assert abs(weights @ NODES ** k - _moment(k)) > 1e-10


def test_gauss_kronrod_smooth():
    res = gauss_kronrod(np.exp, 0, 1)
    assert res.converged and res.value == pytest.approx(math.e - 1, abs=1e-14)


def test_gauss_kronrod_adapts_to_singularity():
    res = gauss_kronrod(np.sqrt, 0, 1, QuadratureConfig(abs_tol=1e-12, rel_tol=1e-12))
    assert res.converged and res.subdivisions_used > 5
    assert res.value == pytest.approx(2 / 3, abs=1e-11)


def test_gauss_kronrod_budget_exhausted():
    res = gauss_kronrod(lambda x: np.abs(x - 0.3) ** 0.1, 0, 1,
                        QuadratureConfig(abs_tol=1e-15, rel_tol=1e-15, max_subdivisions=4))
    assert not res.converged
    assert res.subdivisions_used == 4


@given(st.floats(-5, 5), st.floats(0.01, 5))
def test_gauss_kronrod_vs_scipy(a, width):
    f = lambda x: np.sin(3 * x) * np.exp(-0.2 * x * x)
    ref = integrate.quad(f, a, a + width, epsabs=1e-13, epsrel=1e-12)[0]
    res = gauss_kronrod(f, a, a + width)
    assert res.converged
    assert abs(res.value - ref) <= max(1e-12, 1e-9 * abs(ref))


# --- circle integrals -----------------------------------------------------------------

def test_circle_integral_p3():
    res = circle_integral(TestFunction(3))
    assert res.converged
    assert abs(res.value - 1 / (6 * math.pi)) <= 1e-9


def test_circle_integral_p2():
    assert circle_integral(TestFunction(2)).value == pytest.approx(1 / 8, abs=1e-12)


def test_haar_probability_measure():
    res = haar_circle_average(lambda t: np.ones_like(t))
    assert res.value == pytest.approx(1.0, abs=1e-15)
    res = haar_circle_average(lambda t: np.ones_like(t), symmetric=True)
    assert res.value == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("p", np.linspace(1.1, 6.0, 20))
def test_gamma_form(p):
    assert abs(circle_integral(TestFunction(p)).value - circle_integral_closed_form(p)) <= 1e-9


@pytest.mark.parametrize("p", [1.3, 2.5, 3.0, 4.7])
def test_symmetric_and_full_period_agree(p):
    tf = TestFunction(p)
    full = haar_circle_average(lambda t: circle_restriction(tf, t))
    # direct evaluation on e^{it}, no closed form involved
    direct = haar_circle_average(lambda t: eval_test_function(tf, np.exp(1j * t)))
    sym = circle_integral(tf)
    assert full.value == pytest.approx(sym.value, abs=1e-10)
    assert direct.value == pytest.approx(sym.value, abs=1e-10)


def test_closed_form_against_scipy():
    for p in (1.5, 3.0, 5.5):
        ref = integrate.quad(lambda t: abs(math.cos(t)) ** p, 0, 2 * math.pi, limit=200)[0] / (2 * math.pi) / 2 ** p
        assert circle_integral_closed_form(p) == pytest.approx(ref, rel=1e-10)


# --- Dirichlet energy ---------------------------------------------------------------------

def test_energy_p3():
    res = dirichlet_energy(TestFunction(3))
    assert res.converged
    assert abs(res.value - 3 / 140) <= 1e-6
    assert res.value == pytest.approx(3 / 140, abs=1e-11)


def test_energy_p2_exact():
    assert dirichlet_energy(TestFunction(2)).value == pytest.approx(1 / 15, abs=1e-11)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0, 3.3, 4.5])
def test_energy_against_scipy_dblquad(p):
    assert dirichlet_energy(TestFunction(p)).value == pytest.approx(energy_oracle_scipy(p), rel=1e-8)


def test_energy_p2_monte_carlo():
    # plain Monte Carlo over the unit disk, doubled; mean of |grad f|^2 is the answer
    rng = np.random.default_rng(2024)
    n = 10_000_000
    r = np.sqrt(rng.random(n))
    z = r * np.exp(2j * np.pi * rng.random(n))
    samples = grad_sq_oracle(2.0, z)
    est = samples.mean()
    se = samples.std(ddof=1) / math.sqrt(n)
    value = dirichlet_energy(TestFunction(2)).value
    assert abs(value - est) <= 3 * se, (value, est, se)


def test_energy_zero_for_constant():
    zero = lambda z: (np.zeros(np.shape(z)), np.zeros(np.shape(z)))
    res = dirichlet_form(zero, zero)
    assert res.value == 0.0 and res.converged


def test_energy_error_non_increasing_with_budget():
    cfg = dict(abs_tol=1e-16, rel_tol=1e-16)
    errs = [dirichlet_energy(TestFunction(1.7), QuadratureConfig(max_subdivisions=m, **cfg)).error_estimate
            for m in (4, 8, 16, 32)]
    assert all(b <= a for a, b in zip(errs, errs[1:])), errs


def test_converged_implies_error_within_target():
    cfg = QuadratureConfig(abs_tol=1e-10, rel_tol=1e-8)
    for p in (1.2, 2.0, 3.0, 6.0):
        res = dirichlet_energy(TestFunction(p), cfg)
        assert res.converged and res.error_estimate <= cfg.target(res.value)


def test_energy_deterministic():
    a = dirichlet_energy(TestFunction(3.3))
    b = dirichlet_energy(TestFunction(3.3))
    assert a == b


# --- pairing --------------------------------------------------------------------------------

def test_pairing_diagonal():
    f = TestFunction(3)
    assert dirichlet_pairing(f, f).value == dirichlet_energy(f).value


def test_pairing_symmetric_and_cauchy_schwarz():
    f2, f3 = TestFunction(2), TestFunction(3)
    a = dirichlet_pairing(f2, f3).value
    b = dirichlet_pairing(f3, f2).value
    assert abs(a - b) <= 1e-10
    assert abs(a) <= math.sqrt(dirichlet_energy(f2).value * dirichlet_energy(f3).value)


def test_pairing_bilinear_in_scalars():
    f2, f3 = TestFunction(2), TestFunction(3)
    g2 = lambda z: gradient(f2, z)
    g3 = lambda z: gradient(f3, z)
    base = dirichlet_form(g2, g3).value
    for a in (-2.5, 0.5, 3.0):
        scaled = lambda z, a=a: tuple(a * c for c in gradient(f2, z))
        assert dirichlet_form(scaled, g3).value == pytest.approx(a * base, abs=1e-10)


def test_pairing_against_scipy():
    def integrand(r, t):
        z = r * np.exp(1j * t)
        ax, ay = gradient(TestFunction(2), z)
        bx, by = gradient(TestFunction(4), z)
        return (ax * bx + ay * by) * r
    ref = 2 * integrate.dblquad(integrand, 0, 2 * np.pi, 0, 1, epsabs=1e-13, epsrel=1e-11)[0] / (2 * np.pi)
    assert dirichlet_pairing(TestFunction(2), TestFunction(4)).value == pytest.approx(ref, rel=1e-8)
