import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from trheight.acceptance import (
    check_inversion_isometry,
    check_metric_axioms,
    check_symmetries,
    gradient_fd_errors,
    gradient_sample,
)
from trheight.geometry import (
    INFINITY,
    ProjPoint,
    TestFunction,
    chordal_distance,
    circle_restriction,
    eval_test_function,
    gradient,
    lipschitz_estimate,
)

INF = complex(math.inf, 0)
finite = st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False)
exponents = st.floats(1.01, 8.0)


def sphere(z):
    """Stereographic image on the sphere of diameter 1 centred at the origin."""
    if not np.isfinite(z):
        return np.array([0.0, 0.0, 0.5])
    w = 1 + abs(z) ** 2
    return np.array([z.real / w, z.imag / w, 0.5 * (abs(z) ** 2 - 1) / w])


# --- ProjPoint ----------------------------------------------------------------------

def test_projpoint():
    assert INFINITY.is_infinity and complex(INFINITY) == INF
    assert not ProjPoint(2 + 1j).is_infinity
    with pytest.raises(ValueError):
        ProjPoint(complex(math.inf, 0))
    assert chordal_distance(ProjPoint(0), INFINITY) == 1.0


# --- chordal distance ----------------------------------------------------------------

@pytest.mark.parametrize("x", [-3.0, 0.0, 0.7, 12.5, 1e8])
def test_real_to_i(x):
    assert chordal_distance(x, 1j) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    assert chordal_distance(x, -1j) == pytest.approx(1 / math.sqrt(2), abs=1e-15)


def test_distance_examples():
    assert chordal_distance(0, INF) == 1.0
    assert chordal_distance(INF, INF) == 0.0
    assert chordal_distance(1 + 1j, 1 - 1j) == pytest.approx(2 / 3, abs=1e-15)


@given(finite, st.one_of(finite, st.just(INF)))
def test_distance_is_chord_on_unit_diameter_sphere(a, b):
    # independent oracle: Euclidean distance between stereographic images
    oracle = float(np.linalg.norm(sphere(a) - sphere(b)))
    assert chordal_distance(a, b) == pytest.approx(oracle, abs=1e-12)


def test_distance_vectorised_and_huge():
    z = np.array([0, 1e200, INF, 1j])
    d = chordal_distance(z, INF)
    assert d.shape == (4,)
    assert d[0] == 1.0 and d[1] == pytest.approx(0, abs=1e-190) and d[2] == 0.0
    assert chordal_distance(1e200, -1e200) == pytest.approx(0, abs=1e-190)


def test_metric_axioms_suite():
    ok, detail = check_metric_axioms(10_000, np.random.default_rng(1))
    assert ok, detail


def test_inversion_isometry_suite():
    ok, detail = check_inversion_isometry(10_000, np.random.default_rng(2))
    assert ok, detail


@given(finite.filter(lambda z: z != 0), finite.filter(lambda z: z != 0))
def test_rotation_and_inversion_isometry(a, b):
    d = chordal_distance(a, b)
    assert chordal_distance(1 / a, 1 / b) == pytest.approx(d, abs=1e-12)
    u = np.exp(0.37j)
    assert chordal_distance(u * a, u * b) == pytest.approx(d, abs=1e-12)


# --- test functions -------------------------------------------------------------------

def test_exponent_domain():
    for bad in (1.0, 0.5, -2, float("nan")):
        with pytest.raises(ValueError, match="exceed 1"):
            TestFunction(bad)
    assert TestFunction(3).sup == 0.125


def test_eval_examples():
    f3 = TestFunction(3)
    assert eval_test_function(f3, 0.7) == 0.125
    assert eval_test_function(f3, 1j) == 0.0
    assert eval_test_function(f3, -1j) == 0.0
    assert eval_test_function(f3, np.exp(1j * np.pi / 4)) == pytest.approx((math.sqrt(2) / 2) ** 3 / 8, abs=1e-15)
    assert eval_test_function(f3, INFINITY) == 0.125
    assert f3(INF) == 0.125


@given(exponents, finite)
def test_eval_matches_chordal_product(p, z):
    tf = TestFunction(p)
    oracle = (chordal_distance(z, 1j) * chordal_distance(z, -1j)) ** p
    assert eval_test_function(tf, z) == pytest.approx(oracle, abs=1e-13)


def test_symmetries_and_range_suite():
    ok, detail = check_symmetries(10_000, np.random.default_rng(3))
    assert ok, detail


@given(exponents, st.floats(-1e12, 1e12))
def test_real_line_is_exact_sup(p, x):
    tf = TestFunction(p)
    assert eval_test_function(tf, x) == tf.sup


def test_circle_restriction_examples():
    assert circle_restriction(TestFunction(3), 0.0) == 0.125
    assert circle_restriction(TestFunction(3), np.pi / 2) == pytest.approx(0, abs=1e-48)
    assert circle_restriction(TestFunction(2), np.pi / 3) == pytest.approx(1 / 16, abs=1e-16)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0, 3.3, 4.0])
def test_circle_restriction_matches_direct(p):
    tf = TestFunction(p)
    theta = np.random.default_rng(4).uniform(0, 2 * np.pi, 1000)
    direct = eval_test_function(tf, np.exp(1j * theta))
    assert np.max(np.abs(direct - circle_restriction(tf, theta))) <= 1e-14


# --- gradient ----------------------------------------------------------------------------

def test_gradient_examples():
    tf = TestFunction(3)
    assert gradient(tf, 0j) == (0.0, 0.0)
    assert gradient(tf, 1j) == (0.0, 0.0)
    assert gradient(tf, -1j) == (0.0, 0.0)


def test_gradient_finite_difference_point():
    err = gradient_fd_errors(TestFunction(3), np.array([0.5 + 0.25j]))
    assert err[0] <= 1e-8


@pytest.mark.parametrize("p", [2.0, 3.0, 3.3, 4.0])
def test_gradient_finite_difference_suite(p):
    z = gradient_sample(1000, np.random.default_rng(5))
    assert np.max(gradient_fd_errors(TestFunction(p), z)) <= 1e-7


def test_gradient_vanishes_on_real_axis():
    fx, fy = gradient(TestFunction(3.3), np.linspace(-5, 5, 101).astype(complex))
    assert np.all(fx == 0) and np.all(np.abs(fy) < 1e-15)


def test_gradient_continuous_at_pole():
    tf = TestFunction(1.5)
    for eps in (1e-2, 1e-4, 1e-6):
        fx, fy = gradient(tf, 1j + eps)
        assert math.hypot(fx, fy) < 2 * math.sqrt(eps)


# --- Lipschitz bracket -------------------------------------------------------------------

def test_lipschitz_ordering_and_hand_quotient():
    br = lipschitz_estimate(TestFunction(3), 256)
    assert br.lower <= br.upper
    assert br.lower >= 0.125 / (1 / math.sqrt(2)) - 1e-12  # pair (0, i)
    assert br.upper / br.lower <= math.pi / 2 + 0.1


def test_lipschitz_bracket_stable_under_refinement():
    coarse = lipschitz_estimate(TestFunction(3), 128)
    fine = lipschitz_estimate(TestFunction(3), 512)
    assert fine.lower >= coarse.lower - 1e-3
    assert abs(fine.upper - coarse.upper) < 1e-3 * coarse.upper


def test_lipschitz_lower_is_a_real_quotient():
    # brute force over random pairs can never beat the grid upper estimate
    tf = TestFunction(3)
    br = lipschitz_estimate(tf, 256)
    rng = np.random.default_rng(6)
    a = np.exp(rng.uniform(-3, 3, 50_000)) * np.exp(1j * rng.uniform(0, 2 * np.pi, 50_000))
    b = a * (1 + 0.01 * (rng.normal(size=a.size) + 1j * rng.normal(size=a.size)))
    q = np.abs(tf(a) - tf(b)) / chordal_distance(a, b)
    assert np.max(q) <= br.upper


@given(exponents)
def test_lipschitz_ordering_property(p):
    br = lipschitz_estimate(TestFunction(p), 16)
    assert 0 < br.lower <= br.upper


def test_lipschitz_density_check():
    with pytest.raises(ValueError):
        lipschitz_estimate(TestFunction(3), 4)
