import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from trheight.algebra import IntPolynomial, parse_polynomial
from trheight.bounds import (
    frl_inequality_terms,
    lower_bound,
    optimize_exponent,
    sweep,
    sweep_grid,
)
from trheight.equidist import real_rooted_corpus
from trheight.geometry import TestFunction
from trheight.quadrature import QuadratureConfig, circle_integral_closed_form, dirichlet_energy

F3 = TestFunction(3)
GAP3 = 1 / 8 - 1 / (6 * math.pi)


# --- single-exponent certificate -----------------------------------------------------

def test_bound_p3_closed_form():
    rep = lower_bound(3)
    assert rep.bound == pytest.approx(140 / 3 * GAP3 ** 2, abs=1e-10)
    assert abs(rep.bound - 0.241573) < 1e-6
    assert rep.circle_integral == pytest.approx(1 / (6 * math.pi), abs=1e-12)
    assert rep.energy == pytest.approx(3 / 140, abs=1e-11)
    assert rep.ok and rep.converged


def test_bound_p33():
    assert abs(lower_bound(3.3).bound - 0.241713) < 1e-6


def test_bound_p2():
    rep = lower_bound(2)
    assert rep.main_term == pytest.approx(1 / 8, abs=1e-12)
    assert rep.bound == pytest.approx((1 / 64) / dirichlet_energy(TestFunction(2)).value, rel=1e-12)
    assert rep.bound == pytest.approx(15 / 64, abs=1e-9)


def test_bound_rejects_bad_exponent():
    with pytest.raises(ValueError):
        lower_bound(1.0)


def test_bound_raises_when_quadrature_fails():
    cfg = QuadratureConfig(abs_tol=1e-300, rel_tol=1e-300, max_subdivisions=4)
    with pytest.raises(ArithmeticError):
        lower_bound(3.0, cfg)


@given(st.floats(1.05, 8.0))
def test_bound_formula_consistency(p):
    rep = lower_bound(p)
    assert abs(rep.bound * rep.energy - rep.main_term ** 2) <= 1e-12 * rep.bound * rep.energy
    assert rep.main_term > 0
    assert rep.circle_integral == pytest.approx(circle_integral_closed_form(p), abs=1e-9)
    assert rep.lipschitz_bracket[0] <= rep.lipschitz_bracket[1]


@pytest.mark.parametrize("p", [2.0, 3.0, 3.3, 4.0])
def test_tighter_tolerance_moves_bound_less_than_error(p):
    coarse = lower_bound(p)
    fine = lower_bound(p, QuadratureConfig(abs_tol=5e-13, rel_tol=5e-10))
    assert abs(fine.bound - coarse.bound) <= coarse.bound_error


def test_report_to_dict():
    d = lower_bound(3).to_dict()
    assert set(d) >= {"p", "main_term", "circle_integral", "energy", "bound", "lipschitz_bracket"}
    assert isinstance(d["lipschitz_bracket"], list)


# --- sweeps ---------------------------------------------------------------------------

def test_sweep_interior_maximum():
    reps = sweep(2.0, 5.0, 0.5)
    assert [r.p for r in reps] == [2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0]
    k = int(np.argmax([r.bound for r in reps]))
    assert 0 < k < len(reps) - 1


def test_sweep_tiny_step_starts_at_lower_bound():
    eps = 1e-6
    reps = sweep(3.0, 3.0 + eps, eps)
    # the grid is inclusive, so both ends appear
    assert len(reps) == 2
    assert reps[0].bound == lower_bound(3.0).bound


def test_sweep_flat_near_optimum():
    reps = sweep(3.2, 3.4, 0.05)
    assert len(reps) == 5
    assert all(0.2415 <= r.bound <= 0.2418 for r in reps)


def test_sweep_grid_inclusive_and_validated():
    assert len(sweep_grid(2, 5, 0.25)) == 13
    for args in [(3, 2, 0.1), (1.0, 2, 0.1), (2, 3, 0), (2, 3, -0.5)]:
        with pytest.raises(ValueError):
            sweep_grid(*args)


def test_sweep_marks_failures_and_continues():
    cfg = QuadratureConfig(abs_tol=1e-300, rel_tol=1e-300, max_subdivisions=4)
    reps = sweep(2.0, 3.0, 0.5, cfg)
    assert len(reps) == 3
    assert all(not r.ok and math.isnan(r.bound) for r in reps)


# --- exponent search ----------------------------------------------------------------------

def test_optimize_wide_bracket():
    p_star, rep = optimize_exponent(2, 5, 1e-4)
    assert rep.bound >= 0.241713
    assert 3.0 <= p_star <= 3.8
    assert rep.p == p_star


def test_optimize_narrow_bracket():
    _, rep = optimize_exponent(2.9, 3.1, 1e-4)
    assert rep.bound >= 0.241573


def test_optimize_degenerate_bracket():
    tol = 1e-4
    p_star, rep = optimize_exponent(3.0, 3.0 + 2 * tol, tol)
    assert 3.0 <= p_star <= 3.0 + 2 * tol
    assert rep.bound == lower_bound(p_star).bound


def test_optimize_beats_every_grid_point():
    _, rep = optimize_exponent(2.0, 5.0, 1e-4)
    grid = sweep(2.0, 5.0, 0.05)
    assert rep.bound >= max(r.bound for r in grid)


def test_optimize_validation():
    with pytest.raises(ValueError):
        optimize_exponent(5, 2)
    with pytest.raises(ValueError):
        optimize_exponent(2, 5, 0)


# --- finite-degree inequality ----------------------------------------------------------------

def test_frl_golden():
    t = frl_inequality_terms(parse_polynomial("x^2 - x - 1"), F3, 1.0)
    assert t.discrepancy_lhs == pytest.approx(GAP3, abs=1e-12)
    assert abs(t.discrepancy_lhs - 0.0719484) < 1e-7
    assert t.galois_average == 0.125
    assert t.degree == 2 and t.height == pytest.approx(0.5 * math.log((1 + math.sqrt(5)) / 2), abs=1e-15)


def test_frl_x4_plus_1():
    t = frl_inequality_terms(parse_polynomial("x^4 + 1"), F3, 0.5)
    hand = abs((math.sqrt(2) / 2) ** 3 / 8 - 1 / (6 * math.pi))
    assert t.discrepancy_lhs == pytest.approx(hand, abs=1e-12)
    assert abs(t.discrepancy_lhs - 0.0088574) < 1e-7  # the quoted value is truncated
    assert t.height == 0.0


def test_frl_degree_one():
    t = frl_inequality_terms(parse_polynomial("x - 1"), F3, 0.0)
    assert t.degree == 1 and t.height == 0.0
    assert t.discrepancy_lhs == pytest.approx(GAP3, abs=1e-12)
    # Lip/d with d = 1 already exceeds the discrepancy of a single rational point
    assert t.lip_term >= t.discrepancy_lhs
    assert t.holds and t.required_c() == 0.0


def test_frl_rhs_grows_with_c():
    poly = parse_polynomial("x^4 + 1")
    rhs = [frl_inequality_terms(poly, F3, c).rhs for c in (0.0, 0.1, 1.0, 10.0)]
    assert rhs == sorted(rhs) and rhs[0] < rhs[-1]


def test_frl_required_c_makes_it_hold():
    # (x^2 + 1)^8: all mass on the poles, height 0, and Lip/16 below the discrepancy
    poly = parse_polynomial("x^2 + 1") ** 8
    t0 = frl_inequality_terms(poly, F3, 0.0)
    c = t0.required_c()
    assert c > 0 and not t0.holds
    assert frl_inequality_terms(poly, F3, c * (1 + 1e-9)).holds


def test_frl_validation():
    with pytest.raises(ValueError):
        frl_inequality_terms(parse_polynomial("x^2 + 1"), F3, -1.0)
    with pytest.raises(ValueError):
        frl_inequality_terms(IntPolynomial((5,)), F3, 1.0)


@pytest.mark.parametrize("poly", real_rooted_corpus(20, seed=3))
def test_frl_totally_real_average(poly):
    t = frl_inequality_terms(poly, F3, 1.0)
    assert abs(t.galois_average - 0.125) <= 1e-10
    for name in ("degree", "height", "discrepancy_lhs", "lip_term", "energy_root", "c", "rhs"):
        assert getattr(t, name) >= 0
