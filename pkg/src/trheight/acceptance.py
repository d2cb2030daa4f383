"""Acceptance criteria for the certificate, runnable from tests or ``trheight verify``.

Each check returns a :class:`Outcome`; tolerances and runtime limits are
fixed here and never relaxed at run time.  ``quick=True`` only shrinks the
random sample sizes of the invariant suite.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass
from typing import Callable

import mpmath
import numpy as np

from .algebra import IntPolynomial, cyclotomic, parse_polynomial, weil_height
from .bounds import lower_bound
from .equidist import (
    az_pairing_estimate,
    galois_average,
    real_rooted_corpus,
    smyth_height_sequence,
    totally_real_family_corpus,
)
from .geometry import (
    TestFunction,
    chordal_distance,
    circle_restriction,
    eval_test_function,
    gradient,
)
from .quadrature import (
    QuadratureConfig,
    circle_integral,
    circle_integral_closed_form,
    dirichlet_energy,
    dirichlet_pairing,
)

SCHINZEL = 0.2406059
P3_BOUND = 0.241573
P33_BOUND = 0.241713
SMYTH_LIMIT = 0.27328
GOLDEN_HEIGHT = 0.5 * math.log((1 + math.sqrt(5)) / 2)


@dataclass
class Outcome:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float

    def to_dict(self) -> dict:
        return asdict(self)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number}: {self.name} -- {self.detail} ({self.seconds:.2f} s)"


def _run(number: int, name: str, limit: float, check: Callable[[], tuple[bool, str]]) -> Outcome:
    t0 = time.perf_counter()
    try:
        ok, detail = check()
    except Exception as exc:  # a crash is a failed criterion, reported like one
        ok, detail = False, f"raised {type(exc).__name__}: {exc}"
    dt = time.perf_counter() - t0
    if dt >= limit:
        ok = False
        detail += f"; runtime {dt:.2f} s exceeds {limit} s"
    return Outcome(number, name, ok, detail, dt)


def criterion_1() -> Outcome:
    from .cli import cmd_height

    def check():
        h = cmd_height("x^2 - x - 1").results["height"]
        return abs(h - SCHINZEL) <= 1e-6, f"height {h:.10f} vs {SCHINZEL}"
    return _run(1, "Schinzel constant", 0.1, check)


def criterion_2() -> Outcome:
    def check():
        cfg = QuadratureConfig()
        v = circle_integral(TestFunction(3), cfg).value
        target = 1 / (6 * math.pi)
        worst = 0.0
        for p in np.linspace(1.1, 6.0, 20):
            got = circle_integral(TestFunction(p), cfg).value
            worst = max(worst, abs(got - circle_integral_closed_form(p)))
        ok = abs(v - target) <= 1e-9 and worst <= 1e-9
        return ok, f"I(3) - 1/(6pi) = {v - target:.2e}; worst Gamma-form gap {worst:.2e}"
    return _run(2, "Circle integral", 1.0, check)


def criterion_3() -> Outcome:
    def check():
        e = dirichlet_energy(TestFunction(3), QuadratureConfig()).value
        return abs(e - 3 / 140) <= 1e-6, f"E(3) = {e:.12f}, 3/140 = {3 / 140:.12f}"
    return _run(3, "Dirichlet energy", 30.0, check)


def criterion_4() -> Outcome:
    from .cli import cmd_bound

    def check():
        b = cmd_bound(3.0).results["bound"]
        return abs(b - P3_BOUND) <= 1e-5, f"bound(3) = {b:.8f}"
    return _run(4, "Bound at p = 3", 30.0, check)


def criterion_5() -> Outcome:
    from .cli import cmd_bound, cmd_optimize

    def check():
        b = cmd_bound(3.3).results["bound"]
        opt = cmd_optimize(2.0, 5.0).results
        ok = abs(b - P33_BOUND) <= 1e-5 and opt["bound"] >= P33_BOUND - 1e-5
        return ok, f"bound(3.3) = {b:.8f}; optimum {opt['bound']:.8f} at p = {opt['p_star']:.5f}"
    return _run(5, "Exponent optimization", 300.0, check)


def criterion_6() -> Outcome:
    def check():
        seq = [v for _, v in smyth_height_sequence(14)]
        gaps = [abs(seq[k] - seq[k - 1]) for k in range(1, len(seq))]
        shrinking = all(gaps[k] < gaps[k - 1] for k in range(1, len(gaps)))
        est = az_pairing_estimate(14)
        d1 = az_pairing_estimate(1)
        ok = abs(est - SMYTH_LIMIT) <= 0.01 and shrinking and abs(d1 - GOLDEN_HEIGHT) <= 1e-9
        return ok, (f"depth 14 estimate {est:.6f}; gaps shrinking: {shrinking}; "
                    f"depth 1 - log(phi)/2 = {d1 - GOLDEN_HEIGHT:.1e}")
    return _run(6, "Smyth limit", 10.0, check)


def criterion_7() -> Outcome:
    def check():
        tf = TestFunction(3)
        corpus = real_rooted_corpus(50, seed=7)
        worst = max(abs(galois_average(p, tf) - 0.125) for p in corpus)
        return worst <= 1e-10, f"{len(corpus)} polynomials, worst |avg - 1/8| = {worst:.2e}"
    return _run(7, "Totally real stasis", 5.0, check)


def criterion_8() -> Outcome:
    def check():
        tf = TestFunction(3)
        target = 1 / (6 * math.pi)
        disc = [abs(galois_average(cyclotomic(n), tf) - target) for n in (8, 16, 32, 64, 128)]
        decreasing = all(disc[k] < disc[k - 1] for k in range(1, len(disc)))
        ok = decreasing and disc[-1] < 0.01
        return ok, "discrepancies " + ", ".join(f"{d:.2e}" for d in disc)
    return _run(8, "Equidistribution trend", 5.0, check)


# --- criterion 9: invariant suites --------------------------------------------

def _random_points(rng, n, infinity_fraction=0.05):
    mod = np.exp(rng.uniform(-4, 4, n))
    z = mod * np.exp(1j * rng.uniform(0, 2 * np.pi, n))
    z[rng.random(n) < infinity_fraction] = complex(math.inf, 0)
    return z


def check_metric_axioms(n: int, rng) -> tuple[bool, str]:
    a, b, c = (_random_points(rng, n) for _ in range(3))
    dab, dba = chordal_distance(a, b), chordal_distance(b, a)
    dbc, dac = chordal_distance(b, c), chordal_distance(a, c)
    daa = chordal_distance(a, a)
    ok = (
        np.allclose(dab, dba, rtol=0, atol=1e-15)
        and np.all((dab >= 0) & (dab <= 1))
        and np.all(daa == 0)
        and np.all(dab[a != b] > 0)
        and np.all(dac <= dab + dbc + 1e-12)
    )
    return bool(ok), "metric axioms"


def check_inversion_isometry(n: int, rng) -> tuple[bool, str]:
    a = _random_points(rng, n, 0.0)
    b = _random_points(rng, n, 0.0)
    gap = np.max(np.abs(chordal_distance(1 / a, 1 / b) - chordal_distance(a, b)))
    return bool(gap <= 1e-12), f"inversion gap {gap:.1e}"


def check_symmetries(n: int, rng) -> tuple[bool, str]:
    z = _random_points(rng, n, 0.0)
    worst = 0.0
    real_sup_exact = True
    in_range = True
    for p in (2.0, 3.0, 3.3, 4.0):
        tf = TestFunction(p)
        f = eval_test_function(tf, z)
        for w in (np.conj(z), -z, 1 / z):
            worst = max(worst, float(np.max(np.abs(eval_test_function(tf, w) - f))))
        in_range &= bool(np.all((f >= 0) & (f <= tf.sup)))
        line = np.concatenate([np.linspace(-50, 50, 1001), rng.normal(0, 10, 1000)])
        real_sup_exact &= float(np.max(eval_test_function(tf, line))) == tf.sup
    ok = worst <= 1e-12 and in_range and real_sup_exact
    return ok, f"symmetry gap {worst:.1e}, range ok {in_range}, real sup exact {real_sup_exact}"


def _f_mp(p, x, y):
    z = mpmath.mpc(x, y)
    return (abs(z * z + 1) / (2 * (1 + abs(z) ** 2))) ** p


def gradient_fd_errors(tf: TestFunction, z: np.ndarray, h: float = 1e-6) -> np.ndarray:
    """Relative gap between the analytic gradient and central differences.

    The difference quotients are evaluated at 50 digits, so the comparison
    sees only the O(h^2) truncation error and not the eps/h rounding noise
    that swamps tiny gradients near the real axis in double precision.
    """
    fx, fy = gradient(tf, z)
    out = np.empty(len(z))
    with mpmath.workdps(50):
        p = mpmath.mpf(tf.p)
        hh = mpmath.mpf(h)
        for k, w in enumerate(z):
            x, y = mpmath.mpf(w.real), mpmath.mpf(w.imag)
            dx = (_f_mp(p, x + hh, y) - _f_mp(p, x - hh, y)) / (2 * hh)
            dy = (_f_mp(p, x, y + hh) - _f_mp(p, x, y - hh)) / (2 * hh)
            out[k] = float(mpmath.hypot(fx[k] - dx, fy[k] - dy) / mpmath.hypot(fx[k], fy[k]))
    return out


def gradient_sample(n: int, rng) -> np.ndarray:
    """Random points in |x|, |y| <= 2 outside the 0.05-disks around +-i."""
    pts = []
    while len(pts) < n:
        z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        if abs(z - 1j) > 0.05 and abs(z + 1j) > 0.05:
            pts.append(z)
    return np.array(pts)


def check_gradient(n: int, rng) -> tuple[bool, str]:
    z = gradient_sample(n, rng)
    worst = max(float(np.max(gradient_fd_errors(TestFunction(p), z))) for p in (2.0, 3.0, 3.3))
    return worst <= 1e-7, f"gradient vs finite differences {worst:.1e}"


def check_cauchy_schwarz() -> tuple[bool, str]:
    ps = (1.5, 2.0, 3.0, 3.3, 4.0)
    energy = {p: dirichlet_energy(TestFunction(p)).value for p in ps}
    worst_ratio = 0.0
    sym = 0.0
    for i, p in enumerate(ps):
        for q in ps[i + 1:]:
            pq = dirichlet_pairing(TestFunction(p), TestFunction(q)).value
            qp = dirichlet_pairing(TestFunction(q), TestFunction(p)).value
            sym = max(sym, abs(pq - qp))
            worst_ratio = max(worst_ratio, abs(pq) / math.sqrt(energy[p] * energy[q]))
    return worst_ratio <= 1.0 and sym <= 1e-10, f"max |<f,g>|/sqrt(E_f E_g) = {worst_ratio:.6f}"


def random_integer_polynomials(n: int, rng, max_degree: int = 8) -> list[IntPolynomial]:
    out = []
    while len(out) < n:
        deg = int(rng.integers(1, max_degree + 1))
        coeffs = [int(c) for c in rng.integers(-9, 10, deg + 1)]
        if coeffs[0] == 0 or coeffs[-1] == 0:
            continue
        out.append(IntPolynomial(tuple(coeffs)))
    return out


def check_height_reversal(n: int, rng) -> tuple[bool, str]:
    worst = 0.0
    for poly in random_integer_polynomials(n, rng):
        worst = max(worst, abs(weil_height(poly).value - weil_height(poly.reverse()).value))
    return worst <= 1e-10, f"reversal gap {worst:.1e}"


def criterion_9(quick: bool = False) -> Outcome:
    def check():
        rng = np.random.default_rng(2024)
        n_pts = 1000 if quick else 10_000
        n_grad = 200 if quick else 1000
        n_poly = 20 if quick else 100
        parts = [
            check_metric_axioms(n_pts, rng),
            check_inversion_isometry(n_pts, rng),
            check_symmetries(n_pts, rng),
            check_gradient(n_grad, rng),
            check_cauchy_schwarz(),
            check_height_reversal(n_poly, rng),
        ]
        return all(ok for ok, _ in parts), "; ".join(("" if ok else "FAILED ") + d for ok, d in parts)
    return _run(9, "Invariant suites", 120.0, check)


def criterion_10() -> Outcome:
    def check():
        corpus = totally_real_family_corpus()
        heights = [weil_height(p).value for p in corpus]
        low = min(heights)
        worst = str(corpus[heights.index(low)])
        return low >= SCHINZEL - 1e-6, f"{len(corpus)} members, minimum height {low:.9f} ({worst})"
    return _run(10, "Schinzel floor on corpora", 10.0, check)


CRITERIA = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
    6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10,
}


def run_criterion(number: int, quick: bool = False) -> Outcome:
    fn = CRITERIA[number]
    return fn(quick) if number == 9 else fn()


def run_all(quick: bool = False) -> list[Outcome]:
    return [run_criterion(k, quick) for k in sorted(CRITERIA)]
