import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relroots.asympt import bound_b, convergence_scan, gilbert_ratio, sample_points, seq_a, seq_b
from relroots.errors import InvalidParameter
from relroots.relcore import rel_complete, srel_complete

rhos = st.fractions(min_value=0, max_value=Fraction(99, 100), max_denominator=100)


def exact_a(n, r: Fraction) -> Fraction:
    return sum(math.comb(n - 1, s - 1) * r ** (s * (n - s)) for s in range(1, n))


def exact_b(n, r: Fraction) -> Fraction:
    return sum(math.comb(n - 2, s - 1) * r ** (s * (n - s) - (n - 1)) for s in range(2, n - 1))


def test_sequence_small_cases():
    r = Fraction(37, 100)
    with mpmath.workprec(256):
        x = mpmath.mpf(37) / 100
        assert abs(seq_a(2, r) - x) < 1e-70
        assert abs(seq_a(3, r) - 3 * x**2) < 1e-70
        assert abs(seq_b(4, r) - 2 * x) < 1e-70
        assert abs(seq_b(5, r) - 6 * x**2) < 1e-70
    assert seq_b(40, 0.5) < 1e-6
    assert bound_b(10, 0) == 0 and seq_b(12, 0) == 0


def test_sequence_preconditions():
    with pytest.raises(InvalidParameter):
        seq_a(1, 0.5)
    with pytest.raises(InvalidParameter):
        seq_b(3, 0.5)
    with pytest.raises(InvalidParameter):
        seq_a(5, 1.0)
    with pytest.raises(InvalidParameter):
        seq_b(5, -0.1)


@given(st.integers(4, 60), rhos)
@settings(max_examples=120, deadline=None)
def test_sequences_match_exact_rational_sums(n, r):
    with mpmath.workprec(300):
        ea = exact_a(n, r)
        eb = exact_b(n, r)
        assert abs(seq_a(n, r) - mpmath.mpf(ea.numerator) / ea.denominator) <= mpmath.mpf(10) ** -60 * (1 + ea)
        assert abs(seq_b(n, r) - mpmath.mpf(eb.numerator) / eb.denominator) <= mpmath.mpf(10) ** -60 * (1 + eb)


@given(st.integers(2, 100), rhos)
@settings(max_examples=150, deadline=None)
def test_b_bound_and_a_chain(n, r):
    slack = mpmath.mpf(10) ** -30
    assert seq_b(n + 2, r) <= bound_b(n, r) + slack
    with mpmath.workprec(256):
        rr = mpmath.mpf(r.numerator) / r.denominator
        assert seq_a(n + 1, r) <= rr**n + seq_b(n + 2, r) + slack


def test_a_eventually_decreasing_at_point_nine():
    values = [seq_a(n, 0.9) for n in range(2, 401)]
    tail = values[200:]
    assert all(x > y for x, y in zip(tail, tail[1:]))
    assert values[-1] < 1e-3


def test_bound_eventually_monotone_at_point_nine():
    values = [bound_b(n, 0.9) for n in range(2, 400)]
    tail = values[150:]
    assert all(x > y for x, y in zip(tail, tail[1:]))
    assert tail[-1] < 1e-3


def test_sample_grid():
    pts = sample_points(0.5, 16)
    assert len(pts) == 2 * 16 + 4
    assert all(abs(z) <= 0.5 + 1e-15 for z in pts)
    assert {0.5, -0.5, 0.25, -0.25} <= {z.real for z in pts if z.imag == 0}
    assert pts == sample_points(0.5, 16)


def test_convergence_scan_values_match_direct_evaluation():
    rep = convergence_scan(0.5, 12, sample_count=8, n_min=8)
    pts = sample_points(0.5, 8)
    with mpmath.workprec(200):
        for n, a, b in zip(rep.n_values, rep.alpha, rep.beta):
            rel = list(reversed(rel_complete(n).coeffs))
            srel = list(reversed(srel_complete(n).coeffs))
            direct_a = max(abs(mpmath.polyval(rel, mpmath.mpc(z)) - 1) for z in pts)
            direct_b = max(abs(mpmath.polyval(srel, mpmath.mpc(z)) / mpmath.mpc(z) ** (n - 1) - 2) for z in pts)
            assert a == pytest.approx(float(direct_a), rel=1e-6, abs=1e-30)
            assert b == pytest.approx(float(direct_b), rel=1e-6, abs=1e-30)


def test_beta_at_k2_is_one():
    rep = convergence_scan(0.5, 2, sample_count=4)
    assert rep.beta == [pytest.approx(1.0)]


def test_convergence_at_half():
    rep = convergence_scan(0.5, 40, n_min=30, alpha_tol=1e-4, beta_tol=1e-3)
    assert max(rep.alpha) < 1e-4 and max(rep.beta) < 1e-3
    assert rep.converged and rep.first_below("alpha", 1e-4) == 30
    csv = rep.to_csv().splitlines()
    assert csv[1] == "n,alpha,beta" and len(csv) == 2 + 11


def test_beta_at_half_decreases():
    srels = [srel_complete(n)(Fraction(1, 2)) / Fraction(1, 2) ** (n - 1) for n in range(10, 41)]
    devs = [abs(x - 2) for x in srels]
    assert all(x > y for x, y in zip(devs, devs[1:]))
    assert devs[-1] < Fraction(1, 1000)


def test_scan_preconditions():
    with pytest.raises(InvalidParameter):
        convergence_scan(1.2, 10)
    with pytest.raises(InvalidParameter):
        convergence_scan(0.5, 1)


def test_gilbert_ratio_is_exact():
    n, q = 6, Fraction(2, 5)
    dev = 1 - rel_complete(n)(q) - n * q ** (n - 1)
    assert gilbert_ratio(n, q) == dev**2 / (Fraction(n) ** 4 * q ** (3 * n))
