import math
import xml.etree.ElementTree as ET
from fractions import Fraction

import mpmath
import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from relroots.errors import InvalidInput, InvalidParameter, SolverFailure
from relroots.graphs import cycle
from relroots.polyalg import IntPolynomial
from relroots.relcore import rel_complete, rel_deletion_contraction
from relroots.rootfind import (
    RootSet,
    all_roots,
    conjugate_symmetric,
    deflate_unit_root,
    fujiwara_bound,
    real_roots_in_interval,
    roots_to_csv,
    roots_to_svg,
    squarefree_part,
    sturm_sequence,
    unit_root_order,
    vieta_check,
    zero_counting_summary,
)

ONE_MINUS_Q = IntPolynomial([1, -1])
REL_K3 = IntPolynomial([1, 0, -3, 2])

nonconstant = st.lists(st.integers(-50, 50), min_size=2, max_size=16).map(IntPolynomial).filter(lambda p: p.degree >= 1)


def independent_abs_value(p: IntPolynomial, z) -> mpmath.mpf:
    with mpmath.workprec(2000):
        return abs(mpmath.polyval(list(reversed(p.coeffs)), z.to_mpc()))


def test_roots_of_unity():
    p = IntPolynomial([1] + [0] * 11 + [-1])
    rs = all_roots(p)
    got = sorted(rs.as_complex(), key=lambda z: math.atan2(z.imag, z.real))
    want = sorted((np.exp(2j * np.pi * k / 12) for k in range(12)), key=lambda z: math.atan2(z.imag, z.real))
    assert np.allclose(got, want, atol=1e-15)
    assert vieta_check(p, rs, 1e-20)
    summary = zero_counting_summary(rs, bins=12)
    assert np.allclose(summary.angle_mass, 1 / 12)
    assert np.allclose(summary.modulus_mass.sum(), 1.0)
    assert summary.min_modulus == pytest.approx(1.0)


def test_factored_k3_roots_and_clusters():
    rs = all_roots(REL_K3)
    pts = sorted(rs.as_complex(), key=lambda z: z.real)
    assert pts[0] == pytest.approx(-0.5, abs=1e-15)
    # the double root at 1 is only found to about sqrt(tol) and flagged as a cluster
    assert abs(pts[1] - 1) < 1e-9 and abs(pts[2] - 1) < 1e-9
    assert sorted(rs.multiplicity) == [1, 2, 2]
    assert vieta_check(REL_K3, rs, 1e-15)
    deflated = all_roots(REL_K3, deflate_unit=2)
    assert deflated.deflated_unit_multiplicity == 2 and len(deflated.roots) == 1
    assert complex(deflated.roots[0]) == pytest.approx(-0.5)
    assert vieta_check(REL_K3, deflated, 1e-30)


def test_small_density_factor_residuals():
    # Rel(K_3) + 4 sRel(K_3)
    p = REL_K3 + IntPolynomial([0, 0, 2, -2]) * 4
    assert p == IntPolynomial([1, 0, 5, -6])
    rs = all_roots(p, tol=1e-20)
    for z, r in zip(rs.roots, rs.residuals):
        assert r <= 1e-20
        assert independent_abs_value(p, z) <= r


@given(nonconstant)
@settings(max_examples=40, deadline=None)
def test_residuals_are_certified_and_match_numpy(p):
    rs = all_roots(p)
    for z, r in zip(rs.roots, rs.residuals):
        assert independent_abs_value(p, z) <= r <= 1e-20
    assert conjugate_symmetric(rs, 1e-6)
    assert vieta_check(p, rs, 1e-12)
    if all(m == 1 for m in rs.multiplicity):
        ours = rs.as_complex()
        for w in np.roots(list(reversed(p.coeffs))):
            assert np.min(np.abs(ours - w)) < 1e-6 * max(1, abs(w))


def test_random_degree_twenty_vieta():
    rng = np.random.default_rng(20)
    for _ in range(5):
        coeffs = [int(c) for c in rng.integers(-1000, 1000, size=21)]
        coeffs[-1] = coeffs[-1] or 1
        p = IntPolynomial(coeffs)
        assert vieta_check(p, all_roots(p, precision=256), 1e-20)


def test_zeros_at_origin_are_kept():
    p = IntPolynomial([0, 0, 1, 1])  # q^2 (1 + q)
    rs = all_roots(p)
    assert sorted(abs(complex(z)) for z in rs.roots)[:2] == [0, 0]
    assert vieta_check(p, rs, 1e-20)


def test_deflation_examples():
    assert deflate_unit_root(REL_K3, 0) == REL_K3
    for m in (3, 5, 8):
        rel = rel_deletion_contraction(cycle(m))
        assert deflate_unit_root(rel, m - 1) == IntPolynomial([1, m - 1])
    k25 = deflate_unit_root(rel_complete(25), 24)
    assert k25.degree == 276
    assert unit_root_order(rel_complete(25)) == 24
    with pytest.raises(InvalidInput):
        deflate_unit_root(IntPolynomial([1, 1]), 1)


def test_deflate_then_solve_equals_solve_then_filter():
    p = rel_complete(5)
    k = unit_root_order(p)
    direct = all_roots(p, tol=1e-12)
    deflated = all_roots(p, tol=1e-20, deflate_unit=k)
    far = sorted((z for z in direct.as_complex() if abs(z - 1) > 1e-3), key=lambda z: (z.real, z.imag))
    ours = sorted(deflated.as_complex(), key=lambda z: (z.real, z.imag))
    assert len(far) == len(ours)
    assert np.allclose(far, ours, atol=1e-9)


def test_solver_failure_carries_partial_result():
    # a cluster of four roots at 1 cannot meet the residual target within 256 bits
    p = ONE_MINUS_Q**4 * IntPolynomial([2, 1])
    with pytest.raises(SolverFailure) as info:
        all_roots(p, tol=1e-300, max_precision=256, max_iter=30)
    partial = info.value.partial
    assert isinstance(partial, RootSet) and len(partial.roots) == 5


def test_all_roots_preconditions():
    with pytest.raises(InvalidParameter):
        all_roots(IntPolynomial([3]))
    with pytest.raises(InvalidInput):
        RootSet((), (), 1, 2, (), 53, 0)


def test_fujiwara_bound_contains_roots():
    p = IntPolynomial([6, -5, 1])  # roots 2, 3
    assert fujiwara_bound(p) >= 3


def test_vieta_detects_wrong_roots():
    rs = all_roots(IntPolynomial([1, 0, 1]))
    assert not vieta_check(IntPolynomial([2, 0, 1]), rs, 1e-10)


# -- real roots ---------------------------------------------------------------

def test_real_root_examples():
    (r,) = real_roots_in_interval(IntPolynomial([1, 2]), -1, 0)
    assert r.lo <= Fraction(-1, 2) <= r.hi
    (r,) = real_roots_in_interval(rel_complete(4), Fraction(-999, 1000), 0, tol=Fraction(1, 10**12))
    assert abs(r.value + 0.626) < 0.01 and r.width <= Fraction(1, 10**12)
    assert rel_complete(4).sign_at(r.lo) != rel_complete(4).sign_at(r.hi)
    assert real_roots_in_interval(ONE_MINUS_Q**3, Fraction(-1, 2), Fraction(1, 2)) == []
    with pytest.raises(InvalidParameter):
        real_roots_in_interval(REL_K3, 1, 0)


def test_repeated_root_is_reported_once():
    roots = real_roots_in_interval(REL_K3, -2, 2)
    assert len(roots) == 2
    assert roots[0].lo <= Fraction(-1, 2) <= roots[0].hi
    assert roots[1].lo <= 1 <= roots[1].hi


def test_sturm_sequence_counts_distinct_roots():
    p = IntPolynomial([-6, 11, -6, 1]) * IntPolynomial([-6, 11, -6, 1])  # (q-1)^2 (q-2)^2 (q-3)^2
    s = squarefree_part(p)
    assert s.degree == 3
    seq = sturm_sequence(s)
    assert seq[0] == s and seq[-1].degree == 0


@given(nonconstant)
@settings(max_examples=60, deadline=None)
def test_real_roots_match_sympy(p):
    q = sympy.Symbol("q")
    expected = sorted(float(r) for r in set(sympy.real_roots(sympy.Poly(list(reversed(p.coeffs)), q))) if -4 <= r <= 4)
    got = real_roots_in_interval(p, -4, 4, tol=Fraction(1, 2**40))
    assert len(got) == len(expected)
    for r, e in zip(got, expected):
        assert r.lo - Fraction(1, 2**40) <= Fraction(e) <= r.hi + Fraction(1, 2**40)


@given(nonconstant)
@settings(max_examples=30, deadline=None)
def test_real_roots_agree_with_all_roots(p):
    if squarefree_part(p) != p and squarefree_part(p) != -p:
        return  # repeated roots are only located to about sqrt(tol) by all_roots
    rs = all_roots(p)
    real = sorted(z.real for z in rs.as_complex() if abs(z.imag) < 1e-15)
    bracketed = real_roots_in_interval(p, -100, 100, tol=Fraction(1, 2**60))
    assert len(real) == len(bracketed)
    for x, r in zip(real, bracketed):
        assert abs(x - r.value) < 1e-15


# -- summaries and export -----------------------------------------------------

def test_k_n_min_modulus_increases():
    mins = []
    for n in (10, 15, 20):
        rs = all_roots(rel_complete(n), deflate_unit=n - 1)
        summary = zero_counting_summary(rs)
        assert summary.max_modulus_nonunit < 1
        mins.append(float(min(abs(z) for z in rs.as_complex())))
    assert mins == sorted(mins) and mins[-1] < 1


def test_csv_and_svg(tmp_path):
    rs = all_roots(IntPolynomial([1, 0, 0, 1]))
    lines = roots_to_csv(rs).splitlines()
    assert len(lines) == 3
    for line in lines:
        re_, im_ = map(float, line.split(","))
        assert abs(complex(re_, im_) ** 3 + 1) < 1e-14
    svg = roots_to_svg(rs)
    root = ET.fromstring(svg)
    circles = [e for e in root.iter() if e.tag.endswith("circle")]
    assert len(circles) == 1 + 3
    assert root.get("viewBox") == "0 0 480 480"
    # the unit circle radius spans 1 / 1.15 of the half-width
    assert float(circles[0].get("r")) == pytest.approx(240 / 1.15, abs=0.01)


def test_summary_rejects_empty():
    rs = RootSet((), (), 0, 0, (), 53, 0)
    with pytest.raises(InvalidParameter):
        zero_counting_summary(rs)


def test_residual_covers_stripped_zeros_at_origin():
    # q^2 (q^2 + 3): |p(z)| = 3 |z^2 + 3| at the nonzero roots
    p = IntPolynomial([0, 0, 3, 0, 1])
    rs = all_roots(p)
    for z, r in zip(rs.roots, rs.residuals):
        assert independent_abs_value(p, z) <= r
