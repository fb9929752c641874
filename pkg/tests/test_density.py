import json
import math
from fractions import Fraction

import mpmath
import pytest

from relroots.density import (
    BUNDLE,
    COMPLETE,
    SUMMARY_HEADER,
    DensityConfig,
    bundle_density_crosscheck,
    choose_parameters,
    closed_form_bundle_error,
    cycle_length,
    grid_targets,
    independent_residual,
    locate_many,
    locate_real_root_near,
    locate_root_near,
    root_near_minus_one,
    rouche_margin_check,
    witness_root_bound,
)
from relroots.errors import InvalidParameter, InvalidTarget, NotFound, NTooSmall
from relroots.graphs import cycle_of_cliques, is_connected, is_simple
from relroots.polyalg import ComplexApprox, IntPolynomial, poly_eval_complex
from relroots.relcore import rel_complete, rel_cycle_gadget


@pytest.fixture(scope="module")
def cert_half_i():
    return locate_root_near(0.5j, eps=0.05)


@pytest.fixture(scope="module")
def cert_minus_half():
    return locate_root_near(-0.5, eps=0.05)


# -- parameters ----------------------------------------------------------------

def test_cycle_length_examples():
    assert cycle_length(0.5, 5) == 16
    m, seed = choose_parameters(0.5, 3)
    assert m == 4
    assert abs(seed) == pytest.approx(0.5, abs=1e-60)
    with pytest.raises(NTooSmall):
        choose_parameters(0.9, 2)


@pytest.mark.parametrize("z0", [0, 1, 1j, complex(0.8, 0.7)])
def test_invalid_targets(z0):
    with pytest.raises(InvalidTarget):
        choose_parameters(z0, 10)
    with pytest.raises(InvalidTarget):
        locate_root_near(z0)


def test_cycle_length_is_exact_at_boundary():
    # (1/2)^4 * 2 * 8 == 1 exactly: floor must give 8, not 7
    assert cycle_length(0.5, 4) == 8
    assert cycle_length(Fraction(1, 2), 4, c=1) == 16


@pytest.mark.parametrize("z0", [0.5j, -0.5, complex(0.3, -0.4), 0.7])
@pytest.mark.parametrize("n", [4, 7, 12])
def test_seed_is_a_root_of_p_n_closest_in_angle(z0, n):
    try:
        m, seed = choose_parameters(z0, n)
    except NTooSmall:
        return
    pn = IntPolynomial.monomial(n, 2 * m) + 1
    value, bound = poly_eval_complex(pn, seed)
    assert abs(value.to_mpc()) <= bound + mpmath.mpf(10) ** -60
    # no other root of p_n is closer in argument to z0
    arg0 = math.atan2(complex(z0).imag, complex(z0).real)
    gaps = [abs(math.remainder(math.pi * (2 * k + 1) / n - arg0, 2 * math.pi)) for k in range(n)]
    seed_arg = math.atan2(float(seed.imag), float(seed.real))
    assert abs(math.remainder(seed_arg - arg0, 2 * math.pi)) <= min(gaps) + 1e-12


def test_config_validation():
    with pytest.raises(InvalidParameter):
        DensityConfig(eps=0)
    with pytest.raises(InvalidParameter):
        DensityConfig(boundary_samples=2)


# -- Rouche evidence -------------------------------------------------------------

def test_rouche_margin_trend_and_lower_bound():
    errors = []
    for n in (8, 12, 20, 35, 50):
        m, seed = choose_parameters(0.5j, n)
        rep = rouche_margin_check(n, m, seed, samples=64)
        assert rep.complete and rep.samples == 64
        errors.append(rep.max_err)
        if n >= 20:
            assert rep.holds
        if n >= 50:
            assert rep.min_p >= 0.28
    # |F - p_n| on the boundary shrinks as n grows at fixed rho
    assert errors == sorted(errors, reverse=True)


def test_rouche_stop_early_reports_incomplete_scan():
    m, seed = choose_parameters(complex(0, 0.9), 20)
    rep = rouche_margin_check(20, m, seed, samples=64, stop_early=True)
    assert not rep.holds and not rep.complete


# -- complex search ------------------------------------------------------------------

def test_half_i_certificate(cert_half_i):
    c = cert_half_i
    assert c.problems() == []
    assert c.distance <= 0.05 and c.residual <= 1e-20
    assert c.m >= 3 and c.c == 2 and c.family == "K"
    assert c.rouche.holds and c.rouche.samples >= 64
    assert independent_residual(c) <= c.residual
    # the seed zero itself annihilates p_n exactly up to rounding
    pn = IntPolynomial.monomial(c.n, 2 * c.m) + 1
    value, bound = poly_eval_complex(pn, c.seed_zero)
    assert abs(value.to_mpc()) <= bound + mpmath.mpf(10) ** -60


def test_root_is_a_reliability_root_of_the_witness(cert_half_i):
    c = cert_half_i
    full = rel_cycle_gadget(c.m, c.n)
    with mpmath.workprec(full.max_bits() + 600):
        value = abs(mpmath.polyval([mpmath.mpf(x) for x in reversed(full.coeffs)], c.refined_zero.to_mpc()))
    assert value <= witness_root_bound(c) * (1 + mpmath.mpf(10) ** -20)


def test_minus_half_witness(cert_minus_half):
    c = cert_minus_half
    assert c.problems() == []
    g = cycle_of_cliques(c.m, c.n)
    assert g.vertex_count == c.m * c.n == c.witness_vertices
    assert g.edge_count == c.m * math.comb(c.n + 1, 2) == c.witness_edges
    assert is_simple(g) and is_connected(g) and c.witness_simple


def test_determinism(cert_half_i):
    again = locate_root_near(0.5j, eps=0.05)
    assert again.to_json() == cert_half_i.to_json()


def test_certificate_serialisation(cert_half_i):
    d = json.loads(cert_half_i.to_json())
    for key in ("target", "seed_zero", "refined_zero", "residual", "distance", "rouche", "witness", "config", "precision"):
        assert key in d
    assert d["witness"]["graph"] == f"C_{cert_half_i.m}[K_{cert_half_i.n + 1}]"
    assert d["rouche"]["holds"] is True
    row = cert_half_i.summary_row().split(",")
    assert len(row) == len(SUMMARY_HEADER.split(","))
    assert int(row[2]) == cert_half_i.n and int(row[3]) == cert_half_i.m


def test_not_found_carries_best_attempt():
    cfg = DensityConfig(n_max=30)  # m >= 3 only from n = 17 on
    with pytest.raises(NotFound) as info:
        locate_root_near(complex(0, 0.9), config=cfg)
    assert info.value.best is not None and 17 <= info.value.best.n <= 30


def test_locate_many_keeps_order_and_reports_failures():
    cfg = DensityConfig(n_max=30)
    out = locate_many([0.5j, complex(0, 0.9), -0.5], config=cfg)
    assert complex(out[0].target) == 0.5j and isinstance(out[1], NotFound) and complex(out[2].target) == -0.5


def test_grid_targets():
    pts = grid_targets()
    assert len(pts) == 24
    assert sorted({round(abs(z), 12) for z in pts}) == [0.3, 0.6, 0.9]
    assert pts[2] == 0.3j


# -- bundle oracle -------------------------------------------------------------------

@pytest.mark.parametrize("z0", [0.5j, -0.5, 0.3, complex(-0.4, -0.4)])
def test_bundle_cross_check_matches_closed_form(z0):
    c = bundle_density_crosscheck(z0, eps=0.05)
    assert c.family == "bundle" and c.c == 1
    assert c.problems() == []
    assert closed_form_bundle_error(c) < 1e-18
    assert BUNDLE.witness_counts(c.m, c.n) == (c.m, c.m * c.n)
    if c.m <= 10_000:  # m grows like rho^-n, so only small witnesses are built
        g = BUNDLE.witness_graph(c.m, c.n)
        assert g.slot_count == c.m and g.edge_count == c.m * c.n and not is_simple(g)


def test_bundle_factor_roots_lie_on_one_circle():
    F = BUNDLE.factor(6, 10, None)
    assert F == IntPolynomial.monomial(6, 9) + 1
    assert COMPLETE.factor(2, 4, None) == IntPolynomial([1, 0, 5, -6])


# -- real search ----------------------------------------------------------------------

def test_real_root_near_minus_half():
    c = locate_real_root_near(-0.5, eps=0.05)
    assert c.real and c.problems() == []
    assert -0.55 < float(c.refined_zero.real) < -0.45
    assert c.n % 2 == 1
    lo, hi = c.bracket
    F = COMPLETE.factor(c.n, c.m, None)
    assert F.sign_at(lo) * F.sign_at(hi) <= 0
    assert c.endpoint_signs == (-1, 1)
    assert c.residual <= 1e-20
    # the reported zero is a dyadic rational; evaluate F there exactly
    man, exp = c.refined_zero.real.man_exp  # unsigned mantissa; the root is negative
    x = -Fraction(man) * Fraction(2) ** exp
    assert abs(F(x)) <= Fraction(1, 10**20)


def test_real_root_near_minus_tenth():
    c = locate_real_root_near(-0.1, eps=0.05)
    assert c.problems() == [] and abs(float(c.refined_zero.real) + 0.1) <= 0.05


def test_real_target_validation():
    with pytest.raises(InvalidTarget):
        locate_real_root_near(0.2)
    with pytest.raises(InvalidTarget):
        locate_real_root_near(-1)


# -- accumulation at -1 ------------------------------------------------------------------

def test_root_near_minus_one_small_case():
    b = root_near_minus_one(-0.6, DensityConfig(tol=1e-12))
    assert b.n == 4
    assert -1 < b.lo < b.hi < Fraction(-6, 10)
    assert b.width <= Fraction(1, 10**12)
    assert b.sign_lo == -1 and b.sign_hi == 1
    assert abs(float(b.lo) + 0.626) < 0.01
    assert rel_complete(4).sign_at(Fraction(-6, 10)) == 1


def test_root_near_minus_one_skips_wrong_residues():
    # n = 5 has Rel(K_5; -1) > 0 and is never a candidate
    assert rel_complete(5)(-1) > 0
    for q in (-0.3, -0.6, -0.7):
        assert root_near_minus_one(q, DensityConfig(tol=1e-9)).n % 4 in (0, 3)


def test_root_near_minus_one_validation():
    with pytest.raises(InvalidTarget):
        root_near_minus_one(0.5)
    with pytest.raises(NotFound):
        root_near_minus_one(-0.9, DensityConfig(n_max=30))


def test_target_may_be_given_as_complex_approx():
    z = ComplexApprox.from_value(complex(0, 0.5))
    assert choose_parameters(z, 10) == choose_parameters(0.5j, 10)
