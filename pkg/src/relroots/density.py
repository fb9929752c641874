"""Reliability roots of C_m[K_{n+1}] near prescribed points of the unit disk.

For a target z0 with rho = |z0| we take m = floor(1/(c rho^n)) and look at
F = Rel(K_{n+1}) + m sRel(K_{n+1}), an exact factor of Rel(C_m[K_{n+1}]).
Since sRel(K_{n+1}; q) ~ c q^n with c = 2, F is close to p_n(z) = 1 + m c z^n
on the small disk B_n = {z_n (1 + u) : |u| <= 1/n} around a root z_n of
p_n. Newton's method confined to B_n finds the nearby root of F, and the
sampled comparison |F - p_n| < |p_n| on the boundary of B_n is recorded as
Rouche evidence that the disk really contains one.
"""

from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import mpmath
from gmpy2 import mpz

from .errors import InvalidParameter, InvalidTarget, NotFound, NTooSmall
from .graphs import Multigraph, bundle, complete_graph, cycle, cycle_of_cliques, substitute
from .kncache import KnCache, default_cache, set_default_cache
from .polyalg import (
    ComplexApprox,
    IntPolynomial,
    _signed_man_exp,
    fixed_error_bound,
    fixed_from_mpc,
    horner_fixed,
    horner_fixed_with_derivative,
)
from .relcore import rel_complete, sign_at_minus_one, srel_complete
from .rootfind import certified_residual

log = logging.getLogger(__name__)

THREE_MINUS_E = 3 - math.e
MAX_BISECTIONS = 4000


@dataclass(frozen=True)
class DensityConfig:
    eps: float = 0.05
    tol: float = 1e-20
    boundary_samples: int = 64
    n_max: int = 100
    precision: int | None = None
    require_rouche: bool = True
    newton_iterations: int = 80
    restart_seeds: int = 8

    def __post_init__(self):
        if not self.eps > 0 or not self.tol > 0:
            raise InvalidParameter("eps and tol must be positive")
        if self.boundary_samples < 4 or self.n_max < 1:
            raise InvalidParameter("need boundary_samples >= 4 and n_max >= 1")


# -- gadget families ----------------------------------------------------------

class GadgetFamily:
    """A sequence of two-terminal gadgets with Rel ~ 1 and sRel ~ c q^n inside the disk."""

    name = ""
    c = 1
    simple = False

    def polynomials(self, n: int, cache: KnCache) -> tuple[IntPolynomial, IntPolynomial]:
        raise NotImplementedError

    def witness_counts(self, m: int, n: int) -> tuple[int, int]:
        raise NotImplementedError

    def witness_graph(self, m: int, n: int) -> Multigraph:
        raise NotImplementedError

    def factor(self, n: int, m: int, cache: KnCache) -> IntPolynomial:
        f, g = self.polynomials(n, cache)
        return f + g * m


class CompleteFamily(GadgetFamily):
    name = "K"
    c = 2
    simple = True

    def polynomials(self, n, cache):
        return rel_complete(n + 1, cache), srel_complete(n + 1, cache)

    def witness_counts(self, m, n):
        return m * n, m * math.comb(n + 1, 2)

    def witness_graph(self, m, n):
        return cycle_of_cliques(m, n)


class BundleFamily(GadgetFamily):
    name = "bundle"
    c = 1
    simple = False

    def polynomials(self, n, cache):
        qn = IntPolynomial.monomial(n)
        return 1 - qn, qn

    def witness_counts(self, m, n):
        return m, m * n

    def witness_graph(self, m, n):
        return substitute(cycle(m), bundle(n))


COMPLETE = CompleteFamily()
BUNDLE = BundleFamily()
FAMILIES = {f.name: f for f in (COMPLETE, BUNDLE)}


# -- parameters ---------------------------------------------------------------

def _mpf_fraction(x: mpmath.mpf) -> Fraction:
    man, exp = _signed_man_exp(x)
    return Fraction(man) * Fraction(2) ** exp


def _as_target(z0) -> ComplexApprox:
    if isinstance(z0, ComplexApprox):
        return z0
    return ComplexApprox.from_value(z0)


def _modulus_squared(z: ComplexApprox) -> Fraction:
    return _mpf_fraction(z.real) ** 2 + _mpf_fraction(z.imag) ** 2


def cycle_length(z0, n: int, c: int = 2) -> int:
    """m_n = floor(1 / (c |z0|^n)), computed exactly from the dyadic value of z0."""
    z = _as_target(z0)
    r2 = _modulus_squared(z)
    if r2 == 0 or r2 >= 1:
        raise InvalidTarget(f"target must satisfy 0 < |z0| < 1, got {complex(z)}")
    if n < 1:
        raise InvalidParameter("n must be >= 1")
    with mpmath.workprec(128):
        guess = int(mpmath.floor(1 / (c * mpmath.sqrt(mpmath.mpf(r2.numerator) / r2.denominator) ** n)))
    # exact correction: m is the largest integer with (m c)^2 |z0|^(2n) <= 1
    rn = r2 ** n
    m = max(guess, 0)
    while m > 0 and (m * c) ** 2 * rn > 1:
        m -= 1
    while ((m + 1) * c) ** 2 * rn <= 1:
        m += 1
    return m


def choose_parameters(z0, n: int, c: int = 2, precision: int = 256) -> tuple[int, ComplexApprox]:
    """Cycle length m_n and the root of 1 + m c z^n whose argument is closest to arg z0."""
    z = _as_target(z0)
    m = cycle_length(z, n, c)
    if m < 3:
        raise NTooSmall(f"m = {m} < 3 at n = {n}; increase n")
    with mpmath.workprec(precision + 32):
        theta = mpmath.atan2(z.imag, z.real)
        k = int(mpmath.nint((n * theta - mpmath.pi) / (2 * mpmath.pi)))
        angle = (mpmath.pi + 2 * mpmath.pi * k) / n
        radius = mpmath.mpf(m * c) ** (-mpmath.mpf(1) / n)
        seed = mpmath.mpc(radius * mpmath.cos(angle), radius * mpmath.sin(angle))
        if n % 2 == 1 and z.imag == 0 and z.real < 0:
            seed = mpmath.mpc(-radius, 0)
    return m, ComplexApprox(seed.real, seed.imag, precision)


def working_precision(n: int, rho: float, config: DensityConfig) -> int:
    if config.precision is not None:
        return config.precision
    return max(256, math.ceil(4 * n * math.log2(1 / rho)))


# -- Rouche evidence ----------------------------------------------------------

@dataclass(frozen=True)
class RoucheReport:
    min_p: float
    max_err: float
    samples: int
    complete: bool

    @property
    def margin(self) -> float:
        return self.min_p - self.max_err

    @property
    def holds(self) -> bool:
        return self.margin > 0


def _boundary_point(seed: mpmath.mpc, n: int, k: int, samples: int) -> mpmath.mpc:
    return seed * (1 + mpmath.expjpi(mpmath.mpf(2 * k) / samples) / n)


def rouche_margin_check(
    n: int,
    m: int,
    seed_zero: ComplexApprox,
    samples: int = 64,
    precision: int = 256,
    family: GadgetFamily = COMPLETE,
    cache: KnCache | None = None,
    stop_early: bool = False,
) -> RoucheReport:
    """Sampled min |p_n| and max |F - p_n| over the boundary points z_n (1 + e^(i theta)/n).

    Values are bounded conservatively: the evaluation error bound is
    subtracted from |p_n| and added to |F - p_n|. With ``stop_early`` the
    scan stops once the margin can no longer be positive.
    """
    cache = cache or default_cache()
    F = family.factor(n, m, cache)
    pn = IntPolynomial.monomial(n, m * family.c) + 1
    G = F - pn
    min_p = math.inf
    max_err = 0.0
    done = 0
    with mpmath.workprec(precision + 32):
        seed = seed_zero.to_mpc()
        for k in range(samples):
            zr, zi = fixed_from_mpc(_boundary_point(seed, n, k, samples), precision)
            for poly, is_p in ((pn, True), (G, False)):
                vr, vi = horner_fixed(poly.coeffs, zr, zi, precision)
                err = fixed_error_bound(poly.degree, zr, zi, precision)
                mag = mpmath.sqrt(mpmath.ldexp(int(vr * vr + vi * vi), -2 * precision))
                if is_p:
                    min_p = min(min_p, float(mag - err))
                else:
                    max_err = max(max_err, float(mag + err))
            done += 1
            if stop_early and max_err >= min_p:
                break
    return RoucheReport(min_p, max_err, done, done == samples)


# -- certificates -------------------------------------------------------------

def _num(x) -> str:
    return mpmath.nstr(mpmath.mpf(x), 30, min_fixed=-5, max_fixed=5)


def _capprox_json(z: ComplexApprox) -> dict:
    return {"re": _num(z.real), "im": _num(z.imag)}


@dataclass(frozen=True)
class DensityCertificate:
    family: str
    target: ComplexApprox
    epsilon: float
    n: int
    m: int
    c: int
    rho: float
    seed_zero: ComplexApprox
    refined_zero: ComplexApprox
    residual: mpmath.mpf
    distance: mpmath.mpf
    rouche: RoucheReport | None
    witness_vertices: int
    witness_edges: int
    witness_simple: bool
    precision: int
    config: DensityConfig
    real: bool = False
    bracket: tuple[Fraction, Fraction] | None = None
    endpoint_signs: tuple[int, int] | None = None

    @property
    def rouche_margin(self) -> float | None:
        return None if self.rouche is None else self.rouche.margin

    def problems(self) -> list[str]:
        """Violated certificate invariants (empty when the certificate is sound)."""
        out = []
        if self.m < 3:
            out.append("m < 3")
        if self.distance > self.epsilon:
            out.append("distance exceeds epsilon")
        if self.residual > self.config.tol:
            out.append("residual exceeds tolerance")
        v, e = FAMILIES[self.family].witness_counts(self.m, self.n)
        if (v, e) != (self.witness_vertices, self.witness_edges):
            out.append("witness counts do not match (m, n)")
        if self.real:
            if self.endpoint_signs is None or self.endpoint_signs[0] * self.endpoint_signs[1] >= 0:
                out.append("no exact sign change recorded")
            if self.refined_zero.imag != 0:
                out.append("real certificate with nonreal zero")
        elif self.config.require_rouche and (self.rouche is None or not self.rouche.holds):
            out.append("Rouche evidence missing or negative")
        return out

    def to_dict(self) -> dict:
        d = {
            "family": self.family,
            "target": _capprox_json(self.target),
            "epsilon": self.epsilon,
            "n": self.n,
            "m": self.m,
            "c": self.c,
            "rho": self.rho,
            "seed_zero": _capprox_json(self.seed_zero),
            "refined_zero": _capprox_json(self.refined_zero),
            "residual": _num(self.residual),
            "distance": _num(self.distance),
            "rouche": None
            if self.rouche is None
            else {**asdict(self.rouche), "margin": self.rouche.margin, "holds": self.rouche.holds},
            "witness": {
                "graph": f"C_{self.m}[{'K_' + str(self.n + 1) if self.family == 'K' else 'bundle_' + str(self.n)}]",
                "vertices": self.witness_vertices,
                "edges": self.witness_edges,
                "simple": self.witness_simple,
            },
            "precision": self.precision,
            "real": self.real,
            "config": asdict(self.config),
        }
        if self.bracket is not None:
            d["bracket"] = [str(self.bracket[0]), str(self.bracket[1])]
            d["endpoint_signs"] = list(self.endpoint_signs)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def summary_row(self) -> str:
        t, z = complex(self.target), complex(self.refined_zero)
        return (
            f"{t.real!r},{t.imag!r},{self.n},{self.m},{z.real!r},{z.imag!r},"
            f"{float(self.distance)!r},{float(self.residual)!r}"
        )


SUMMARY_HEADER = "re(z0),im(z0),n,m,re(z*),im(z*),distance,residual"


def independent_residual(cert: DensityCertificate, cache: KnCache | None = None) -> mpmath.mpf:
    """|F(z*)| recomputed with mpmath floating point at enough bits to absorb the coefficients."""
    family = FAMILIES[cert.family]
    F = family.factor(cert.n, cert.m, cache or default_cache())
    bits = F.max_bits() + F.degree.bit_length() + 2 * cert.precision
    with mpmath.workprec(bits):
        z = cert.refined_zero.to_mpc()
        return abs(mpmath.polyval([mpmath.mpf(c) for c in reversed(F.coeffs)], z))


def witness_root_bound(cert: DensityCertificate, cache: KnCache | None = None) -> mpmath.mpf:
    """Bound on |Rel(C_m[gadget]; z*)| from Rel = Rel(gadget)^(m-1) * F."""
    f, _ = FAMILIES[cert.family].polynomials(cert.n, cache or default_cache())
    with mpmath.workprec(f.max_bits() + 2 * cert.precision):
        z = cert.refined_zero.to_mpc()
        rel = abs(mpmath.polyval([mpmath.mpf(c) for c in reversed(f.coeffs)], z))
        return cert.residual * rel ** (cert.m - 1)


# -- Newton in B_n ------------------------------------------------------------

def _inside(zr, zi, cr, ci, n) -> bool:
    # |z - z_n| <= |z_n| / n, exactly in fixed point
    return n * n * ((zr - cr) ** 2 + (zi - ci) ** 2) <= cr * cr + ci * ci


def _newton_in_disk(coeffs, zr, zi, cr, ci, n, scale, iterations):
    zr, zi = mpz(zr), mpz(zi)
    noise = mpz(1) << 16
    for _ in range(iterations):
        pr, pi, dr, di = horner_fixed_with_derivative(coeffs, zr, zi, scale)
        den = dr * dr + di * di
        if den == 0:
            return None
        nr = ((pr * dr + pi * di) << scale) // den
        ni = ((pi * dr - pr * di) << scale) // den
        zr -= nr
        zi -= ni
        if not _inside(zr, zi, cr, ci, n):
            return None
        if abs(nr) + abs(ni) <= noise:
            return zr, zi
    return zr, zi


def _start_points(seed: mpmath.mpc, n: int, count: int):
    yield seed
    for k in range(count):
        yield seed * (1 + mpmath.expjpi(mpmath.mpf(2 * k) / count + mpmath.mpf(1) / 7) / (2 * n))


def _grid_points(coeffs, seed: mpmath.mpc, n: int, scale: int, keep: int = 4):
    """Points of a polar grid inside B_n ordered by |F|, smallest first."""
    scored = []
    for j in range(1, 8):
        for k in range(32):
            w = seed * (1 + mpmath.mpf(j) / (8 * n) * mpmath.expjpi(mpmath.mpf(2 * k) / 32))
            zr, zi = fixed_from_mpc(w, scale)
            vr, vi = horner_fixed(coeffs, zr, zi, scale)
            scored.append((int(vr * vr + vi * vi), j, k, w))
    scored.sort(key=lambda t: t[:3])
    return [t[3] for t in scored[:keep]]


def _refine_in_disk(F: IntPolynomial, seed_zero: ComplexApprox, n: int, scale: int, config: DensityConfig):
    """Root of F inside B_n as exact fixed-point coordinates, or None."""
    coeffs = F.coeffs
    with mpmath.workprec(scale + 32):
        seed = seed_zero.to_mpc()
        cr, ci = fixed_from_mpc(seed, scale)
        starts = list(_start_points(seed, n, config.restart_seeds))
        for phase in ("seeds", "grid"):
            if phase == "grid":
                log.debug("n=%d: Newton left B_n from every seed, trying grid search", n)
                starts = _grid_points(coeffs, seed, n, scale)
            for w in starts:
                zr, zi = fixed_from_mpc(w, scale)
                hit = _newton_in_disk(coeffs, zr, zi, cr, ci, n, scale, config.newton_iterations)
                if hit is not None:
                    return hit
    return None


# -- searches -----------------------------------------------------------------

@dataclass
class _Attempt:
    n: int
    m: int
    distance: float
    residual: float
    margin: float | None
    reason: str


@dataclass
class SearchLog:
    attempts: list[_Attempt] = field(default_factory=list)

    def best(self) -> _Attempt | None:
        return min(self.attempts, key=lambda a: (a.distance, a.n), default=None)


def _locate(z0, config: DensityConfig, family: GadgetFamily, cache: KnCache | None) -> DensityCertificate:
    z = _as_target(z0)
    cache = cache or default_cache()
    cycle_length(z, 1, family.c)  # validates the target
    rho = float(abs(z))
    trail = SearchLog()
    for n in range(1, config.n_max + 1):
        try:
            m, seed = choose_parameters(z, n, family.c)
        except NTooSmall:
            continue
        zt, zs = complex(z), complex(seed)
        if abs(zt - zs) - abs(zs) / n > config.eps:
            continue  # no point of B_n is close enough
        scale = working_precision(n, rho, config)
        F = family.factor(n, m, cache)
        hit = _refine_in_disk(F, seed, n, scale, config)
        if hit is None:
            trail.attempts.append(_Attempt(n, m, math.inf, math.inf, None, "no root found in B_n"))
            continue
        zr, zi = hit
        residual = certified_residual(F.coeffs, F.degree, zr, zi, scale)
        for _ in range(4):
            if residual <= config.tol:
                break
            # polish at doubled precision
            scale *= 2
            with mpmath.workprec(scale + 32):
                cr, ci = fixed_from_mpc(seed.to_mpc(), scale)
            hit = _newton_in_disk(F.coeffs, zr << (scale // 2), zi << (scale // 2), cr, ci, n, scale, 20)
            if hit is None:
                break
            zr, zi = hit
            residual = certified_residual(F.coeffs, F.degree, zr, zi, scale)
        root = ComplexApprox.from_fixed(int(zr), int(zi), scale)
        with mpmath.workprec(scale + 32):
            distance = abs(root.to_mpc() - z.to_mpc())
        if distance > config.eps or residual > config.tol:
            trail.attempts.append(
                _Attempt(n, m, float(distance), float(residual), None, "root too far or residual too large")
            )
            continue
        rouche = rouche_margin_check(
            n, m, seed, config.boundary_samples, scale, family, cache, stop_early=config.require_rouche
        )
        if config.require_rouche and not rouche.holds:
            trail.attempts.append(_Attempt(n, m, float(distance), float(residual), rouche.margin, "no Rouche evidence"))
            continue
        v, e = family.witness_counts(m, n)
        return DensityCertificate(
            family=family.name,
            target=z,
            epsilon=config.eps,
            n=n,
            m=m,
            c=family.c,
            rho=rho,
            seed_zero=seed,
            refined_zero=root,
            residual=residual,
            distance=distance,
            rouche=rouche,
            witness_vertices=v,
            witness_edges=e,
            witness_simple=family.simple,
            precision=scale,
            config=config,
        )
    raise NotFound(f"no certified root within {config.eps} of {complex(z)} for n <= {config.n_max}", best=trail.best())


def locate_root_near(z0, eps: float | None = None, config: DensityConfig | None = None, cache: KnCache | None = None):
    """Certificate for a root of Rel(C_m[K_{n+1}]) within eps of z0 (0 < |z0| < 1)."""
    config = _with_eps(config, eps)
    return _locate(z0, config, COMPLETE, cache)


def bundle_density_crosscheck(z0, eps: float | None = None, config: DensityConfig | None = None, cache=None):
    """Same search for C_m[bundle(n)], whose factor 1 + (m-1) q^n has closed-form roots."""
    config = _with_eps(config, eps)
    return _locate(z0, config, BUNDLE, cache)


def closed_form_bundle_error(cert: DensityCertificate) -> mpmath.mpf:
    """Distance from the refined zero to the nearest exact root of 1 + (m-1) z^n."""
    n, m = cert.n, cert.m
    with mpmath.workprec(cert.precision + 32):
        z = cert.refined_zero.to_mpc()
        radius = mpmath.mpf(m - 1) ** (-mpmath.mpf(1) / n)
        theta = mpmath.arg(z)
        k = int(mpmath.nint((n * theta - mpmath.pi) / (2 * mpmath.pi)))
        exact = radius * mpmath.expjpi(mpmath.mpf(1 + 2 * k) / n)
        return abs(z - exact)


def _with_eps(config: DensityConfig | None, eps: float | None) -> DensityConfig:
    config = config or DensityConfig()
    if eps is not None and eps != config.eps:
        config = DensityConfig(**{**asdict(config), "eps": eps})
    return config


def _dyadic(x: mpmath.mpf) -> Fraction:
    return _mpf_fraction(x)


def locate_real_root_near(
    x0, eps: float | None = None, config: DensityConfig | None = None, cache: KnCache | None = None
) -> DensityCertificate:
    """Real root of Rel(C_m[K_{n+1}]) within eps of x0 in (-1, 0), proved by an exact sign change."""
    config = _with_eps(config, eps)
    cache = cache or default_cache()
    x = Fraction(str(x0)) if isinstance(x0, float) else Fraction(x0)
    if not -1 < x < 0:
        raise InvalidTarget(f"real target must lie in (-1, 0), got {x0}")
    z = ComplexApprox.from_value(x)
    rho = float(-x)
    trail = SearchLog()
    for n in range(1, config.n_max + 1, 2):
        try:
            m, seed = choose_parameters(z, n, COMPLETE.c)
        except NTooSmall:
            continue
        scale = working_precision(n, rho, config)
        with mpmath.workprec(scale + 32):
            zn = seed.real  # odd n: the real root -(2m)^(-1/n)
            outer = _dyadic(mpmath.mpf(zn * (1 + mpmath.mpf(1) / n)))
            inner = _dyadic(mpmath.mpf(zn * (1 - mpmath.mpf(1) / n)))
        if max(outer - x, x - inner, 0) > Fraction(config.eps):
            continue  # the whole real segment of B_n is too far away
        F = COMPLETE.factor(n, m, cache)
        s_out, s_in = F.sign_at(outer), F.sign_at(inner)
        if s_out * s_in >= 0:
            trail.attempts.append(_Attempt(n, m, math.inf, math.inf, None, "no sign change on B_n"))
            continue
        a, b, sa = outer, inner, s_out
        for _ in range(MAX_BISECTIONS):
            mid = (a + b) / 2
            val = F(mid)
            if abs(val) <= Fraction(config.tol):
                break
            if (val > 0) == (sa > 0):
                a = mid
            else:
                b = mid
        residual = _fraction_upper(abs(val))
        distance = abs(mid - x)
        if distance > Fraction(config.eps):
            trail.attempts.append(_Attempt(n, m, float(distance), float(residual), None, "real root too far"))
            continue
        v, e = COMPLETE.witness_counts(m, n)
        return DensityCertificate(
            family=COMPLETE.name,
            target=z,
            epsilon=config.eps,
            n=n,
            m=m,
            c=COMPLETE.c,
            rho=rho,
            seed_zero=seed,
            refined_zero=ComplexApprox(_fraction_mpf(mid), mpmath.mpf(0), scale),
            residual=residual,
            distance=_fraction_upper(distance),
            rouche=None,
            witness_vertices=v,
            witness_edges=e,
            witness_simple=True,
            precision=scale,
            config=config,
            real=True,
            bracket=(a, b),
            endpoint_signs=(s_out, s_in),
        )
    raise NotFound(f"no real certified root within {config.eps} of {x0} for n <= {config.n_max}", best=trail.best())


def _fraction_mpf(x: Fraction) -> mpmath.mpf:
    # dyadic rationals convert exactly
    den = x.denominator
    if den & (den - 1) == 0:
        with mpmath.workprec(max(53, x.numerator.bit_length() + 8)):
            return mpmath.ldexp(mpmath.mpf(x.numerator), -(den.bit_length() - 1))
    with mpmath.workprec(256):
        return mpmath.mpf(x.numerator) / x.denominator


def _fraction_upper(x: Fraction) -> mpmath.mpf:
    """A 64-bit float value that is >= x."""
    with mpmath.workprec(64):
        v = mpmath.mpf(x.numerator) / x.denominator
        return v * (1 + mpmath.mpf(2) ** -60)


# -- accumulation at -1 ---------------------------------------------------------

@dataclass(frozen=True)
class MinusOneBracket:
    n: int
    lo: Fraction
    hi: Fraction
    sign_lo: int
    sign_hi: int

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo


def root_near_minus_one(q_target, config: DensityConfig | None = None, cache: KnCache | None = None) -> MinusOneBracket:
    """Smallest n = 0, 3 (mod 4) with a root of Rel(K_n) in (-1, q_target), bracketed to width config.tol."""
    config = config or DensityConfig()
    cache = cache or default_cache()
    q = Fraction(str(q_target)) if isinstance(q_target, float) else Fraction(q_target)
    if not -1 < q < 0:
        raise InvalidTarget(f"q_target must lie in (-1, 0), got {q_target}")
    for n in range(3, config.n_max + 1):
        if n % 4 not in (0, 3):
            continue
        rel = rel_complete(n, cache)
        if sign_at_minus_one(complete_graph(n), rel) >= 0:
            continue
        if rel.sign_at(q) <= 0:
            continue
        lo, hi = Fraction(-1), q
        width = Fraction(config.tol)
        while hi - lo > width:
            mid = (lo + hi) / 2
            s = rel.sign_at(mid)
            if s == 0:
                lo = hi = mid
                break
            if s < 0:
                lo = mid
            else:
                hi = mid
        return MinusOneBracket(n, lo, hi, rel.sign_at(lo), rel.sign_at(hi))
    raise NotFound(f"no n <= {config.n_max} with a root of Rel(K_n) in (-1, {q_target})")


# -- batch ----------------------------------------------------------------------

def grid_targets(moduli=(0.3, 0.6, 0.9), angles: int = 8) -> list[complex]:
    out = []
    for r in moduli:
        for k in range(angles):
            th = 2 * math.pi * k / angles
            out.append(complex(round(r * math.cos(th), 15), round(r * math.sin(th), 15)))
    return out


def _worker(args):
    target, config, cache_dir = args
    set_default_cache(KnCache(cache_dir))
    try:
        return locate_root_near(target, config=config)
    except NotFound as exc:
        return exc


def locate_many(targets, config: DensityConfig | None = None, jobs: int = 1, cache: KnCache | None = None):
    """Certificates (or NotFound errors) for several targets, in input order.

    With ``jobs > 1`` targets run in worker processes that share the cache
    directory (if any) read-mostly.
    """
    config = config or DensityConfig()
    cache = cache or default_cache()
    if jobs > 1:
        work = [(t, config, cache.directory) for t in targets]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_worker, work))
    out = []
    for t in targets:
        try:
            out.append(locate_root_near(t, config=config, cache=cache))
        except NotFound as exc:
            out.append(exc)
    return out
