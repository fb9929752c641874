"""All complex roots of integer polynomials, real-root isolation, zero statistics.

``all_roots`` runs a simultaneous Aberth-Ehrlich iteration. The Newton
quotient p/p' is computed in fixed point at the working precision (see
:mod:`relroots.polyalg`), while the Aberth repulsion sum
``sum_j 1/(z_i - z_j)`` only needs double precision: it enters as a factor
``1/(1 - N*S)`` whose relative error of ~1e-16 does not limit the final
accuracy.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np
from gmpy2 import isqrt, mpz

from .errors import InvalidInput, InvalidParameter, NotDivisible, SolverFailure
from .polyalg import (
    ONE_MINUS_Q,
    ComplexApprox,
    content,
    IntPolynomial,
    fixed_error_bound,
    homogeneous_value,
    horner_fixed,
    horner_fixed_with_derivative,
    poly_divide_exact,
    poly_divmod,
    primitive_part,
)

log = logging.getLogger(__name__)

START_PRECISION = 256
MAX_PRECISION = 4096
ANGLE_OFFSET = 0.7853981633974483 / math.sqrt(2)  # irrational fraction of a turn


@dataclass(frozen=True)
class RootSet:
    roots: tuple[ComplexApprox, ...]
    residuals: tuple[mpmath.mpf, ...]
    deflated_unit_multiplicity: int
    source_degree: int
    multiplicity: tuple[int, ...]
    precision: int
    iterations: int

    def __post_init__(self):
        if len(self.roots) + self.deflated_unit_multiplicity != self.source_degree:
            raise InvalidInput("root count and deflated multiplicity must add up to the degree")

    def as_complex(self) -> np.ndarray:
        return np.array([complex(z) for z in self.roots])

    def max_residual(self) -> mpmath.mpf:
        return max(self.residuals, default=mpmath.mpf(0))


def deflate_unit_root(p: IntPolynomial, k: int) -> IntPolynomial:
    """Divide out (1 - q)**k exactly."""
    if k < 0:
        raise InvalidParameter("k must be nonnegative")
    for _ in range(k):
        try:
            p = poly_divide_exact(p, ONE_MINUS_Q)
        except NotDivisible:
            raise InvalidInput(f"(1 - q)^{k} does not divide the polynomial") from None
    return p


def unit_root_order(p: IntPolynomial) -> int:
    """Largest k with (1 - q)^k | p."""
    k = 0
    while not p.is_zero() and p(1) == 0:
        p = poly_divide_exact(p, ONE_MINUS_Q)
        k += 1
    return k


def fujiwara_bound(p: IntPolynomial) -> float:
    """2 max(|c_{d-1}/c_d|, |c_{d-2}/c_d|^(1/2), ..., |c_0/(2 c_d)|^(1/d))."""
    c = p.coeffs
    d = p.degree
    lead = math.log(abs(c[-1]))
    best = -math.inf
    for k in range(1, d + 1):
        ck = c[d - k]
        if ck == 0:
            continue
        val = math.log(abs(ck)) - lead
        if k == d:
            val -= math.log(2)
        best = max(best, val / k)
    return 2 * math.exp(best)


def _to_float(x, scale: int) -> float:
    return int(x) / (1 << scale) if scale >= 0 else float(int(x) << -scale)


def _float_coeffs(coeffs) -> np.ndarray:
    # common power-of-two scaling keeps every coefficient inside double range
    shift = max(0, max(int(c).bit_length() for c in coeffs) - 900)
    return np.array([int(c) / (1 << shift) for c in coeffs], dtype=float)


def _newton_ratio(cf: np.ndarray, z: np.ndarray) -> np.ndarray:
    """p(z)/p'(z) in double precision, via the reversed polynomial where |z| > 1."""
    d = len(cf) - 1
    out = np.empty_like(z)
    inner = np.abs(z) <= 1
    for mask, w, c in ((inner, z, cf[::-1]), (~inner, 1 / z, cf)):
        if not mask.any():
            continue
        x = w[mask]
        v = np.full(x.shape, c[0], dtype=complex)
        dv = np.zeros(x.shape, dtype=complex)
        for ck in c[1:]:
            dv = dv * x + v
            v = v * x + ck
        if mask is inner:
            out[mask] = v / dv
        else:
            # p(z) = z^d r(1/z), p'(z) = z^(d-1) (d r - r'(1/z)/z)
            out[mask] = z[mask] * v / (d * v - x * dv)
    return out


def _repulsion(z: np.ndarray) -> np.ndarray:
    diff = z[:, None] - z[None, :]
    np.fill_diagonal(diff, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = 1.0 / diff
    np.fill_diagonal(inv, 0.0)
    inv[~np.isfinite(inv)] = 0.0
    return inv.sum(axis=1)


def _coarse_aberth(coeffs, z: np.ndarray, max_iter: int) -> np.ndarray:
    """Double-precision Aberth pass that shrinks the seed circle onto the roots.

    Near the roots double evaluation drowns in cancellation, so the pass
    stops as soon as the outer radius stops contracting; the fixed-point
    iteration takes it from there.
    """
    cf = _float_coeffs(coeffs)
    z = z.copy()
    history = [float(np.abs(z).max())]
    with np.errstate(all="ignore"):
        for _ in range(max_iter):
            ratio = _newton_ratio(cf, z)
            w = ratio / (1 - ratio * _repulsion(z))
            w[~np.isfinite(w)] = 0
            z -= w
            history.append(float(np.abs(z).max()))
            if len(history) > 10 and history[-1] > (1 - 1e-3) * history[-11]:
                break
    return z


def _aberth(coeffs, zr, zi, scale, max_iter, active):
    """Fixed-point Aberth iteration in place; returns (iterations, still-moving roots)."""
    d = len(zr)
    floor = mpz(1) << 24  # steps below ~2^(24-scale) are rounding noise
    it = 0
    for it in range(1, max_iter + 1):
        approx = np.array([complex(_to_float(zr[i], scale), _to_float(zi[i], scale)) for i in range(d)])
        sums = _repulsion(approx)
        still = []
        for i in active:
            pr, pi, dr, di = horner_fixed_with_derivative(coeffs, zr[i], zi[i], scale)
            den = dr * dr + di * di
            if den == 0:
                zr[i] += mpz(1) << max(scale - 20, 0)
                still.append(i)
                continue
            nr = ((pr * dr + pi * di) << scale) // den
            ni = ((pi * dr - pr * di) << scale) // den
            ncomplex = complex(_to_float(nr, scale), _to_float(ni, scale))
            denom = 1.0 - ncomplex * sums[i]
            f = 1.0 / denom if denom != 0 else 1.0
            fr = mpz(int(f.real * 2.0 ** 60))
            fi = mpz(int(f.imag * 2.0 ** 60))
            wr = (nr * fr - ni * fi) >> 60
            wi = (nr * fi + ni * fr) >> 60
            zr[i] -= wr
            zi[i] -= wi
            step = abs(wr) + abs(wi)
            # evaluation noise ~ d |z|^d ulps, turned into a step size by 1/|p'|
            mod = abs(approx[i])
            noise = floor
            if mod <= 2:
                dmag = math.sqrt(_to_float(den, 2 * scale)) or 1e-300
                noise = max(floor, mpz(int(min(16 * d * max(1.0, mod) ** d / dmag, 2.0 ** 1000))))
            if step > noise:
                still.append(i)
        active = still
        if not active:
            break
    return it, active


def certified_residual(coeffs, degree, zr, zi, scale, shift: int = 0) -> mpmath.mpf:
    """Bound on ``|z**shift * q(z)|`` where ``coeffs`` are those of ``q``."""
    vr, vi = horner_fixed(coeffs, zr, zi, scale)
    err = fixed_error_bound(degree, zr, zi, scale)
    with mpmath.workprec(64):
        mag = mpmath.sqrt(mpmath.ldexp(int(vr * vr + vi * vi), -2 * scale))
        out = mag * (1 + mpmath.mpf(2) ** -50) + err
        if shift:
            # stripped zeros at the origin multiply the residual by |z|**shift
            rnum = int(isqrt(mpz(zr) ** 2 + mpz(zi) ** 2)) + 1
            out *= (mpmath.ldexp(rnum, -scale) * (1 + mpmath.mpf(2) ** -60)) ** shift
        return out


def _clusters(roots: list[complex], radius: float) -> list[int]:
    n = len(roots)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    arr = np.array(roots)
    for i in range(n):
        close = np.flatnonzero(np.abs(arr[i + 1:] - arr[i]) <= radius)
        for j in close:
            parent[find(i)] = find(int(j) + i + 1)
    sizes: dict[int, int] = {}
    for i in range(n):
        sizes[find(i)] = sizes.get(find(i), 0) + 1
    return [sizes[find(i)] for i in range(n)]


def all_roots(
    p: IntPolynomial,
    precision: int = START_PRECISION,
    tol: float = 1e-20,
    deflate_unit: int = 0,
    max_precision: int = MAX_PRECISION,
    max_iter: int = 400,
) -> RootSet:
    """All complex roots of ``p`` with certified residual bounds ``|p(z*)| <= tol``.

    ``deflate_unit`` removes that many exact factors (1 - q) first; they are
    recorded in the result instead of being solved for. Precision starts at
    ``precision`` bits and doubles on non-convergence up to ``max_precision``.
    """
    if p.degree < 1:
        raise InvalidParameter("need a polynomial of degree >= 1")
    source_degree = p.degree
    q = deflate_unit_root(p, deflate_unit)
    zeros_at_origin = 0
    while q.coeffs and q.coeffs[0] == 0:
        q = IntPolynomial(q.coeffs[1:])
        zeros_at_origin += 1
    d = q.degree
    coeffs = q.coeffs
    scale = precision
    if d >= 1:
        radius = fujiwara_bound(q)
        angles = [2 * math.pi * k / d + ANGLE_OFFSET for k in range(d)]
        seeds = np.array([radius * complex(math.cos(a), math.sin(a)) for a in angles])
        seeds = _coarse_aberth(coeffs, seeds, max_iter=50 * d)
        zr = [mpz(int(Fraction(z.real) * 2 ** scale)) for z in seeds]
        zi = [mpz(int(Fraction(z.imag) * 2 ** scale)) for z in seeds]
    else:
        zr, zi = [], []
    total_iter = 0
    active = list(range(d))
    while True:
        it, _ = _aberth(coeffs, zr, zi, scale, max_iter, active)
        total_iter += it
        residuals = [certified_residual(coeffs, d, zr[i], zi[i], scale, zeros_at_origin) for i in range(d)]
        bad = [i for i in range(d) if residuals[i] > tol]
        if not bad:
            break
        if scale * 2 > max_precision:
            partial = _rootset(zr, zi, residuals, scale, zeros_at_origin, deflate_unit, source_degree, tol, total_iter)
            raise SolverFailure(
                f"{len(bad)} of {d} roots above residual {tol} at {scale} bits", partial=partial
            )
        log.info("escalating root precision %d -> %d bits (%d roots pending)", scale, 2 * scale, len(bad))
        zr = [x << scale for x in zr]
        zi = [x << scale for x in zi]
        scale *= 2
        active = bad
    return _rootset(zr, zi, residuals, scale, zeros_at_origin, deflate_unit, source_degree, tol, total_iter)


def _rootset(zr, zi, residuals, scale, zeros_at_origin, deflated, source_degree, tol, iterations) -> RootSet:
    roots = [ComplexApprox.from_fixed(int(a), int(b), scale) for a, b in zip(zr, zi)]
    res = list(residuals)
    roots += [ComplexApprox.from_fixed(0, 0, scale)] * zeros_at_origin
    res += [mpmath.mpf(0)] * zeros_at_origin
    mult = _clusters([complex(z) for z in roots], 1e3 * tol)
    return RootSet(tuple(roots), tuple(res), deflated, source_degree, tuple(mult), scale, iterations)


def vieta_check(p: IntPolynomial, rs: RootSet, tol: float) -> bool:
    """Compare root sum and product (deflated unit roots included) with the coefficients."""
    c = p.coeffs
    d = p.degree
    if rs.source_degree != d:
        return False
    with mpmath.workprec(max(rs.precision, 128)):
        zs = [z.to_mpc() for z in rs.roots] + [mpmath.mpc(1)] * rs.deflated_unit_multiplicity
        total = mpmath.fsum(zs)
        prod = mpmath.fprod(zs)
        want_sum = -mpmath.mpf(c[d - 1]) / c[d]
        want_prod = (-1) ** d * mpmath.mpf(c[0]) / c[d]
        ok_sum = abs(total - want_sum) <= tol * max(1, abs(want_sum))
        ok_prod = abs(prod - want_prod) <= tol * max(1, abs(want_prod))
        return bool(ok_sum and ok_prod)


def conjugate_symmetric(rs: RootSet, tol: float) -> bool:
    """True if the roots pair up with their conjugates within ``tol``."""
    pts = [complex(z) for z in rs.roots]
    unused = list(range(len(pts)))
    while unused:
        i = unused.pop()
        target = pts[i].conjugate()
        if abs(pts[i].imag) <= tol:
            continue
        best = min(unused, key=lambda j: abs(pts[j] - target), default=None)
        if best is None or abs(pts[best] - target) > tol:
            return False
        unused.remove(best)
    return True


# -- real roots ---------------------------------------------------------------

def squarefree_part(p: IntPolynomial) -> IntPolynomial:
    g = polynomial_gcd(p, p.derivative())
    if g.degree <= 0:
        return primitive_part(p)
    return primitive_part(poly_divide_exact(primitive_part(p), g))


def _prem_positive(a: IntPolynomial, b: IntPolynomial) -> IntPolynomial:
    """Remainder of |lc(b)|^(deg a - deg b + 1) * a by b (sign-preserving pseudo-remainder)."""
    delta = a.degree - b.degree + 1
    scaled = a * (abs(b.coeffs[-1]) ** delta)
    _, r = poly_divmod(scaled, b)
    return r


def polynomial_gcd(a: IntPolynomial, b: IntPolynomial) -> IntPolynomial:
    """Primitive gcd over the integers (primitive pseudo-remainder sequence)."""
    a, b = primitive_part(a), primitive_part(b)
    if a.degree < b.degree:
        a, b = b, a
    while not b.is_zero():
        r = _prem_positive(a, b)
        a, b = b, primitive_part(r)
    return primitive_part(a)


def _positive_primitive(p: IntPolynomial) -> IntPolynomial:
    g = content(p)
    return p if g <= 1 else IntPolynomial(c // g for c in p.coeffs)


def sturm_sequence(p: IntPolynomial) -> list[IntPolynomial]:
    """Sturm chain p, p', -prem(...), ... with positive content removed at each step."""
    seq = [p, _positive_primitive(p.derivative())]
    while seq[-1].degree > 0:
        r = _prem_positive(seq[-2], seq[-1])
        if r.is_zero():
            break
        seq.append(_positive_primitive(-r))
    return seq


def _variations(seq: list[IntPolynomial], x: Fraction) -> int:
    signs = []
    for s in seq:
        v = homogeneous_value(s, x.numerator, x.denominator)
        if v:
            signs.append(v > 0)
    return sum(1 for u, v in zip(signs, signs[1:]) if u != v)


@dataclass(frozen=True)
class RealRoot:
    lo: Fraction
    hi: Fraction

    @property
    def value(self) -> float:
        return float((self.lo + self.hi) / 2)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo


def real_roots_in_interval(p: IntPolynomial, lo, hi, tol=Fraction(1, 2**40)) -> list[RealRoot]:
    """Every distinct real root in [lo, hi], each bracketed to width <= tol.

    Isolation uses Sturm counts of the square-free part; once an interval
    holds exactly one (simple) root it is refined by sign bisection with exact
    rational evaluations.
    """
    lo, hi, tol = Fraction(lo), Fraction(hi), Fraction(tol)
    if not lo < hi:
        raise InvalidParameter("need lo < hi")
    if p.is_zero():
        raise InvalidParameter("the zero polynomial has no isolated roots")
    if p.degree < 1:
        return []
    s = squarefree_part(p)
    seq = sturm_sequence(s)
    found: list[RealRoot] = []
    if s.sign_at(lo) == 0:
        found.append(RealRoot(lo, lo))
    work = [(lo, hi, _variations(seq, lo) - _variations(seq, hi))]
    while work:
        a, b, k = work.pop()
        if k == 0:
            continue
        if k == 1:
            found.append(_refine(s, a, b, tol))
            continue
        mid = (a + b) / 2
        vm = _variations(seq, mid)
        work.append((a, mid, _variations(seq, a) - vm))
        work.append((mid, b, vm - _variations(seq, b)))
    return sorted(found, key=lambda r: r.lo)


def _refine(s: IntPolynomial, a: Fraction, b: Fraction, tol: Fraction) -> RealRoot:
    """Shrink (a, b] holding one simple root of s to width <= tol."""
    sb = s.sign_at(b)
    if sb == 0:
        return RealRoot(b, b)
    while b - a > tol:
        mid = (a + b) / 2
        sm = s.sign_at(mid)
        if sm == 0:
            return RealRoot(mid, mid)
        if sm == sb:
            b = mid
        else:
            a = mid
    return RealRoot(a, b)


# -- zero statistics and export -----------------------------------------------

@dataclass(frozen=True)
class ZeroSummary:
    modulus_edges: np.ndarray
    modulus_mass: np.ndarray
    angle_edges: np.ndarray
    angle_mass: np.ndarray
    max_modulus_nonunit: float
    min_modulus: float
    degree: int


def zero_counting_summary(rs: RootSet, bins: int = 16, include_deflated: bool = True) -> ZeroSummary:
    """Histograms of |z| and arg z for the zero-counting measure (mass 1/degree per root)."""
    if not rs.roots and not rs.deflated_unit_multiplicity:
        raise InvalidParameter("empty root set")
    pts = list(rs.as_complex())
    if include_deflated:
        pts += [1 + 0j] * rs.deflated_unit_multiplicity
    pts = np.array(pts)
    d = len(pts)
    w = np.full(d, 1.0 / d)
    mods = np.abs(pts)
    m_edges = np.linspace(0.0, max(1.0, float(mods.max())), bins + 1)
    m_mass, _ = np.histogram(mods, bins=m_edges, weights=w)
    # bins are centred on multiples of 2 pi / bins so roots of unity never sit on an edge
    half = math.pi / bins
    a_edges = np.linspace(-math.pi - half, math.pi - half, bins + 1)
    angles = np.angle(pts)
    angles = np.where(angles >= math.pi - half, angles - 2 * math.pi, angles)
    a_mass, _ = np.histogram(angles, bins=a_edges, weights=w)
    solved = rs.as_complex()
    return ZeroSummary(
        modulus_edges=m_edges,
        modulus_mass=m_mass,
        angle_edges=a_edges,
        angle_mass=a_mass,
        max_modulus_nonunit=float(np.abs(solved).max()) if len(solved) else 0.0,
        min_modulus=float(mods.min()),
        degree=d,
    )


def roots_to_csv(rs: RootSet) -> str:
    """``re,im`` per line, no header."""
    return "".join(f"{float(z.real)!r},{float(z.imag)!r}\n" for z in rs.roots)


def roots_to_svg(rs: RootSet, size: int = 480, window: float = 1.15) -> str:
    """Standalone scatter of the roots with the unit circle, axes fixed to [-window, window]^2."""
    scale = size / (2 * window)

    def px(x: float, y: float) -> tuple[float, float]:
        return (x + window) * scale, (window - y) * scale

    cx, cy = px(0, 0)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
        f'<line x1="0" y1="{cy:.2f}" x2="{size}" y2="{cy:.2f}" stroke="black" stroke-width="0.8"/>',
        f'<line x1="{cx:.2f}" y1="0" x2="{cx:.2f}" y2="{size}" stroke="black" stroke-width="0.8"/>',
        f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="{scale:.2f}" fill="none" stroke="black" stroke-width="1.5"/>',
    ]
    for z in rs.as_complex():
        if abs(z.real) <= window and abs(z.imag) <= window:
            x, y = px(z.real, z.imag)
            parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="1.6" fill="red"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
