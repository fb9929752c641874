"""Convergence diagnostics for Rel(K_n) -> 1 and sRel(K_n)/q^(n-1) -> 2 inside the disk."""

from __future__ import annotations

import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .errors import InvalidParameter, PrecisionExhausted
from .kncache import KnCache, default_cache
from .polyalg import fixed_error_bound, horner_fixed
from .relcore import rel_complete, srel_complete

WORKPREC = 256
MAX_ESCALATIONS = 8


def _rho(rho, closed_zero: bool = True) -> mpmath.mpf:
    if isinstance(rho, Fraction):
        r = mpmath.mpf(rho.numerator) / rho.denominator
    else:
        r = mpmath.mpf(rho)
    if not (0 <= r < 1) or (not closed_zero and r == 0):
        raise InvalidParameter(f"rho must lie in [0, 1), got {rho}")
    return r


def seq_a(n: int, rho, prec: int = WORKPREC) -> mpmath.mpf:
    """a_n = sum_{s=1}^{n-1} C(n-1, s-1) rho^(s(n-s))."""
    if n < 2:
        raise InvalidParameter("a_n is defined for n >= 2")
    with mpmath.workprec(prec):
        r = _rho(rho)
        return mpmath.fsum(math.comb(n - 1, s - 1) * r ** (s * (n - s)) for s in range(1, n))


def seq_b(n: int, rho, prec: int = WORKPREC) -> mpmath.mpf:
    """b_n = sum_{s=2}^{n-2} C(n-2, s-1) rho^(s(n-s)-(n-1))."""
    if n < 4:
        raise InvalidParameter("b_n is defined for n >= 4")
    with mpmath.workprec(prec):
        r = _rho(rho)
        return mpmath.fsum(
            math.comb(n - 2, s - 1) * r ** (s * (n - s) - (n - 1)) for s in range(2, n - 1)
        )


def bound_b(n: int, rho, prec: int = WORKPREC) -> mpmath.mpf:
    """2 (exp(n rho^(n/2)) - 1), an upper bound for b_{n+2}."""
    if n < 2:
        raise InvalidParameter("the bound is stated for n >= 2")
    with mpmath.workprec(prec):
        r = _rho(rho)
        return 2 * mpmath.expm1(n * r ** (mpmath.mpf(n) / 2))


def gilbert_ratio(n: int, q: Fraction) -> Fraction:
    """|1 - Rel(K_n; q) - n q^(n-1)|^2 / (n^4 |q|^(3n)), exact.

    The square root of this is the constant needed in the expansion
    Rel(K_n; q) = 1 - n q^(n-1) + O(n^2 q^(3n/2)).
    """
    q = Fraction(q)
    r = rel_complete(n)
    dev = 1 - r(q) - n * q ** (n - 1)
    return dev * dev / (Fraction(n) ** 4 * abs(q) ** (3 * n))


@dataclass
class ConvergenceReport:
    rho: float
    n_values: list[int]
    alpha: list[float]
    beta: list[float]
    sample_count: int
    point_count: int
    precision: int
    lowest_srel_coefficient: list[int] = field(default_factory=list)
    alpha_tol: float | None = None
    beta_tol: float | None = None

    def first_below(self, which: str, tol: float) -> int | None:
        """Smallest n after which the sequence stays below ``tol`` for the rest of the range."""
        seq = getattr(self, which)
        first = None
        for n, x in zip(self.n_values, seq):
            if x < tol:
                first = n if first is None else first
            else:
                first = None
        return first

    @property
    def converged(self) -> bool:
        ok = True
        if self.alpha_tol is not None:
            ok &= self.first_below("alpha", self.alpha_tol) is not None
        if self.beta_tol is not None:
            ok &= self.first_below("beta", self.beta_tol) is not None
        return ok

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# precision={self.precision} rho={self.rho} samples={self.point_count}\n")
        buf.write("n,alpha,beta\n")
        for n, a, b in zip(self.n_values, self.alpha, self.beta):
            buf.write(f"{n},{a:.6e},{b:.6e}\n")
        return buf.getvalue()


def sample_points(rho: float, sample_count: int) -> list[complex]:
    """Deterministic grid: two circles (radius rho/2, rho) plus +-rho, +-rho/2."""
    # angle offset fixed by (rho, sample_count) so grids are reproducible
    offset = math.fmod(0.6180339887498949 * sample_count + rho, 1.0)
    pts = []
    for radius in (rho / 2, rho):
        for k in range(sample_count):
            th = 2 * math.pi * (k + offset) / sample_count
            pts.append(complex(radius * math.cos(th), radius * math.sin(th)))
        pts.extend([complex(radius, 0), complex(-radius, 0)])
    return pts


def _to_fixed_inside(z: complex, scale: int) -> tuple[int, int]:
    # truncate toward zero so the dyadic point never leaves the disk
    return int(Fraction(z.real) * 2 ** scale), int(Fraction(z.imag) * 2 ** scale)


def _scan_one(n: int, points: list[complex], precision: int, cache: KnCache) -> tuple[float, float, int]:
    rel = rel_complete(n, cache)
    srel = srel_complete(n, cache)
    alpha = 0.0
    beta = 0.0
    for z in points:
        scale = precision
        zr, zi = _to_fixed_inside(z, scale)
        vr, vi = horner_fixed(rel.coeffs, zr, zi, scale)
        err = fixed_error_bound(rel.degree, zr, zi, scale)
        with mpmath.workprec(precision + 64):
            dev = abs(mpmath.mpc(mpmath.ldexp(vr, -scale) - 1, mpmath.ldexp(vi, -scale))) + err
        alpha = max(alpha, float(dev))
        if zr == 0 and zi == 0:
            continue
        for _ in range(MAX_ESCALATIONS):
            zr, zi = _to_fixed_inside(z, scale)
            sr, si = horner_fixed(srel.coeffs, zr, zi, scale)
            err = fixed_error_bound(srel.degree, zr, zi, scale)
            with mpmath.workprec(scale + 64):
                w = mpmath.mpc(mpmath.ldexp(zr, -scale), mpmath.ldexp(zi, -scale))
                denom = abs(w) ** (n - 1)
                rel_err = err / denom
                if rel_err < mpmath.mpf(2) ** -40:
                    val = mpmath.mpc(mpmath.ldexp(sr, -scale), mpmath.ldexp(si, -scale)) / w ** (n - 1)
                    beta = max(beta, float(abs(val - 2) + rel_err))
                    break
            scale *= 2
        else:
            raise PrecisionExhausted(f"cannot resolve sRel(K_{n})/q^{n - 1} near |q| = {abs(z)}")
    low = next((c for c in srel.coeffs if c), 0)
    return alpha, beta, low


def convergence_scan(
    rho: float,
    n_max: int,
    sample_count: int = 32,
    precision: int = 128,
    n_min: int = 2,
    alpha_tol: float | None = None,
    beta_tol: float | None = None,
    cache: KnCache | None = None,
    jobs: int = 1,
) -> ConvergenceReport:
    """Measure alpha_n = sup |Rel(K_n; q) - 1| and beta_n = sup |sRel(K_n; q)/q^(n-1) - 2|."""
    rho = float(rho)
    if not 0 < rho < 1:
        raise InvalidParameter(f"rho must lie in (0, 1), got {rho}")
    if n_max < n_min or n_min < 2:
        raise InvalidParameter("need 2 <= n_min <= n_max")
    cache = cache or default_cache()
    rel_complete(n_max, cache)
    points = sample_points(rho, sample_count)
    ns = list(range(n_min, n_max + 1))
    work = lambda n: _scan_one(n, points, precision, cache)  # noqa: E731
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(work, ns))
    else:
        rows = [work(n) for n in ns]
    return ConvergenceReport(
        rho=rho,
        n_values=ns,
        alpha=[r[0] for r in rows],
        beta=[r[1] for r in rows],
        sample_count=sample_count,
        point_count=len(points),
        precision=precision,
        lowest_srel_coefficient=[r[2] for r in rows],
        alpha_tol=alpha_tol,
        beta_tol=beta_tol,
    )
