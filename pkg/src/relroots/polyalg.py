"""Exact integer polynomials in one variable and rigorous complex evaluation.

Coefficients are Python integers in ascending order and are stored in
canonical form (no trailing zeros; the zero polynomial has no coefficients).
Large products go through Kronecker substitution so that the actual
multiplication happens inside GMP.

Complex evaluation works in fixed point: the evaluation point is a Gaussian
dyadic rational ``(zr + i*zi) / 2**scale`` and every Horner step is carried
out on integers, truncating back to ``scale`` fractional bits. The absolute
error therefore does not depend on the size of the coefficients, only on the
degree, ``|z|`` and ``scale``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

import gmpy2
import mpmath
from gmpy2 import mpz

from .errors import InvalidInput, InvalidParameter, NotDivisible

Rational = Union[int, Fraction]

_SCHOOLBOOK_CUTOFF = 24


class IntPolynomial:
    """Immutable polynomial with integer coefficients in the variable q."""

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs: Iterable[int] = ()):
        c = [int(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs: tuple[int, ...] = tuple(c)
        self._hash = None

    @classmethod
    def monomial(cls, k: int, c: int = 1) -> "IntPolynomial":
        if k < 0:
            raise InvalidParameter("negative exponent")
        return cls([0] * k + [c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, k: int) -> int:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __len__(self) -> int:
        return len(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = IntPolynomial([other])
        if not isinstance(other, IntPolynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.coeffs)
        return self._hash

    def __repr__(self) -> str:
        if len(self.coeffs) > 12:
            return f"IntPolynomial(degree={self.degree})"
        return f"IntPolynomial({list(self.coeffs)})"

    def __str__(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if k == 0 else f"{c}*q" if k == 1 else f"{c}*q^{k}")
        return " + ".join(terms).replace("+ -", "- ") if terms else "0"

    def __neg__(self) -> "IntPolynomial":
        return IntPolynomial(-c for c in self.coeffs)

    def __add__(self, other) -> "IntPolynomial":
        if isinstance(other, int):
            other = IntPolynomial([other])
        if not isinstance(other, IntPolynomial):
            return NotImplemented
        return poly_add(self, other)

    __radd__ = __add__

    def __sub__(self, other) -> "IntPolynomial":
        if isinstance(other, int):
            other = IntPolynomial([other])
        if not isinstance(other, IntPolynomial):
            return NotImplemented
        return poly_add(self, -other)

    def __rsub__(self, other) -> "IntPolynomial":
        return (-self) + other

    def __mul__(self, other) -> "IntPolynomial":
        if isinstance(other, int):
            return IntPolynomial(other * c for c in self.coeffs)
        if not isinstance(other, IntPolynomial):
            return NotImplemented
        return poly_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "IntPolynomial":
        return poly_pow(self, k)

    def __call__(self, x: Rational) -> Rational:
        """Exact value at an integer or rational point."""
        if isinstance(x, Fraction):
            num, den = x.numerator, x.denominator
            h = homogeneous_value(self, num, den)
            return Fraction(h, den ** max(self.degree, 0))
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def sign_at(self, x: Rational) -> int:
        """Exact sign of the value at a rational point."""
        if isinstance(x, Fraction):
            h = homogeneous_value(self, x.numerator, x.denominator)
        else:
            h = self(x)
        return (h > 0) - (h < 0)

    def shift(self, k: int) -> "IntPolynomial":
        return poly_shift(self, k)

    def derivative(self) -> "IntPolynomial":
        return poly_derivative(self)

    def max_bits(self) -> int:
        return max((abs(c).bit_length() for c in self.coeffs), default=0)


ZERO = IntPolynomial()
ONE = IntPolynomial([1])
Q = IntPolynomial([0, 1])
ONE_MINUS_Q = IntPolynomial([1, -1])


def homogeneous_value(p: IntPolynomial, num: int, den: int) -> int:
    """Return ``den**deg * p(num/den)`` as an exact integer."""
    c = p.coeffs
    if not c:
        return 0
    h = mpz(c[-1])
    dpow = mpz(1)
    num, den = mpz(num), mpz(den)
    for ck in reversed(c[:-1]):
        dpow *= den
        h = h * num + ck * dpow
    return int(h)


def poly_add(a: IntPolynomial, b: IntPolynomial) -> IntPolynomial:
    if len(a) < len(b):
        a, b = b, a
    out = list(a.coeffs)
    for k, c in enumerate(b.coeffs):
        out[k] += c
    return IntPolynomial(out)


def poly_shift(a: IntPolynomial, k: int) -> IntPolynomial:
    """Multiply by q**k."""
    if k < 0:
        raise InvalidParameter(f"shift must be nonnegative, got {k}")
    if a.is_zero():
        return a
    return IntPolynomial((0,) * k + a.coeffs)


def poly_derivative(p: IntPolynomial) -> IntPolynomial:
    return IntPolynomial(k * c for k, c in enumerate(p.coeffs) if k)


def poly_pow(a: IntPolynomial, k: int) -> IntPolynomial:
    if k < 0:
        raise InvalidParameter(f"power must be nonnegative, got {k}")
    result, base = ONE, a
    while k:
        if k & 1:
            result = poly_mul(result, base)
        k >>= 1
        if k:
            base = poly_mul(base, base)
    return result


def poly_mul(a: IntPolynomial, b: IntPolynomial) -> IntPolynomial:
    if a.is_zero() or b.is_zero():
        return ZERO
    if min(len(a), len(b)) <= _SCHOOLBOOK_CUTOFF:
        return _schoolbook(a.coeffs, b.coeffs)
    return poly_sum_of_products([(1, a, b, 0)])


def _schoolbook(a: Sequence[int], b: Sequence[int]) -> IntPolynomial:
    if len(a) < len(b):
        a, b = b, a
    out = [0] * (len(a) + len(b) - 1)
    for j, bj in enumerate(b):
        if bj:
            for i, ai in enumerate(a):
                out[i + j] += ai * bj
    return IntPolynomial(out)


# -- Kronecker substitution -------------------------------------------------

def _pack(coeffs: Sequence[int], nbytes: int) -> mpz:
    """Evaluate at 2**(8*nbytes) for coefficients with |c| < 2**(8*nbytes-1)."""
    half = 1 << (8 * nbytes - 1)
    raw = b"".join((c + half).to_bytes(nbytes, "little") for c in coeffs)
    offset = _offset(len(coeffs), nbytes)
    return mpz(int.from_bytes(raw, "little")) - offset


def _offset(count: int, nbytes: int) -> mpz:
    return mpz(int.from_bytes((b"\x00" * (nbytes - 1) + b"\x80") * count, "little"))


def _unpack(x: mpz, count: int, nbytes: int) -> list[int]:
    half = 1 << (8 * nbytes - 1)
    y = x + _offset(count, nbytes)
    if y < 0 or y.bit_length() > 8 * nbytes * count:
        raise ArithmeticError("Kronecker slot overflow")
    raw = int(y).to_bytes(nbytes * count, "little")
    return [
        int.from_bytes(raw[k * nbytes:(k + 1) * nbytes], "little") - half
        for k in range(count)
    ]


def poly_sum_of_products(
    terms: Sequence[tuple[int, IntPolynomial, IntPolynomial, int]],
) -> IntPolynomial:
    """Exact ``sum(c * a * b * q**shift)`` over the terms, with one packing width.

    Every product is formed by a single big-integer multiplication after
    evaluating both factors at a power of two wide enough to hold any
    coefficient of the final sum.
    """
    terms = [t for t in terms if t[0] and not t[1].is_zero() and not t[2].is_zero()]
    if not terms:
        return ZERO
    length = max(len(a) + len(b) - 1 + s for _, a, b, s in terms)
    bound = 0
    for c, a, b, _ in terms:
        bound += abs(c) * min(len(a), len(b)) << (a.max_bits() + b.max_bits())
    nbytes = (bound.bit_length() + 2 + 7) // 8
    total = mpz(0)
    packed: dict[int, mpz] = {}
    for c, a, b, s in terms:
        pa = packed.get(id(a))
        if pa is None:
            pa = packed[id(a)] = _pack(a.coeffs, nbytes)
        pb = pa if b is a else packed.get(id(b))
        if pb is None:
            pb = packed[id(b)] = _pack(b.coeffs, nbytes)
        total += (c * (pa * pb)) << (8 * nbytes * s)
    return IntPolynomial(_unpack(total, length, nbytes))


def poly_divmod(p: IntPolynomial, d: IntPolynomial) -> tuple[IntPolynomial, IntPolynomial]:
    """Long division over the integers; raises if a quotient coefficient is not integral."""
    if d.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    rem = list(p.coeffs)
    dc = d.coeffs
    lc = dc[-1]
    m = len(dc) - 1
    if len(rem) - 1 < m:
        return ZERO, p
    quot = [0] * (len(rem) - m)
    for k in range(len(rem) - 1, m - 1, -1):
        c = rem[k]
        if c == 0:
            continue
        qk, r = divmod(c, lc)
        if r:
            raise NotDivisible(f"leading coefficient {lc} does not divide {c}")
        quot[k - m] = qk
        for j, dj in enumerate(dc):
            rem[k - m + j] -= qk * dj
    return IntPolynomial(quot), IntPolynomial(rem)


def _divide_one_minus_q(p: IntPolynomial) -> IntPolynomial:
    # p = (1 - q) * s  <=>  s_0 = p_0, s_k = p_k + s_{k-1}, and the top carry vanishes
    s = []
    acc = 0
    for c in p.coeffs[:-1]:
        acc += c
        s.append(acc)
    if p.coeffs and acc + p.coeffs[-1] != 0:
        raise NotDivisible("1 - q does not divide the polynomial")
    return IntPolynomial(s)


def poly_divide_exact(p: IntPolynomial, d: IntPolynomial) -> IntPolynomial:
    if d == ONE_MINUS_Q:
        return _divide_one_minus_q(p)
    quot, rem = poly_divmod(p, d)
    if not rem.is_zero():
        raise NotDivisible("nonzero remainder")
    return quot


def content(p: IntPolynomial) -> int:
    g = 0
    for c in p.coeffs:
        g = math.gcd(g, c)
    return g


def primitive_part(p: IntPolynomial) -> IntPolynomial:
    g = content(p)
    if g in (0, 1):
        return p
    if p.coeffs[-1] < 0:
        g = -g
    return IntPolynomial(c // g for c in p.coeffs)


# -- text format --------------------------------------------------------------

def format_poly_text(p: IntPolynomial) -> str:
    lines = [f"degree {p.degree}"]
    lines.extend(str(c) for c in p.coeffs)
    return "\n".join(lines) + "\n"


def parse_poly_text(text: str) -> IntPolynomial:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("degree"):
        raise InvalidInput("polynomial text must start with 'degree d'")
    try:
        d = int(lines[0].split()[1])
        coeffs = [int(x) for x in lines[1:]]
    except (IndexError, ValueError) as exc:
        raise InvalidInput(f"malformed polynomial text: {exc}") from None
    if len(coeffs) != d + 1:
        raise InvalidInput(f"degree {d} needs {d + 1} coefficients, found {len(coeffs)}")
    p = IntPolynomial(coeffs)
    if p.degree != d:
        raise InvalidInput(f"declared degree {d} but leading coefficient is zero")
    return p


# -- multiprecision complex values ------------------------------------------

def _exact_mpf(man: int, exp: int) -> mpmath.mpf:
    with mpmath.workprec(max(53, int(man).bit_length() + 2)):
        return mpmath.mpf((int(man), int(exp)))


@dataclass(frozen=True)
class ComplexApprox:
    """Complex number with multiprecision parts carried at ``precision_bits``."""

    real: mpmath.mpf
    imag: mpmath.mpf
    precision_bits: int = 53

    def __post_init__(self):
        if self.precision_bits < 53:
            raise InvalidParameter("precision_bits must be at least 53")
        if not (mpmath.isfinite(self.real) and mpmath.isfinite(self.imag)):
            raise InvalidParameter("ComplexApprox components must be finite")

    @classmethod
    def from_value(cls, z, precision_bits: int = 256) -> "ComplexApprox":
        with mpmath.workprec(precision_bits):
            if isinstance(z, Fraction):
                w = mpmath.mpc(mpmath.mpf(z.numerator) / z.denominator)
            elif isinstance(z, tuple):
                w = mpmath.mpc(*z)
            else:
                w = mpmath.mpc(z)
            return cls(+w.real, +w.imag, precision_bits)

    @classmethod
    def from_fixed(cls, zr: int, zi: int, scale: int, precision_bits: int | None = None) -> "ComplexApprox":
        """Exact value ``(zr + i*zi) / 2**scale``."""
        return cls(_exact_mpf(zr, -scale), _exact_mpf(zi, -scale), precision_bits or max(53, scale))

    def to_mpc(self) -> mpmath.mpc:
        return mpmath.mpc(self.real, self.imag)

    def __complex__(self) -> complex:
        return complex(float(self.real), float(self.imag))

    def __abs__(self) -> mpmath.mpf:
        with mpmath.workprec(self.precision_bits):
            return mpmath.hypot(self.real, self.imag)

    def with_precision(self, bits: int) -> "ComplexApprox":
        return ComplexApprox(self.real, self.imag, bits)

    def exact_scale(self) -> int:
        """Smallest number of fractional bits representing this value exactly."""
        s = 0
        for x in (self.real, self.imag):
            if x:
                _, e = x.man_exp
                s = max(s, -int(e))
        return s

    def to_fixed(self, scale: int) -> tuple[int, int]:
        """Round to nearest Gaussian integer multiple of 2**-scale."""
        return _mpf_to_fixed(self.real, scale), _mpf_to_fixed(self.imag, scale)


def _signed_man_exp(x: mpmath.mpf) -> tuple[int, int]:
    # mpf.man_exp drops the sign, so read the raw tuple
    sign, man, exp, _ = x._mpf_
    return (-int(man) if sign else int(man)), int(exp)


def _mpf_to_fixed(x: mpmath.mpf, scale: int) -> int:
    if not x:
        return 0
    man, exp = _signed_man_exp(x)
    exp += scale
    if exp >= 0:
        return man << exp
    # round half up on the dropped bits
    return (man + (1 << (-exp - 1))) >> -exp


def fixed_from_mpc(w: mpmath.mpc, scale: int) -> tuple[int, int]:
    return _mpf_to_fixed(mpmath.mpf(w.real), scale), _mpf_to_fixed(mpmath.mpf(w.imag), scale)


def horner_fixed(coeffs: Sequence[int], zr: int, zi: int, scale: int) -> tuple[mpz, mpz]:
    """Fixed-point Horner at ``(zr + i zi)/2**scale``; result has ``scale`` fractional bits."""
    if not coeffs:
        return mpz(0), mpz(0)
    zr, zi = mpz(zr), mpz(zi)
    ar = mpz(coeffs[-1]) << scale
    ai = mpz(0)
    for c in reversed(coeffs[:-1]):
        ar, ai = ((ar * zr - ai * zi) >> scale) + (mpz(c) << scale), (ar * zi + ai * zr) >> scale
    return ar, ai


def horner_fixed_with_derivative(
    coeffs: Sequence[int], zr: int, zi: int, scale: int
) -> tuple[mpz, mpz, mpz, mpz]:
    """Values of p and p' in fixed point (the derivative is not error-bounded)."""
    if not coeffs:
        return mpz(0), mpz(0), mpz(0), mpz(0)
    zr, zi = mpz(zr), mpz(zi)
    ar = mpz(coeffs[-1]) << scale
    ai = mpz(0)
    dr = mpz(0)
    di = mpz(0)
    for c in reversed(coeffs[:-1]):
        dr, di = ((dr * zr - di * zi) >> scale) + ar, ((dr * zi + di * zr) >> scale) + ai
        ar, ai = ((ar * zr - ai * zi) >> scale) + (mpz(c) << scale), (ar * zi + ai * zr) >> scale
    return ar, ai, dr, di


def fixed_error_bound(degree: int, zr: int, zi: int, scale: int) -> mpmath.mpf:
    """Upper bound on the absolute error of :func:`horner_fixed`.

    Each of the ``degree`` truncating multiplications perturbs the
    accumulator by less than ``sqrt(2) * 2**-scale`` and that error is then
    multiplied by ``z`` in every later step, giving
    ``sqrt(2) * 2**-scale * sum_{k<degree} |z|**k``.
    """
    if degree <= 0:
        return mpmath.mpf(0)
    # |z| <= (isqrt(zr^2+zi^2)+1) / 2^scale
    rnum = int(gmpy2.isqrt(mpz(zr) ** 2 + mpz(zi) ** 2)) + 1
    with mpmath.workprec(64):
        r = _exact_mpf(rnum, -scale) * (1 + mpmath.mpf(2) ** -60)
        if abs(r - 1) < mpmath.mpf(2) ** -40:
            geo = degree * mpmath.mpf(r) ** degree
        elif r < 1:
            geo = (1 - r ** degree) / (1 - r)
        else:
            geo = (r ** degree - 1) / (r - 1)
        return mpmath.sqrt(2) * geo * mpmath.ldexp(1, -scale) * (1 + mpmath.mpf(10) ** -10)


def poly_eval_complex(
    p: IntPolynomial, z: ComplexApprox, precision: int | None = None
) -> tuple[ComplexApprox, mpmath.mpf]:
    """Evaluate ``p`` at the exact value of ``z``.

    Returns the fixed-point value and an upper bound on its absolute error.
    ``precision`` (default ``z.precision_bits``) is the number of fractional
    bits kept between Horner steps; it is raised if ``z`` itself needs more
    bits to be represented exactly.
    """
    bits = precision or z.precision_bits
    scale = max(bits, z.exact_scale())
    zr, zi = z.to_fixed(scale)
    vr, vi = horner_fixed(p.coeffs, zr, zi, scale)
    bound = fixed_error_bound(p.degree, zr, zi, scale)
    return ComplexApprox.from_fixed(int(vr), int(vi), scale, bits), bound
