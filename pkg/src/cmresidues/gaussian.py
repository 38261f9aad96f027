"""Arithmetic in Z[i]: primary prime divisors and quartic residue symbols.

A Gaussian integer a+bi of odd norm is *primary* when a is odd, b is even
and a + b ≡ 1 (mod 4); equivalently a+bi ≡ 1 (mod (1+i)^3).  Every element
of odd norm has exactly one primary associate, and the conjugate of a
primary element is again primary, so for a split rational prime
p ≡ 1 (mod 4) there are exactly two primary divisors of p and they are
conjugate.  ``split_prime`` returns the one with positive imaginary part:

>>> str(split_prime(13))
'3+2i'
>>> str(split_prime(5))
'-1+2i'
>>> str(split_prime(17))
'1+4i'

The quartic residue symbol (x/π)_4 for π of prime norm p is the unique
power of i congruent to x^((p-1)/4) mod π; concretely we work in the residue
field F_p = Z[i]/(π), where i maps to r = -a/b mod p, and read off which of
{1, r, -1, -r} the Euler power equals.  Closed forms evaluated here without
any modular exponentiation:

* ``closed_form_odd_factor``: (ℓ/π)_4 ∈ {±1} for an odd prime ℓ dividing a;
* ``closed_form_two``: (2/π)_4 = (-i)^(b/2);
* ``closed_form_trace_symbol``: the quartic symbol of the Frobenius trace of
  the quartic-twist family y² = x³ - tx at p, as an explicit function of
  (a, b, (t/π)_4) alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from .primes import Rational, jacobi, sqrt_mod


@dataclass(frozen=True)
class GaussInt:
    re: int
    im: int

    def __add__(self, other: "GaussInt") -> "GaussInt":
        return GaussInt(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussInt") -> "GaussInt":
        return GaussInt(self.re - other.re, self.im - other.im)

    def __mul__(self, other: "GaussInt") -> "GaussInt":
        a, b, c, d = self.re, self.im, other.re, other.im
        return GaussInt(a * c - b * d, a * d + b * c)

    def __neg__(self) -> "GaussInt":
        return GaussInt(-self.re, -self.im)

    def conj(self) -> "GaussInt":
        return GaussInt(self.re, -self.im)

    def norm(self) -> int:
        return self.re * self.re + self.im * self.im

    def times_i(self) -> "GaussInt":
        return GaussInt(-self.im, self.re)

    @property
    def is_primary(self) -> bool:
        return self.re % 2 == 1 and self.im % 2 == 0 and (self.re + self.im) % 4 == 1

    def associates(self) -> tuple["GaussInt", ...]:
        zi = self.times_i()
        return (self, zi, -self, -zi)

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            re_part = ""
        else:
            re_part = str(self.re)
        sign = "+" if self.im > 0 else "-"
        mag = abs(self.im)
        im_part = "i" if mag == 1 else f"{mag}i"
        if not re_part:
            return im_part if self.im > 0 else f"-{im_part}"
        return f"{re_part}{sign}{im_part}"


def primary_associate(z: GaussInt) -> GaussInt:
    """The unique primary associate of z (norm must be odd)."""
    if z.norm() % 2 == 0:
        raise ValueError(f"{z} has even norm, no primary associate")
    for w in z.associates():
        if w.is_primary:
            return w
    raise ValueError(f"no primary associate of {z}")  # unreachable for odd norm


def split_prime(p: int) -> GaussInt:
    """Canonical primary divisor of p ≡ 1 (mod 4) in Z[i], imaginary part > 0.

    Cornacchia via the Euclidean algorithm on (p, sqrt(-1) mod p): the first
    remainder below sqrt(p) is |re| of a divisor.  Deterministic because
    sqrt_mod is.
    """
    if p % 4 != 1:
        raise ValueError(f"{p} does not split in Z[i]")
    r = sqrt_mod(-1, p)
    a, b = p, r
    while b * b > p:
        a, b = b, a % b
    x = b
    y = isqrt(p - x * x)
    assert x * x + y * y == p, f"Cornacchia failed at {p}; p not prime?"
    z = primary_associate(GaussInt(x, y))
    return z.conj() if z.im < 0 else z


def i_image(pi: GaussInt, p: int) -> int:
    """The residue r ∈ F_p that i maps to under Z[i]/(π) ≅ F_p."""
    # a + b·r ≡ 0 (mod p) and r² ≡ -1.
    r = -pi.re * pow(pi.im, -1, p) % p
    assert (r * r + 1) % p == 0
    return r


@dataclass(frozen=True)
class QuarticSymbol:
    """A fourth root of unity i^exp, the value of a quartic residue symbol."""

    exp: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "exp", self.exp % 4)

    def __mul__(self, other: "QuarticSymbol") -> "QuarticSymbol":
        return QuarticSymbol(self.exp + other.exp)

    def conj(self) -> "QuarticSymbol":
        return QuarticSymbol(-self.exp)

    def order(self) -> int:
        return {0: 1, 2: 2}.get(self.exp, 4)

    def __str__(self) -> str:
        return ("1", "i", "-1", "-i")[self.exp]


QUARTIC_ONE = QuarticSymbol(0)
QUARTIC_I = QuarticSymbol(1)
QUARTIC_MINUS_ONE = QuarticSymbol(2)
QUARTIC_MINUS_I = QuarticSymbol(3)


def quartic_exponent(x: int | Rational, pi: GaussInt, p: int | None = None) -> int:
    """Exponent e with (x/π)_4 = i^e, for π of prime norm p ≡ 1 (mod 4).

    x may be a rational with denominator prime to p.  Hot path: one modular
    exponentiation plus a four-way match.
    """
    if p is None:
        p = pi.norm()
    if isinstance(x, Fraction):
        num, den = x.numerator, x.denominator
        xm = num % p * pow(den, -1, p) % p
    else:
        xm = x % p
    if xm == 0:
        raise ValueError(f"quartic symbol of 0 (x ≡ 0 mod {p})")
    r = i_image(pi, p)
    v = pow(xm, (p - 1) // 4, p)
    if v == 1:
        return 0
    if v == r:
        return 1
    if v == p - 1:
        return 2
    if v == p - r:
        return 3
    raise ValueError(f"{v} is not a power of i mod {p}; norm of {pi} not prime?")


def quartic_symbol(x: int | Rational, pi: GaussInt) -> QuarticSymbol:
    """(x/π)_4 for π of prime norm ≡ 1 (mod 4).

    >>> str(quartic_symbol(2, GaussInt(3, 2)))
    '-i'
    >>> str(quartic_symbol(Fraction(1, 2), GaussInt(3, 2)))
    'i'
    """
    return QuarticSymbol(quartic_exponent(x, pi))


def closed_form_odd_factor(ell: int, pi: GaussInt) -> QuarticSymbol:
    """(ℓ/π)_4 for an odd prime ℓ dividing re(π), without exponentiation.

    The value is the sign (-1)^((ℓ-1)/2 · (p-1)/4) · (2|ℓ); in particular it
    is always ±1.
    """
    if ell % 2 == 0 or pi.re % ell != 0:
        raise ValueError(f"{ell} is not an odd divisor of re({pi})")
    p = pi.norm()
    sign = (-1) ** (((ell - 1) // 2) * ((p - 1) // 4)) * jacobi(2, ell)
    return QUARTIC_ONE if sign == 1 else QUARTIC_MINUS_ONE


def closed_form_two(pi: GaussInt) -> QuarticSymbol:
    """(2/π)_4 = (-i)^(b/2) for primary π = a+bi."""
    if not pi.is_primary:
        raise ValueError(f"{pi} is not primary")
    return QuarticSymbol(-(pi.im // 2))


def closed_form_trace_symbol(pi: GaussInt, t: int | Rational) -> QuarticSymbol:
    """Quartic symbol of the trace a_p of y² = x³ - tx at p = norm(π).

    For primary π = a+bi and p ∤ 2t the symbol of the (nonzero) trace equals
    i^((a-1)/2) · (-1)^((b²+2b)/8) · (t/π)_4^((p-1)/4) — no point counting and
    no knowledge of a_p itself required.  Conjugation-equivariant, so either
    primary divisor of p gives the conjugate value, consistently.
    """
    if not pi.is_primary:
        raise ValueError(f"{pi} is not primary")
    a, b = pi.re, pi.im
    p = pi.norm()
    e_t = quartic_exponent(t, pi, p)
    # (b² + 2b)/8 is exact: b even makes b²+2b ≡ 0 (mod 8).
    e = (a - 1) // 2 + 2 * ((b * b + 2 * b) // 8) + e_t * ((p - 1) // 4)
    return QuarticSymbol(e)


G8_CLASSES = ("1", "5", "1+4i", "5+4i")


def primary_class_mod8(p: int) -> str:
    """Class of the primary divisors of p ≡ 1 (mod 8) modulo 8.

    Both primary divisors a±bi of p share a, and b ≡ 0 (mod 4), so π mod 8
    lands in {1, 5, 1+4i, 5+4i} · (units fixed by primarity); returned as one
    of the four tokens.

    >>> primary_class_mod8(73)
    '5'
    >>> primary_class_mod8(113)
    '1'
    """
    if p % 8 != 1:
        raise ValueError(f"{p} is not 1 mod 8")
    pi = split_prime(p)
    a8, b8 = pi.re % 8, pi.im % 8
    assert a8 in (1, 5) and b8 in (0, 4), (p, pi)
    return f"{a8}" if b8 == 0 else f"{a8}+4i"
