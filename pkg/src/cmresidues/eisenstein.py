"""Arithmetic in Z[ω] (ω² + ω + 1 = 0): split primes and cubic residue symbols.

For p ≡ 1 (mod 3) we have p = u² + 3v², and π = (u+v) + 2vω is a divisor of
p of norm p.  Among the six associates of π exactly one is ≡ 2 (mod 3)
(meaning a ≡ 2, b ≡ 0 when written a + bω) and exactly one is ≡ 1 (mod 3);
these are the two classical "primary" normalisations.  The cubic residue
symbol (x/π)_3 — the power of ω congruent to x^((p-1)/3) mod π — depends
only on the ideal (π), not on the choice of generator: any generator induces
the same image s of ω in the residue field F_p, because a² - ab + b² ≡ 0
(mod p) forces b/(a-b) ≡ -a/b.  The convention therefore only selects a
canonical generator for display and for reproducibility of reports.
``cmresidues.density.calibrate_eisenstein`` re-checks both conventions
against point counts; ≡ 2 (mod 3) is the frozen default.

>>> pi = split_prime_eis(7)
>>> (pi.a, pi.b, pi.norm())
(-1, -3, 7)
>>> cubic_symbol(2, EisInt(3, 1)).exp
1
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from .primes import Rational, sqrt_mod

PRIMARY_CONVENTION = "two-mod-three"  # π ≡ 2 (mod 3); see calibrate_eisenstein
_TARGETS = {"two-mod-three": 2, "one-mod-three": 1}


@dataclass(frozen=True)
class EisInt:
    """a + bω with ω a primitive cube root of unity (ω² = -ω - 1)."""

    a: int
    b: int

    def __add__(self, other: "EisInt") -> "EisInt":
        return EisInt(self.a + other.a, self.b + other.b)

    def __sub__(self, other: "EisInt") -> "EisInt":
        return EisInt(self.a - other.a, self.b - other.b)

    def __mul__(self, other: "EisInt") -> "EisInt":
        a1, b1, a2, b2 = self.a, self.b, other.a, other.b
        return EisInt(a1 * a2 - b1 * b2, a1 * b2 + a2 * b1 - b1 * b2)

    def __neg__(self) -> "EisInt":
        return EisInt(-self.a, -self.b)

    def conj(self) -> "EisInt":
        return EisInt(self.a - self.b, -self.b)

    def norm(self) -> int:
        return self.a * self.a - self.a * self.b + self.b * self.b

    def times_omega(self) -> "EisInt":
        return EisInt(-self.b, self.a - self.b)

    def associates(self) -> tuple["EisInt", ...]:
        zw = self.times_omega()
        zww = zw.times_omega()
        return (self, zw, zww, -self, -zw, -zww)

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        mag = abs(self.b)
        w = "w" if mag == 1 else f"{mag}w"
        if self.a == 0:
            return w if self.b > 0 else f"-{w}"
        sign = "+" if self.b > 0 else "-"
        return f"{self.a}{sign}{w}"


def primary_associate_eis(z: EisInt, convention: str = PRIMARY_CONVENTION) -> EisInt:
    """The unique associate ≡ 1 or 2 (mod 3) per the chosen convention."""
    target = _TARGETS[convention]
    found = [w for w in z.associates() if w.a % 3 == target and w.b % 3 == 0]
    if len(found) != 1:
        raise ValueError(f"{z}: {len(found)} associates ≡ {target} mod 3; norm divisible by 3?")
    return found[0]


def split_prime_eis(p: int, convention: str = PRIMARY_CONVENTION) -> EisInt:
    """Canonical divisor of p ≡ 1 (mod 3) in Z[ω], normalised mod 3.

    Cornacchia for p = u² + 3v²; both square roots of -3 are tried so the
    exactness check always lands (for p prime one of them does).
    """
    if p % 3 != 1:
        raise ValueError(f"{p} does not split in Z[ω]")
    r0 = sqrt_mod(-3, p)
    for r in (r0, p - r0):
        a, b = p, r
        while b * b > p:
            a, b = b, a % b
        rem = p - b * b
        if rem % 3 == 0:
            v = isqrt(rem // 3)
            if 3 * v * v == rem:
                # u + v√-3 = (u+v) + 2vω
                return primary_associate_eis(EisInt(b + v, 2 * v), convention)
    raise AssertionError(f"Cornacchia failed for {p}; p not prime?")


def omega_image(pi: EisInt, p: int | None = None) -> int:
    """The residue s ∈ F_p that ω maps to under Z[ω]/(π) ≅ F_p."""
    if p is None:
        p = pi.norm()
    s = -pi.a * pow(pi.b, -1, p) % p
    assert (s * s + s + 1) % p == 0
    return s


@dataclass(frozen=True)
class CubicSymbol:
    """A cube root of unity ω^exp, the value of a cubic residue symbol."""

    exp: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "exp", self.exp % 3)

    def __mul__(self, other: "CubicSymbol") -> "CubicSymbol":
        return CubicSymbol(self.exp + other.exp)

    def conj(self) -> "CubicSymbol":
        return CubicSymbol(-self.exp)

    def order(self) -> int:
        return 1 if self.exp == 0 else 3

    def __str__(self) -> str:
        return ("1", "w", "w^2")[self.exp]


CUBIC_ONE = CubicSymbol(0)


def cubic_exponent(x: int | Rational, pi: EisInt, p: int | None = None) -> int:
    """Exponent e with (x/π)_3 = ω^e, for π of prime norm p ≡ 1 (mod 3)."""
    if p is None:
        p = pi.norm()
    if isinstance(x, Fraction):
        xm = x.numerator % p * pow(x.denominator, -1, p) % p
    else:
        xm = x % p
    if xm == 0:
        raise ValueError(f"cubic symbol of 0 (x ≡ 0 mod {p})")
    s = omega_image(pi, p)
    v = pow(xm, (p - 1) // 3, p)
    if v == 1:
        return 0
    if v == s:
        return 1
    if v == s * s % p:
        return 2
    raise ValueError(f"{v} is not a power of ω mod {p}; norm of {pi} not prime?")


def cubic_symbol(x: int | Rational, pi: EisInt) -> CubicSymbol:
    """(x/π)_3 for π of prime norm ≡ 1 (mod 3)."""
    return CubicSymbol(cubic_exponent(x, pi))
