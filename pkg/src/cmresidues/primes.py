"""Prime streams and elementary modular arithmetic.

Everything downstream iterates over primes in bulk, so the sieve is a
numpy segmented sieve over odd integers (memory ~ chunk/16 bytes per
segment).  The number-theoretic helpers here are deliberately hand-rolled:
``jacobi`` and ``sqrt_mod`` sit on the hot path of every per-prime
computation and must cost microseconds, not library-call overhead.
Factorisation of *small* integers (normalising twist parameters, Euler phi
for scaling factors) is delegated to sympy — those are cold paths.

Conventions used throughout the package:

* ``jacobi(a, n)`` is the Kronecker--Jacobi symbol for odd n > 0.
* ``sqrt_mod(a, p)`` returns the *smaller* of the two square roots, and the
  Tonelli--Shanks non-residue is the smallest one — both choices are part of
  the determinism contract (same inputs, same bits, any worker layout).
* ``kfree_reduce(t, k)`` maps a nonzero rational to the canonical k-th-power-free
  integer representing it modulo (Q^x)^k; for odd k the sign is absorbed
  (-1 is a k-th power), for even k it is preserved.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

import numpy as np

Rational = Fraction

_SIEVE_CHUNK = 1 << 20


def _small_primes(limit: int) -> np.ndarray:
    """All primes < limit via a plain boolean sieve (used to seed segments)."""
    if limit < 3:
        return np.array([2][: max(0, limit - 2)], dtype=np.int64)
    mask = np.ones(limit, dtype=bool)
    mask[:2] = False
    for p in range(2, isqrt(limit - 1) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return np.nonzero(mask)[0].astype(np.int64)


def primes_in_range(lo: int, hi: int, *, chunk: int = _SIEVE_CHUNK):
    """Yield primes p with lo <= p < hi in increasing order.

    Segmented over odd integers; each segment clears multiples with strided
    slice assignment, so the python-level cost is one loop over sieving primes
    per segment.
    """
    lo = max(lo, 2)
    if hi <= lo:
        return
    if lo <= 2 < hi:
        yield 2
    base = _small_primes(isqrt(hi - 1) + 1)
    base = base[base > 2]  # odd-only segments never contain multiples of 2
    start = lo | 1  # first odd >= lo
    for seg_lo in range(start, hi, 2 * chunk):
        seg_hi = min(seg_lo + 2 * chunk, hi)
        n = (seg_hi - seg_lo + 1) // 2  # odds in [seg_lo, seg_hi)
        mask = np.ones(n, dtype=bool)
        for p in base:
            p = int(p)
            if p * p >= seg_hi:
                break
            first = max(p * p, ((seg_lo + p - 1) // p) * p)
            if first % 2 == 0:
                first += p
            mask[(first - seg_lo) // 2 :: p] = False  # strided clear
        if seg_lo == 1:
            mask[0] = False
        for q in np.nonzero(mask)[0]:
            yield seg_lo + 2 * int(q)


@dataclass(frozen=True)
class PrimeRange:
    """Half-open prime range [lo, hi), partitionable into aligned segments.

    Segment boundaries depend only on (lo, hi, chunk), never on the worker
    count, which is what makes scan output order reproducible.
    """

    lo: int
    hi: int
    chunk: int = 250_000

    def __post_init__(self) -> None:
        if self.lo < 0 or self.hi < self.lo or self.chunk <= 0:
            raise ValueError(f"bad prime range {self.lo}..{self.hi}/{self.chunk}")

    def segments(self) -> list[tuple[int, int]]:
        out = []
        lo = self.lo
        while lo < self.hi:
            hi = min(lo + self.chunk, self.hi)
            out.append((lo, hi))
            lo = hi
        return out

    def __iter__(self):
        return primes_in_range(self.lo, self.hi)


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a|n) for odd n > 0.

    Iterative binary algorithm; the only facts used are (2|n) = (-1)^((n²-1)/8)
    and quadratic reciprocity for odd arguments.
    """
    if n <= 0 or n % 2 == 0:
        raise ValueError(f"jacobi: modulus must be positive odd, got {n}")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def sqrt_mod(a: int, p: int) -> int:
    """Square root of a modulo prime p, returning the smaller root.

    Raises ValueError when a is a non-residue.  Tonelli--Shanks with the
    smallest quadratic non-residue, so the answer is a pure function of
    (a mod p, p).
    """
    a %= p
    if a == 0:
        return 0
    if p == 2:
        return 1
    if jacobi(a, p) != 1:
        raise ValueError(f"{a} is not a square modulo {p}")
    if p % 4 == 3:
        r = pow(a, (p + 1) // 4, p)
        return min(r, p - r)
    # p ≡ 1 (mod 4): full Tonelli--Shanks.
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while jacobi(z, p) != -1:
        z += 1
    c = pow(z, q, p)
    r = pow(a, (q + 1) // 2, p)
    t = pow(a, q, p)
    m = s
    while t != 1:
        t2 = t
        i = 0
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
            assert i < m, "Tonelli-Shanks order overflow; p not prime?"
        b = pow(c, 1 << (m - i - 1), p)
        r = r * b % p
        c = b * b % p
        t = t * c % p
        m = i
    return min(r, p - r)


@lru_cache(maxsize=None)
def _divisors(m: int) -> tuple[int, ...]:
    out = [d for d in range(1, m + 1) if m % d == 0]
    return tuple(out)


def order_dividing(x: int, m: int, p: int) -> int:
    """Multiplicative order of x mod p, given that it divides m.

    Raises ValueError if x^m != 1 mod p (caller promised a root of unity).
    """
    x %= p
    if x == 0:
        raise ValueError("order_dividing: x ≡ 0 has no multiplicative order")
    for n in _divisors(m):
        if pow(x, n, p) == 1:
            return n
    raise ValueError(f"order of {x} mod {p} does not divide {m}")


def _factorint(n: int) -> dict[int, int]:
    from sympy import factorint  # deferred: sympy import is slow, path is cold

    return dict(factorint(n))


def euler_phi(n: int) -> int:
    if n <= 0:
        raise ValueError("euler_phi: n must be positive")
    phi = 1
    for q, e in _factorint(n).items():
        phi *= (q - 1) * q ** (e - 1)
    return phi


def parse_rational(text: str) -> Fraction:
    """Parse '3', '-8' or '3/4' into a Fraction (used by CLI and set grammar)."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {text!r}") from exc


def kfree_reduce(t: Rational | int, k: int) -> int:
    """Canonical k-th-power-free integer congruent to t modulo (Q^x)^k.

    >>> kfree_reduce(32, 4)
    2
    >>> kfree_reduce(-64, 6)
    -1
    >>> kfree_reduce(Fraction(1, 2), 4)
    8
    >>> kfree_reduce(-8, 3)
    1
    """
    if k < 2:
        raise ValueError("kfree_reduce: k must be >= 2")
    t = Fraction(t)
    if t == 0:
        raise ValueError("kfree_reduce: t must be nonzero")
    # a/b ~ a * b^(k-1) mod k-th powers
    n = t.numerator * t.denominator ** (k - 1)
    sign = -1 if n < 0 else 1
    if sign < 0 and k % 2 == 1:
        sign = 1  # -1 = (-1)^k is itself a k-th power for odd k
    out = 1
    for q, e in _factorint(abs(n)).items():
        out *= q ** (e % k)
    return sign * out


def squarefree_part(t: Rational | int) -> int:
    """Squarefree integer representing t modulo squares (sign preserved).

    >>> squarefree_part(-12)
    -3
    >>> squarefree_part(Fraction(8, 9))
    2
    """
    return kfree_reduce(t, 2)
