"""The nine class-number-one CM families and their Frobenius traces.

For each imaginary quadratic discriminant d with class number one we fix a
rational model E^d (``data/curves.txt``) and study the family

* d = -4:   E_t : y² = x³ - t x              (quartic twists),
* d = -3:   E_t : y² = x³ + 16 t             (sextic twists),
* d = -7:   E_t = quadratic twist of E^-7 by -t,
* d <= -8:  E_t = quadratic twist of E^d by t,

with t a nonzero rational.  A good odd prime p is *supersingular* exactly
when d is a non-residue mod p, and then a_p = 0 (p >= 5).  For split p the
trace is pinned down by the norm equation — a_p = ±u with 4p = u² + |d|v²
(d = -4: a_p ∈ ±{2a, 2b}, d = -3: a_p ∈ ±{2x, x+3y, x-3y}) — and the
remaining sign/unit ambiguity is resolved by two independent routes:

* ``ap``: for d = -4 a closed form (the trace is the entry of
  [2a, 2b, -2a, -2b] selected by the quartic character of t at the primary
  divisor a+bi of p); for every other d, candidate filtering by group order:
  random points P must satisfy (p+1-c)P = O for the true trace c.
* ``ap_naive``: a direct character-sum point count, O(p) per prime.

Keeping the two routes independent is the whole point — every identity
checked downstream is only as credible as the trace computation, so the
fast path never silently feeds the oracle and vice versa.

Determinism: the random points used by the filtering route come from a
``random.Random`` seeded arithmetically by (seed, d, t, p), so any prime is
reproducible in isolation, in any order, on any worker layout.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from math import isqrt
from pathlib import Path

import numpy as np

from .gaussian import split_prime, quartic_exponent
from .primes import Rational, jacobi, sqrt_mod

DISCRIMINANTS = (-3, -4, -7, -8, -11, -19, -43, -67, -163)

_POINT_TRIES = 32
_NAIVE_LIMIT = 2_000_000  # int64 safety margin for the character-sum count


def unit_count(d: int) -> int:
    """Number of roots of unity in the CM order: 6, 4 or 2."""
    return {-3: 6, -4: 4}.get(d, 2)


@dataclass(frozen=True)
class CurveModel:
    """Integral Weierstrass model y² + a1·xy + a3·y = x³ + a2·x² + a4·x + a6."""

    a1: int
    a2: int
    a3: int
    a4: int
    a6: int

    def b_invariants(self) -> tuple[int, int, int]:
        b2 = self.a1 * self.a1 + 4 * self.a2
        b4 = 2 * self.a4 + self.a1 * self.a3
        b6 = self.a3 * self.a3 + 4 * self.a6
        return b2, b4, b6

    def short_coeffs(self, p: int) -> tuple[int, int]:
        """(A, B) with E ≅ y² = x³ + Ax + B over F_p; valid for p >= 5."""
        assert p >= 5, "short Weierstrass transform divides by 6"
        b2, b4, b6 = self.b_invariants()
        c4 = b2 * b2 - 24 * b4
        c6 = -b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6
        return (-27 * c4) % p, (-54 * c6) % p


@dataclass(frozen=True)
class CurveSpec:
    """A member E_t of the twist family attached to discriminant d."""

    d: int
    t: Rational = Fraction(1)

    def __post_init__(self) -> None:
        if self.d not in DISCRIMINANTS:
            raise ValueError(f"unsupported discriminant {self.d}")
        t = Fraction(self.t)
        if t == 0:
            raise ValueError("twist parameter t must be nonzero")
        object.__setattr__(self, "t", t)

    @property
    def w(self) -> int:
        return unit_count(self.d)

    def is_good(self, p: int) -> bool:
        """Good odd primes of E_t: p ∤ 2·d·num(t)·den(t).  p = 2 is never good."""
        return p > 2 and (2 * self.d * self.t.numerator * self.t.denominator) % p != 0

    def __str__(self) -> str:
        return f"E[{self.d}]_t={self.t}"


@dataclass(frozen=True)
class ApRecord:
    p: int
    ap: int
    kind: str  # "ordinary" | "supersingular"


def load_curve_table(path: str | Path | None = None) -> dict[int, CurveModel]:
    """Parse a model table (rows ``d a1 a2 a3 a4 a6``); all nine d required."""
    if path is None:
        text = resources.files("cmresidues.data").joinpath("curves.txt").read_text()
    else:
        text = Path(path).read_text()
    table: dict[int, CurveModel] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 6:
            raise ValueError(f"curve table line {lineno}: expected 6 fields, got {len(parts)}")
        try:
            d, *coeffs = (int(x) for x in parts)
        except ValueError as exc:
            raise ValueError(f"curve table line {lineno}: non-integer field") from exc
        if d not in DISCRIMINANTS:
            raise ValueError(f"curve table line {lineno}: unknown discriminant {d}")
        if d in table:
            raise ValueError(f"curve table line {lineno}: duplicate discriminant {d}")
        table[d] = CurveModel(*coeffs)
    missing = [d for d in DISCRIMINANTS if d not in table]
    if missing:
        raise ValueError(f"curve table is missing discriminants {missing}")
    return table


@lru_cache(maxsize=1)
def default_table() -> dict[int, CurveModel]:
    return load_curve_table()


# ---------------------------------------------------------------------------
# Norm equations


def cornacchia(D: int, p: int) -> tuple[int, int]:
    """Minimal-machinery Cornacchia: p = x² + D y² with x, y >= 0.

    Tries both square roots of -D; for prime p one of them yields the
    (essentially unique, D > 1) representation when it exists.
    """
    if p == D:
        return 0, 1
    r0 = sqrt_mod(-D, p)  # raises if -D is a non-residue
    for r in (r0, p - r0):
        a, b = p, r
        while b * b > p:
            a, b = b, a % b
        rem = p - b * b
        if rem % D == 0:
            y = isqrt(rem // D)
            if D * y * y == rem:
                return b, y
    raise ValueError(f"{p} is not represented by x² + {D}y²")


def cornacchia_4p(D: int, p: int) -> tuple[int, int]:
    """Solve 4p = u² + |D| v² with u, v > 0 for odd D < 0 (|D| < 4p).

    The classical modified algorithm: root of D mod p with the parity of D,
    then the Euclidean walk down to 2√p.
    """
    n = -D
    x0 = sqrt_mod(D, p)
    if x0 % 2 != n % 2:
        x0 = p - x0
    a, b = 2 * p, x0
    limit = isqrt(4 * p)
    while b > limit:
        a, b = b, a % b
    rem = 4 * p - b * b
    if rem % n == 0:
        v = isqrt(rem // n)
        if n * v * v == rem:
            return b, v
    raise ValueError(f"4·{p} is not represented by u² + {n}v²")


# ---------------------------------------------------------------------------
# Point arithmetic (Jacobian coordinates, short Weierstrass, p >= 5)


def _jac_dbl(X, Y, Z, A, p):
    if Z == 0 or Y == 0:
        return 1, 1, 0
    Y2 = Y * Y % p
    S = 4 * X * Y2 % p
    Z2 = Z * Z % p
    M = (3 * X * X + A * Z2 * Z2) % p
    X3 = (M * M - 2 * S) % p
    Y3 = (M * (S - X3) - 8 * Y2 * Y2) % p
    Z3 = 2 * Y * Z % p
    return X3, Y3, Z3


def _jac_add_affine(X, Y, Z, x2, y2, A, p):
    """(X:Y:Z) + (x2:y2:1)."""
    if Z == 0:
        return x2, y2, 1
    Z2 = Z * Z % p
    U2 = x2 * Z2 % p
    S2 = y2 * Z2 * Z % p
    H = (U2 - X) % p
    R = (S2 - Y) % p
    if H == 0:
        if R == 0:
            return _jac_dbl(X, Y, Z, A, p)
        return 1, 1, 0
    H2 = H * H % p
    H3 = H * H2 % p
    XH2 = X * H2 % p
    X3 = (R * R - H3 - 2 * XH2) % p
    Y3 = (R * (XH2 - X3) - Y * H3) % p
    Z3 = Z * H % p
    return X3, Y3, Z3


def _jac_mul(k: int, x: int, y: int, A: int, p: int):
    """k·(x, y) on y² = x³ + Ax + B (B implicit), Jacobian; Z = 0 encodes O."""
    if k == 0:
        return 1, 1, 0
    if k < 0:
        k, y = -k, (-y) % p
    X, Y, Z = x, y, 1
    for bit in bin(k)[3:]:
        X, Y, Z = _jac_dbl(X, Y, Z, A, p)
        if bit == "1":
            X, Y, Z = _jac_add_affine(X, Y, Z, x, y, A, p)
    return X, Y, Z


def _jac_eq(P, Q, p) -> bool:
    X1, Y1, Z1 = P
    X2, Y2, Z2 = Q
    if Z1 == 0 or Z2 == 0:
        return Z1 == 0 and Z2 == 0
    Z1Z1 = Z1 * Z1 % p
    Z2Z2 = Z2 * Z2 % p
    if (X1 * Z2Z2 - X2 * Z1Z1) % p:
        return False
    return (Y1 * Z2Z2 * Z2 - Y2 * Z1Z1 * Z1) % p == 0


def _mix_seed(seed: int, d: int, num: int, den: int, p: int) -> int:
    mix = seed & (1 << 64) - 1
    for v in (d, num, den, p):
        mix = (mix * 0x100000001B3 + v) & (1 << 128) - 1
    return mix


def _trace_from_candidates(p: int, A: int, B: int, cands: list[int], rng, tries: int):
    """The unique c among cands with (p+1-c)P = O for random points P.

    Returns None when the candidates cannot be separated: either several
    survive all rounds (candidate differences killing the whole group) or
    the curve has too few points off the 2-torsion to sample.  Both happen
    only for small p.
    """
    survivors = list(cands)
    draws = 16 * p + 256  # total budget; a curve can have no usable points at all
    for _ in range(tries):
        # random point: x with x³+Ax+B a nonzero square
        while True:
            draws -= 1
            if draws < 0:
                return None
            x = rng.randrange(p)
            fx = (x * x % p * x + A * x + B) % p
            if fx != 0 and pow(fx, (p - 1) // 2, p) == 1:
                y = sqrt_mod(fx, p)
                break
        Q = _jac_mul(p + 1, x, y, A, p)
        mults: dict[int, tuple] = {}
        still = []
        for c in survivors:
            k = abs(c)
            if k not in mults:
                mults[k] = _jac_mul(k, x, y, A, p)
            X, Y, Z = mults[k]
            if c < 0:
                Y = (-Y) % p
            if _jac_eq(Q, (X, Y, Z), p):
                still.append(c)
        survivors = still
        assert survivors, "true trace eliminated: wrong candidate set or bad model"
        if len(survivors) == 1:
            return survivors[0]
    return None


# ---------------------------------------------------------------------------
# Naive point counts (the oracle route)


@lru_cache(maxsize=128)
def _chi_table(p: int) -> np.ndarray:
    """chi[v] = quadratic character of v mod p (0 at 0), as int8."""
    xs = np.arange(p, dtype=np.int64)
    chi = np.full(p, -1, dtype=np.int8)
    chi[xs * xs % p] = 1
    chi[0] = 0
    return chi


def _count_cubic(c3: int, c2: int, c1: int, c0: int, p: int) -> int:
    """-Σ_x chi(c3x³ + c2x² + c1x + c0) = trace of y² = cubic, over F_p."""
    assert p <= _NAIVE_LIMIT, "naive count out of its int64 comfort zone"
    chi = _chi_table(p)
    xs = np.arange(p, dtype=np.int64)
    x2 = xs * xs % p
    fx = (c3 % p * (x2 * xs % p) + c2 % p * x2 + c1 % p * xs + c0) % p
    return -int(chi[fx].sum())


def _reduce_t(t: Fraction, p: int) -> int:
    return t.numerator % p * pow(t.denominator, -1, p) % p


def ap_naive(spec: CurveSpec, p: int, table: dict[int, CurveModel] | None = None) -> int:
    """Frobenius trace by direct point count — the slow, assumption-free route."""
    if not spec.is_good(p):
        raise ValueError(f"{spec} has bad reduction at {p}")
    tm = _reduce_t(spec.t, p)
    if spec.d == -4:
        return _count_cubic(1, 0, -tm, 0, p)
    if spec.d == -3:
        return _count_cubic(1, 0, 0, 16 * tm, p)
    model = (table or default_table())[spec.d]
    b2, b4, b6 = model.b_invariants()
    # complete the square: counting y² = 4x³+b2x²+2b4x+b6 matches the model;
    # the twist by s multiplies the cubic through by s (s·y² = g ~ y² = s·g up to squares)
    s = -tm if spec.d == -7 else tm
    return _count_cubic(4 * s, b2 * s, 2 * b4 * s, b6 * s, p)


# ---------------------------------------------------------------------------
# Production trace


@lru_cache(maxsize=1 << 16)
def _stored_trace(model: CurveModel, d: int, p: int, seed: int, oracle_bound: int, tries: int) -> int:
    """Signed trace of the stored model at split p >= 5 (d <= -7 families)."""
    assert p >= 5
    if d == -8:
        x, _y = cornacchia(2, p)
        u = 2 * x
    else:
        u, _v = cornacchia_4p(d, p)
    A, B = model.short_coeffs(p)
    rng = random.Random(_mix_seed(seed, d, 1, 1, p))
    c = _trace_from_candidates(p, A, B, [u, -u], rng, tries)
    if c is None:
        if p <= oracle_bound:
            return _count_cubic(*_bmodel_coeffs(model, 1, p), p)
        raise RuntimeError(f"trace of E[{d}] at {p} ambiguous after {tries} points")
    return c


def _bmodel_coeffs(model: CurveModel, s: int, p: int) -> tuple[int, int, int, int]:
    b2, b4, b6 = model.b_invariants()
    return 4 * s % p, b2 * s % p, 2 * b4 * s % p, b6 * s % p


@lru_cache(maxsize=1 << 16)
def _sextic_trace(num: int, den: int, p: int, seed: int, oracle_bound: int, tries: int) -> int:
    """Trace of y² = x³ + 16t at split p ≡ 1 (mod 3), t = num/den."""
    x, y = cornacchia(3, p)
    cands = []
    for c in (2 * x, x + 3 * y, x - 3 * y):
        cands += [c, -c]
    B = 16 * (num % p) * pow(den, -1, p) % p
    rng = random.Random(_mix_seed(seed, -3, num, den, p))
    c = _trace_from_candidates(p, 0, B, cands, rng, tries)
    if c is None:
        if p <= oracle_bound:
            return _count_cubic(1, 0, 0, B, p)
        raise RuntimeError(f"trace of E[-3]_t={num}/{den} at {p} ambiguous after {tries} points")
    return c


def ap(
    spec: CurveSpec,
    p: int,
    *,
    seed: int = 0,
    oracle_bound: int = 20_000,
    tries: int = _POINT_TRIES,
    table: dict[int, CurveModel] | None = None,
) -> ApRecord:
    """Frobenius trace of E_t at a good odd prime p.

    Supersingular primes are dispatched by the splitting of d alone; ordinary
    traces go through the norm equation plus sign disambiguation (see module
    docstring).  For ambiguous tiny p (group order dividing a candidate
    difference) falls back to the naive count when p <= oracle_bound.
    """
    if not spec.is_good(p):
        raise ValueError(f"{spec} has bad reduction at {p}")
    if jacobi(spec.d, p) == -1:
        return ApRecord(p, 0, "supersingular")
    if p < 5:
        # char 3: no short model; count directly (still a well-defined trace)
        return ApRecord(p, ap_naive(spec, p, table), "ordinary")
    d = spec.d
    if d == -4:
        pi = split_prime(p)
        e = quartic_exponent(spec.t, pi, p)
        a, b = pi.re, pi.im
        trace = (2 * a, 2 * b, -2 * a, -2 * b)[e]
    elif d == -3:
        trace = _sextic_trace(spec.t.numerator, spec.t.denominator, p, seed, oracle_bound, tries)
    else:
        base = _stored_trace((table or default_table())[d], d, p, seed, oracle_bound, tries)
        s = -spec.t if d == -7 else spec.t
        trace = jacobi((s.numerator * s.denominator) % p, p) * base
    return ApRecord(p, trace, "ordinary")


def ap_order(
    spec: CurveSpec,
    p: int,
    m: int,
    *,
    seed: int = 0,
    oracle_bound: int = 20_000,
    table: dict[int, CurveModel] | None = None,
) -> int:
    """Order of the m-th power-residue class of a_p, i.e. of a_p^((p-1)/m) in F_p^×.

    Requires p ≡ 1 (mod m) and ordinary reduction (nonzero trace).
    """
    if p % m != 1:
        raise ValueError(f"p = {p} is not 1 mod {m}")
    rec = ap(spec, p, seed=seed, oracle_bound=oracle_bound, table=table)
    if rec.ap == 0:
        raise ValueError(f"a_{p} = 0 (supersingular); no residue order")
    from .primes import order_dividing

    return order_dividing(pow(rec.ap % p, (p - 1) // m, p), m, p)
