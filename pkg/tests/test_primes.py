"""prime_engine: sieve, modular arithmetic, and rational reductions.

Oracles: sympy (primerange, jacobi_symbol, n_order, totient) for everything
that has an independent implementation there; frozen values for the rest.
"""

import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from cmresidues.primes import (
    PrimeRange,
    euler_phi,
    jacobi,
    kfree_reduce,
    order_dividing,
    parse_rational,
    primes_in_range,
    sqrt_mod,
    squarefree_part,
)


@pytest.mark.parametrize("lo,hi", [(1, 10), (13, 14), (0, 2), (90, 114), (7900, 8000)])
def test_primes_in_range_vs_sympy(lo, hi):
    assert list(primes_in_range(lo, hi)) == list(sympy.primerange(lo, hi))


def test_prime_count_below_1e6():
    # classic benchmark value; exercises the segmented path (several chunks)
    assert sum(1 for _ in primes_in_range(2, 10**6)) == 78498


def test_prime_range_segments_partition():
    pr = PrimeRange(5, 10**6, chunk=250_000)
    segs = pr.segments()
    assert segs[0][0] == 5 and segs[-1][1] == 10**6
    assert all(a[1] == b[0] for a, b in zip(segs, segs[1:]))
    # segment boundaries are a pure function of (lo, hi, chunk): workers may
    # divide them up but can never change them
    assert segs == PrimeRange(5, 10**6, chunk=250_000).segments()
    merged = [p for a, b in segs for p in primes_in_range(a, b)]
    assert merged == list(pr)


@given(st.integers(min_value=-10**6, max_value=10**6), st.integers(min_value=1, max_value=10**4))
@settings(max_examples=200, deadline=None)
def test_jacobi_vs_sympy(a, n):
    n = 2 * n + 1  # odd modulus
    assert jacobi(a, n) == sympy.jacobi_symbol(a, n)


@pytest.mark.parametrize("p", [5, 13, 17, 97, 10007, 1000003, 999999999989])
def test_sqrt_mod_roundtrip(p):
    found = 0
    for a in range(1, 60):
        if jacobi(a, p) != 1:
            continue
        r = sqrt_mod(a, p)
        assert 0 < r <= p - r, "canonical (smaller) root expected"
        assert r * r % p == a % p
        found += 1
    assert found > 10


def test_order_dividing_vs_sympy():
    p = 10007
    for m in (2, 3, 4, 6, 8, 9, 12):
        if (p - 1) % m:
            continue
        for g in range(2, 40):
            x = pow(g, (p - 1) // m, p)
            want = 1 if x == 1 else sympy.n_order(x, p)
            assert order_dividing(x, m, p) == want


def test_euler_phi_vs_sympy():
    for n in list(range(1, 200)) + [720, 5040, 2**10, 3**7]:
        assert euler_phi(n) == sympy.totient(n)


# -- rational reductions ----------------------------------------------------


def test_kfree_reduce_frozen():
    assert kfree_reduce(32, 4) == 2
    assert kfree_reduce(-64, 6) == -1
    assert kfree_reduce(Fraction(1, 2), 4) == 8
    assert kfree_reduce(-8, 3) == 1
    assert kfree_reduce(7, 2) == 7


@given(
    st.integers(min_value=-3000, max_value=3000).filter(lambda n: n != 0),
    st.integers(min_value=1, max_value=300),
    st.sampled_from([2, 3, 4, 6]),
)
@settings(max_examples=200, deadline=None)
def test_kfree_reduce_properties(num, den, k):
    t = Fraction(num, den)
    r = kfree_reduce(t, k)
    assert isinstance(r, int) and r != 0
    # the quotient is a perfect k-th power of a rational (negative root only
    # possible for odd k, e.g. -8 ~ 1 via (-2)^3)
    q = t / r
    assert q.numerator > 0 or k % 2 == 1
    root_num = round(abs(q.numerator) ** (1 / k))
    root_den = round(q.denominator ** (1 / k))
    assert root_num**k == abs(q.numerator) and root_den**k == q.denominator
    # and r itself carries no k-th power
    for c in range(2, 12):
        assert r % (c**k), f"{r} still divisible by {c}^{k}"


@given(st.integers(min_value=-3000, max_value=3000).filter(lambda n: n != 0),
       st.integers(min_value=1, max_value=300))
@settings(max_examples=200, deadline=None)
def test_squarefree_part_properties(num, den):
    t = Fraction(num, den)
    s = squarefree_part(t)
    assert squarefree_part(Fraction(s)) == s
    q = t / s
    assert q > 0
    r = Fraction(math.isqrt(q.numerator), math.isqrt(q.denominator))
    assert r * r == q


def test_squarefree_part_frozen():
    assert squarefree_part(-12) == -3
    assert squarefree_part(8) == 2
    assert squarefree_part(Fraction(8, 9)) == 2
    assert squarefree_part(Fraction(-1, 2)) == -2


def test_parse_rational():
    assert parse_rational("3") == Fraction(3)
    assert parse_rational("-1/2") == Fraction(-1, 2)
    assert parse_rational(" 4/6 ") == Fraction(2, 3)
    with pytest.raises(ValueError):
        parse_rational("three")
    with pytest.raises(ValueError):
        parse_rational("1/0")
