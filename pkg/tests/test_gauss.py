import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import dyadic_bracket, point_in
from oscillon.exactnum import Dyadic, Enclosure, Order, separate
from oscillon.gauss import (CutoffExceeded, NormalQuery, inverse_breakpoint, normal_cdf,
                            normal_inverse, quantile_bound)
from reference_values import INVERSE_CDF, PHI_AT_1

mpmath.mp.dps = 60


def mp_of(d: Dyadic):
    f = d.to_fraction()
    return mpmath.mpf(f.numerator) / f.denominator


def test_cdf_at_zero():
    eps = Dyadic(1, -30)
    e = normal_cdf(Enclosure(0), eps)
    assert e.contains(Dyadic(1, -1))
    assert e.width <= eps


def test_cdf_at_one_matches_series_oracle():
    eps = Dyadic(1, -40)
    e = normal_cdf(Enclosure(1), eps)
    assert e.width <= eps
    assert point_in(e, Fraction(PHI_AT_1))
    assert mp_of(e.lo) <= mpmath.ncdf(1) <= mp_of(e.hi)


@settings(max_examples=60, deadline=None)
@given(st.integers(-15 * 2**20, 15 * 2**20), st.integers(8, 60))
def test_cdf_contains_mpmath_value(m, p):
    x = Dyadic(m, -20)
    e = normal_cdf(Enclosure(x), Dyadic(1, -p))
    assert e.width <= Dyadic(1, -p)
    assert mp_of(e.lo) <= mpmath.ncdf(mp_of(x)) <= mp_of(e.hi)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 15 * 2**16))
def test_cdf_reflection(m):
    x = Dyadic(m, -16)
    eps = Dyadic(1, -40)
    s = normal_cdf(Enclosure(x), eps) + normal_cdf(Enclosure(-x), eps)
    assert s.contains(1)


def test_cdf_interval_input_and_cutoff():
    e = normal_cdf(Enclosure(-1, 1), Dyadic(1, -20))
    assert mp_of(e.lo) <= mpmath.ncdf(-1) and mpmath.ncdf(1) <= mp_of(e.hi)
    with pytest.raises(CutoffExceeded):
        normal_cdf(Enclosure(17), Dyadic(1, -10))


def test_inverse_median():
    e = normal_inverse(NormalQuery(Enclosure(Dyadic(1, -1)), Dyadic(1, -20)))
    assert e.contains(0)
    assert e.width <= Dyadic(1, -20)


def test_inverse_of_cdf_oracle_value():
    phi1 = Fraction(PHI_AT_1)
    u = Enclosure(dyadic_bracket(phi1 - Fraction(1, 2**45), 60).lo,
                  dyadic_bracket(phi1 + Fraction(1, 2**45), 60).hi)
    e = normal_inverse(NormalQuery(u, Dyadic(1, -30)))
    assert e.contains(1)


@pytest.mark.parametrize("q,x", INVERSE_CDF)
def test_inverse_reference_points(q, x):
    u = dyadic_bracket(Fraction(q), 70)
    e = normal_inverse(NormalQuery(u, Dyadic(1, -42)))
    assert e.width <= Dyadic(1, -40)
    assert point_in(e, Fraction(x))


def test_query_validation():
    with pytest.raises(ValueError):
        NormalQuery(Enclosure(0, Dyadic(1, -1)), Dyadic(1, -10))
    with pytest.raises(ValueError):
        NormalQuery(Enclosure(Dyadic(1, -1)), 0)


def test_inverse_cutoff():
    with pytest.raises(CutoffExceeded):
        normal_inverse(NormalQuery(Enclosure(Dyadic(1, -200)), Dyadic(1, -10)))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 2**20 - 2), st.integers(1, 2**20 - 2))
def test_inverse_monotone(a, b):
    if a == b:
        return
    a, b = min(a, b), max(a, b)
    eps = Dyadic(1, -30)
    r1 = normal_inverse(NormalQuery(Enclosure(Dyadic(a, -20)), eps))
    r2 = normal_inverse(NormalQuery(Enclosure(Dyadic(b, -20)), eps))
    assert r1.lo <= r2.hi
    assert separate(r1, r2) is Order.LESS


def test_round_trip_random():
    rng = random.Random(11)
    eps = Dyadic(1, -40)
    for _ in range(1000):
        k = rng.randrange(1, 2**30)
        u = Enclosure(Dyadic(k, -30), Dyadic(k + 1, -30))
        x = normal_inverse(NormalQuery(u, eps))
        assert normal_cdf(x, eps).overlaps(u)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 2**24 - 1))
def test_inverse_antisymmetry(k):
    eps = Dyadic(1, -36)
    u = Enclosure(Dyadic(k, -24))
    v = Enclosure(1 - Dyadic(k, -24))
    assert normal_inverse(NormalQuery(u, eps)).overlaps(-normal_inverse(NormalQuery(v, eps)))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 2**12 - 2), st.integers(1, 12))
def test_refinement_nests(k, extra):
    u = Enclosure(Dyadic(k, -12), Dyadic(k + 1, -12))
    outer = normal_inverse(NormalQuery(u, Dyadic(1, -20)))
    j = random.Random(k).randrange(1 << extra)
    sub = Enclosure(Dyadic((k << extra) + j, -12 - extra), Dyadic((k << extra) + j + 1, -12 - extra))
    inner = normal_inverse(NormalQuery(sub, Dyadic(1, -40)))
    assert outer.lo <= inner.lo and inner.hi <= outer.hi


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 200).flatmap(lambda K: st.tuples(st.just(K), st.integers(1, 2**K - 1))))
def test_quantile_bounds_bracket_the_quantile(Kk):
    """Checked against mpmath's ncdf, not erfinv (which loses accuracy deep in the tail)."""
    K, k = Kk
    if k % 2 == 0:
        return
    b = Fraction(k, 1 << K)
    if b <= Fraction(1, 10**50) or b >= 1 - Fraction(1, 10**50):
        return
    mpmath.mp.dps = 120
    target = mpmath.mpf(k) / mpmath.mpf(2) ** K
    lo = quantile_bound(k, K, False)
    hi = quantile_bound(k, K, True)
    assert mpmath.ncdf(mp_of(lo)) <= target <= mpmath.ncdf(mp_of(hi))
    a, c = inverse_breakpoint(k, K)
    assert mpmath.ncdf(mp_of(a)) <= target <= mpmath.ncdf(mp_of(c))
    mpmath.mp.dps = 60
