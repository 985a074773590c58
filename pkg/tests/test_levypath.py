import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from checks import reconstruct_enclosure, reconstruct_exact
from oscillon.bitstream import BitSource, CsprngSource, FileSource, cantor_pair
from oscillon.exactnum import Dyadic, Enclosure
from oscillon.gauss import CutoffExceeded
from oscillon.levypath import (PathEvaluator, Surd, TailBound, TailBoundViolation, TruncatedXi,
                               coefficient_index, coefficient_of, negated_evaluator,
                               value_at_dyadic, value_at_real, xi)
from oscillon.oracle import interval_min_enclosure

EPS = Dyadic(1, -40)


def test_coefficient_indexing():
    assert coefficient_index(-1, 0) == 0  # xi_0
    assert coefficient_index(0, 0) == 1  # xi_1
    assert [coefficient_index(j, n) for j, n in [(1, 0), (1, 1), (2, 0), (2, 3), (3, 0)]] == \
        [2, 3, 4, 7, 8]
    for c in range(2000):
        assert coefficient_index(*coefficient_of(c)) == c
    with pytest.raises(ValueError):
        coefficient_index(2, 4)


def test_truncated_xi(linear_up):
    assert xi(linear_up, 1, 0, EPS) == Enclosure(0)
    assert xi(linear_up, -1, 0, EPS) == Enclosure(1)


def test_truncated_rejects_out_of_range():
    with pytest.raises(ValueError):
        TruncatedXi(1, {coefficient_index(2, 0): 1})


class ZerosThenOne(BitSource):
    """Substream c reads ``zeros`` zeros, then a one, then alternating bits."""

    def __init__(self, c, zeros):
        self.c, self.zeros = c, zeros

    def bit(self, i):
        for k in range(self.zeros + 1):
            if cantor_pair(self.c, k) == i:
                return 1 if k == self.zeros else 0
        return i & 1


def test_all_zero_substream_hits_cutoff():
    ev = PathEvaluator.stochastic(FileSource(bytes(64), cyclic=True))
    with pytest.raises(CutoffExceeded):
        ev.xi(1, 0, Dyadic(1, -20))


def test_more_bits_lift_the_cutoff():
    c = coefficient_index(1, 0)
    ev = PathEvaluator.stochastic(ZerosThenOne(c, 12), tail=TailBound(8, 8))
    e = ev.xi(1, 0, Dyadic(1, -20))
    assert e.width <= Dyadic(1, -20)
    assert e.hi < -3  # u < 2**-12 puts the quantile below -3.4


def test_stochastic_determinism():
    a = PathEvaluator.stochastic(CsprngSource.from_int(5))
    b = PathEvaluator.stochastic(CsprngSource.from_int(5))
    e1 = a.xi(3, 5, Dyadic(1, -30))
    assert a.xi(3, 5, Dyadic(1, -30)) == e1 == b.xi(3, 5, Dyadic(1, -30))
    assert e1.width <= Dyadic(1, -30)


def test_cache_history_does_not_matter():
    t = Dyadic(37, -7)
    fresh = PathEvaluator.stochastic(CsprngSource.from_int(9))
    warmed = PathEvaluator.stochastic(CsprngSource.from_int(9))
    for p in (8, 52, 16, 40):
        warmed.value_at_dyadic(t, Dyadic(1, -p))
        warmed.xi(2, 1, Dyadic(1, -p))
    assert fresh.value_at_dyadic(t, Dyadic(1, -30)) == warmed.value_at_dyadic(t, Dyadic(1, -30))


def test_linear_path_values(linear_up):
    assert value_at_dyadic(linear_up, 1, EPS) == Enclosure(1)
    assert value_at_dyadic(linear_up, Dyadic(1, -1), EPS) == Enclosure(Dyadic(1, -1))
    assert value_at_dyadic(linear_up, Dyadic(1, -2), EPS) == Enclosure(Dyadic(1, -2))


def test_zero_path(zero_path):
    for t in (0, Dyadic(1, -3), Dyadic(5, -7), 1):
        e = value_at_dyadic(zero_path, t, EPS)
        assert e.contains(0) and e.width <= EPS


def test_recursion_by_hand():
    """2x(1/2) = xi0 + xi1 and one more application of the recursion."""
    spec = TruncatedXi.from_levels(2, xi0=Dyadic(3, -1), xi1=Dyadic(-1, -2),
                                   levels={(1, 0): Dyadic(1), (2, 1): Dyadic(5, -3)})
    ev = PathEvaluator.truncated(spec)
    x1 = Fraction(3, 2)
    x_half = (x1 + Fraction(-1, 4)) / 2
    assert ev.exact_value(Dyadic(1, -1)) == Surd(Dyadic.coerce(x_half))
    # 2x(1/4) = 2**(-1/2) xi_{1,0} + x(0) + x(1/2)
    want = Surd(Dyadic.coerce(x_half / 2), Dyadic(1, -2))
    assert ev.exact_value(Dyadic(1, -2)) == want
    # 2x(3/8) = 2**-1 xi_{2,1} + x(1/4) + x(1/2)
    x38 = ev.exact_value(Dyadic(3, -3))
    assert x38 == (want + Surd(Dyadic.coerce(x_half)) + Surd(Dyadic(5, -4))).shift(-1)
    assert ev.exact_value(1) == Surd(Dyadic.coerce(x1))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 6))
def test_midpoint_round_trip(seed, J):
    ev = PathEvaluator.truncated(TruncatedXi.random(J, random.Random(seed)))
    spec = ev.lattice.truncated
    for j in range(J + 1):
        for n in range(1 << j):
            stored = spec.get(coefficient_index(j, n))
            assert reconstruct_exact(ev, j, n) == Surd(stored)
            assert reconstruct_enclosure(ev, j, n, EPS).contains(stored)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**30), st.integers(0, 12), st.integers(4, 60))
def test_width_contract_and_pinning(seed, level, p):
    ev = PathEvaluator.stochastic(CsprngSource.from_int(seed))
    eps = Dyadic(1, -p)
    assert ev.value_at_dyadic(0, eps) == Enclosure(0)
    k = random.Random(seed).randrange((1 << level) + 1)
    e = ev.value_at_dyadic(Dyadic(k, -level), eps)
    assert e.width <= eps


@pytest.mark.parametrize("p", [64, 96, 128])
def test_high_precision_width_contract(p):
    # slack must keep shrinking past 2**-64 or the horizon search never ends
    ev = PathEvaluator.stochastic(CsprngSource.from_int(7))
    assert ev.slack(2 * p + 24) < Dyadic(1, -p)
    assert ev.value_at_dyadic(Dyadic(5, -4), Dyadic(1, -p)).width <= Dyadic(1, -p)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 5), st.integers(4, 50))
def test_truncated_width_contract(seed, J, p):
    ev = PathEvaluator.truncated(TruncatedXi.random(J, random.Random(seed)))
    t = Dyadic(random.Random(seed).randrange(257), -8)
    assert ev.value_at_dyadic(t, Dyadic(1, -p)).width <= Dyadic(1, -p)


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_values_agree_with_float_oracle(seed):
    ev = PathEvaluator.stochastic(CsprngSource.from_int(seed))
    grid = oracles.float_path(seed, 10)
    for i in range(0, 1025, 31):
        e = ev.value_at_dyadic(Dyadic(i, -10), Dyadic(1, -30))
        assert float(e.lo) - 1e-9 <= grid[i] <= float(e.hi) + 1e-9


def test_value_at_real():
    ev = PathEvaluator.stochastic(CsprngSource.from_int(4))
    d = Dyadic(5, -4)
    assert value_at_real(ev, Enclosure(d), EPS) == value_at_dyadic(ev, d, EPS)
    z = PathEvaluator.truncated(TruncatedXi.from_levels(0))
    assert value_at_real(z, Enclosure(0, 1), EPS).contains(0)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**10 - 4), st.integers(1, 3), st.integers(0, 2))
def test_value_at_real_nested(k, w, off):
    ev = PathEvaluator.stochastic(CsprngSource.from_int(12))
    outer = Enclosure(Dyadic(k, -10), Dyadic(k + w + 1, -10))
    inner_lo = Dyadic(k, -10) + Dyadic(off, -12)
    inner = Enclosure(inner_lo, inner_lo + Dyadic(1, -12))
    eps = Dyadic(1, -30)
    big = value_at_real(ev, outer, eps).inflate(eps)
    small = value_at_real(ev, inner, eps)
    assert big.lo <= small.lo and small.hi <= big.hi
    # the true values on a fine grid inside t lie in the result
    for i in range(5):
        s = inner_lo + Dyadic(i, -14)
        assert small.contains(ev.value_at_dyadic(s, eps).midpoint)


def test_holder_constant_dominates_grid_increments():
    ev = PathEvaluator.stochastic(CsprngSource.from_int(21))
    H = float(ev.holder().hi)
    x = oracles.float_path(21, 12)
    for lag in (1, 3, 17, 256, 2000):
        inc = np.max(np.abs(x[lag:] - x[:-lag]))
        assert inc <= H * (lag / 4096) ** (1 / 3)


def test_slack_dominates_chord_deviation():
    seed = 22
    ev = PathEvaluator.stochastic(CsprngSource.from_int(seed))
    x = oracles.float_path(seed, 13)
    for m in (0, 2, 5, 8):
        step = 1 << (13 - m)
        s = float(ev.slack(m))
        for c in range(1 << m):
            a, b = x[c * step], x[(c + 1) * step]
            chord = a + (b - a) * np.arange(step + 1) / step
            assert np.max(np.abs(x[c * step:(c + 1) * step + 1] - chord)) <= s


def test_negated_examples():
    ev = PathEvaluator.stochastic(CsprngSource.from_int(30))
    neg = negated_evaluator(ev)
    for t in (Dyadic(1, -2), Dyadic(1, -1), Dyadic(3, -2)):
        assert neg.value_at_dyadic(t, EPS).overlaps(-ev.value_at_dyadic(t, EPS))
    back = negated_evaluator(neg)
    for t in (Dyadic(1, -2), Dyadic(7, -5), 1):
        assert back.value_at_dyadic(t, EPS) == ev.value_at_dyadic(t, EPS)


def test_negated_minimum_is_minus_maximum():
    seed = 31
    neg = negated_evaluator(PathEvaluator.stochastic(CsprngSource.from_int(seed)))
    e = interval_min_enclosure(neg, (0, 1), 10, Dyadic(1, -30))
    top = oracles.float_path(seed, 14).max()
    assert float(e.lo) - 1e-9 <= -top <= float(e.hi) + 1e-9


def test_negation_needs_stochastic_mode(linear_up):
    with pytest.raises(ValueError):
        negated_evaluator(linear_up)


def test_tail_soundness_200_paths():
    violations = 0
    for seed in range(200):
        lat = PathEvaluator.stochastic(CsprngSource.from_int(10**6 + seed)).lattice
        try:
            for c in range(2, 1 << 13):
                lat.enclosure(c, 4)
        except TailBoundViolation:
            violations += 1
    assert violations == 0


def test_tail_violation_is_reported():
    # bits that push a level-1 coefficient past 2 + 2 = 4 under a tight bound
    c = coefficient_index(1, 0)
    ev = PathEvaluator.stochastic(ZerosThenOne(c, 12), tail=TailBound(Dyadic(1, -1), Dyadic(1, -1)))
    with pytest.raises(TailBoundViolation):
        ev.xi(1, 0, Dyadic(1, -10))


def test_truncated_json_round_trip():
    spec = TruncatedXi.random(3, random.Random(1))
    assert TruncatedXi.from_json(spec.to_json()) == spec


def test_dump_format(linear_up):
    rows = linear_up.dump(2, EPS)
    assert rows[2] == {"t": "1*2^-1", "lo": "1*2^-1", "hi": "1*2^-1"}
    assert len(rows) == 5
