from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from oscillon.bitstream import CsprngSource
from oscillon.exactnum import Dyadic, Enclosure
from oscillon.levypath import PathEvaluator, negated_evaluator
from oscillon.oracle import Budget
from oscillon.walks import WalkCode, code_of_path, sup_distance, walk_value

B = Budget(64, 16)

codes = st.integers(0, 7).flatmap(
    lambda j: st.text(alphabet="01", min_size=1 << j, max_size=1 << j).map(
        lambda s: WalkCode(len(s), s)))


def test_code_validation():
    with pytest.raises(ValueError):
        WalkCode(3, "010")
    with pytest.raises(ValueError):
        WalkCode(4, "01")
    with pytest.raises(ValueError):
        WalkCode(2, "0a")


def test_codes_of_linear_paths(linear_up, linear_down):
    assert code_of_path(linear_up, 3, B).bits == "1" * 8
    assert code_of_path(linear_down, 3, B).bits == "0" * 8


@pytest.mark.parametrize("seed", [1, 2])
def test_negated_code_is_complement(seed):
    ev = PathEvaluator.stochastic(CsprngSource.from_int(seed))
    code = code_of_path(ev, 7, B)
    assert code_of_path(negated_evaluator(ev), 7, B) == code.complement()


@pytest.mark.parametrize("seed", [3, 4])
def test_code_matches_float_increments(seed):
    ev = PathEvaluator.stochastic(CsprngSource.from_int(seed))
    x = oracles.float_path(seed, 8)
    want = "".join("1" if d > 0 else "0" for d in np.diff(x))
    assert code_of_path(ev, 8, B).bits == want


def test_walk_value_examples():
    up = WalkCode(4, "1111")
    assert walk_value(up, Fraction(1, 4), 40) == Enclosure(Dyadic(1, -1))
    assert walk_value(WalkCode(4, "0000"), 1, 40) == Enclosure(-2)
    assert walk_value(WalkCode(8, "01101001"), 0, 40) == Enclosure(0)


@given(codes, st.fractions(0, 1), st.integers(1, 60))
def test_walk_value_contains_exact_value(code, t, p):
    e = walk_value(code, t, p)
    assert e.width <= Dyadic(1, -p)
    n = code.n
    i = min(int(t * n), n - 1)
    s = sum(1 if b == "1" else -1 for b in code.bits[:i])
    step = 1 if code.bits[i] == "1" else -1
    w = s + step * (t * n - i)  # sqrt(n) * x_n(t)
    # x_n(t) = w / sqrt(n); compare through squares, minding signs
    lo, hi = e.lo.to_fraction(), e.hi.to_fraction()
    if w >= 0:
        assert lo <= 0 or lo * lo * n <= w * w
        assert hi >= 0 and hi * hi * n >= w * w
    else:
        assert hi >= 0 or hi * hi * n <= w * w
        assert lo <= 0 and lo * lo * n >= w * w


def test_sup_distance_examples(linear_up, zero_path):
    eps = Dyadic(1, -30)
    assert sup_distance(linear_up, WalkCode(1, "1"), eps).contains(0)
    e = sup_distance(zero_path, WalkCode(4, "1111"), eps)
    assert e.contains(2)
    h = sup_distance(zero_path, WalkCode(4, "1111"), eps, modulus="holder")
    assert h.contains(2)


@pytest.mark.parametrize("seed,j", [(5, 4), (6, 6)])
def test_sup_distance_contains_dense_grid_max(seed, j):
    ev = PathEvaluator.stochastic(CsprngSource.from_int(seed))
    code = code_of_path(ev, j, B)
    level = j + 7
    x = oracles.float_path(seed, level)
    n = code.n
    steps = np.array([1.0 if b == "1" else -1.0 for b in code.bits])
    knots = np.concatenate([[0.0], np.cumsum(steps)]) / np.sqrt(n)
    t = np.arange((1 << level) + 1) / (1 << level)
    walk = np.interp(t, np.arange(n + 1) / n, knots)
    dense = np.max(np.abs(x - walk))
    for mod in ("schauder", "holder"):
        e = sup_distance(ev, code, Dyadic(1, -20), modulus=mod)
        assert float(e.lo) - 1e-9 <= dense <= float(e.hi) + 1e-9
