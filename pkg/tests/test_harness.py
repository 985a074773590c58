import csv
import io
import json
import math

import numpy as np
import pytest

import oracles
from oscillon.bitstream import CsprngSource
from oscillon.exactnum import Dyadic
from oscillon.harness import (SuiteConfig, arcsine_cdf, distinct_minima_verdict, ks_arcsine,
                              ks_distance, theil_sen_slope, validate_distinct_minima,
                              validate_symmetry, worker_count)
from oscillon.levypath import PathEvaluator, TruncatedXi
from oscillon.minimizers import locate_minimizer
from oscillon.oracle import Budget


def test_arcsine_cdf_examples():
    assert arcsine_cdf(0) == 0
    assert arcsine_cdf(1) == pytest.approx(1, abs=1e-15)
    assert arcsine_cdf(0.5) == pytest.approx(0.5, abs=1e-15)
    assert arcsine_cdf(0.25) == pytest.approx(1 / 3, abs=1e-15)
    with pytest.raises(ValueError):
        arcsine_cdf(1.5)


@pytest.mark.parametrize("x", [0.05, 0.25, 0.5, 0.8, 0.99])
def test_arcsine_cdf_against_quadrature(x):
    assert arcsine_cdf(x) == pytest.approx(oracles.arcsine_quadrature(x), abs=1e-8)


def test_ks_distance_and_slope_helpers():
    assert ks_distance([0.5], lambda x: x) == pytest.approx(0.5)
    assert theil_sen_slope([10, 11, 12], [3.0, 2.0, 1.0]) == pytest.approx(-1.0)


def test_ks_arcsine_small_run():
    rep = ks_arcsine(100, level=8, base_seed=500)
    assert rep.N == 100 and 0 <= rep.statistic <= 1
    assert rep.summary["exhausted"] == 0
    assert rep.statistic <= 1.63 / math.sqrt(100)
    # 99% binomial band around 1/2 for N = 100
    assert abs(rep.summary["ecdf_half"] - 0.5) <= 2.58 * 0.5 / math.sqrt(100)
    buf = io.StringIO()
    rep.write_csv(buf)
    rows = list(csv.DictReader(io.StringIO(buf.getvalue())))
    assert list(rows[0])[:2] == ["trial_index", "seed"]
    assert len(rows) == 100 and rows[0]["seed"] == "501"
    assert json.loads(rep.to_json())["suite"] == "arcsine"


def test_identical_seeds_fail():
    rep = ks_arcsine(100, level=6, seeds=[7] * 100)
    assert not rep.passed and rep.statistic > 0.03
    lenient = ks_arcsine(100, level=6, seeds=[7] * 100, config=SuiteConfig(ks_threshold=1.0))
    assert lenient.passed
    with pytest.raises(ValueError):
        ks_arcsine(50)


def test_distinct_minima_examples(linear_up, zero_path):
    b = Budget(60, 120)
    assert distinct_minima_verdict(linear_up, b).kind == "less"
    assert distinct_minima_verdict(zero_path, b).exhausted
    rep = validate_distinct_minima(6, 60, base_seed=40)
    assert rep.passed and rep.summary["exhausted"] == 0 and rep.statistic == 1.0


def test_distinct_verdict_matches_float_oracle():
    for seed in range(60, 66):
        ev = PathEvaluator.stochastic(CsprngSource.from_int(seed))
        v = distinct_minima_verdict(ev, Budget(60, 120))
        x = oracles.float_path(seed, 16)
        half = len(x) // 2
        if abs(x[:half + 1].min() - x[half:].min()) > 0.01:
            assert v.kind == ("less" if x[:half + 1].min() < x[half:].min() else "greater")


def test_symmetry_suite():
    rep = validate_symmetry(3, level=6)
    assert rep.passed and rep.statistic == 1.0 and rep.summary["points"] == 3 * 65


def test_truncated_negation_is_exact():
    import random
    spec = TruncatedXi.random(4, random.Random(3))
    ev, neg = PathEvaluator.truncated(spec), PathEvaluator.truncated(spec.negated())
    for k in range(33):
        t = Dyadic(k, -5)
        assert neg.exact_value(t) == -ev.exact_value(t)


def test_negated_minimizer_sits_at_the_maximum():
    seed = 70
    ev = PathEvaluator.stochastic(CsprngSource.from_int(seed))
    rec = locate_minimizer(ev.negated(), (0, 1), Dyadic(1, -16), Budget(64, 64))
    x = oracles.float_path(seed, 16)
    lo = int(np.floor(float(rec.enclosure.lo) * 2**16))
    hi = int(np.ceil(float(rec.enclosure.hi) * 2**16))
    assert x.max() <= -float(rec.value_enclosure.lo) + 1e-9
    assert x[lo:hi + 1].max() >= -float(rec.value_enclosure.hi) - float(ev.slack(16)) - 1e-9


def test_seed_independence_and_parallel_equivalence(monkeypatch):
    monkeypatch.setenv("OSCILLON_THREADS", "1")
    full = validate_distinct_minima(4, 60, base_seed=10)
    part = validate_distinct_minima(2, 60, base_seed=12)
    strip = lambda rows: [{k: v for k, v in r.items() if k != "trial_index"} for r in rows]
    assert strip(full.outcomes[2:]) == strip(part.outcomes)
    monkeypatch.setenv("OSCILLON_THREADS", "2")
    assert worker_count(4) == 2
    par = validate_distinct_minima(4, 60, base_seed=10)
    assert par.outcomes == full.outcomes


def test_trial_count_validation():
    with pytest.raises(ValueError):
        validate_symmetry(0)
