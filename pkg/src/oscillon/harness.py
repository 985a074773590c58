"""Monte Carlo validation suites.

This is the statistical layer: floats are allowed here and nowhere in the
certified modules.  Every trial depends only on its own seed, so trials may
run in any order or in parallel (capped by OSCILLON_THREADS) without changing
per-trial outcomes.
"""

from __future__ import annotations

import csv
import json
import math
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import stats

from .bitstream import CsprngSource
from .exactnum import Dyadic, Order, separate
from .gauss import CutoffExceeded
from .levypath import PathEvaluator, TailBoundViolation
from .minimizers import Exhausted, locate_minimizer
from .oracle import Budget, MinimumSearch, Verdict
from .walks import code_of_path, sup_distance

__all__ = [
    "SuiteConfig",
    "TrialReport",
    "arcsine_cdf",
    "ks_distance",
    "ks_arcsine",
    "validate_distinct_minima",
    "validate_symmetry",
    "validate_walks",
    "distinct_minima_verdict",
    "theil_sen_slope",
    "worker_count",
]


@dataclass(frozen=True)
class SuiteConfig:
    """Statistical thresholds; logic never hard-codes these numbers."""

    ks_threshold: float = 0.03
    max_exhaustion_rate: float = 0.01
    walk_ratio_max: float = 4.0
    walk_slope_max: float = 0.0
    symmetry_min_rate: float = 1.0


@dataclass
class TrialReport:
    suite: str
    N: int
    outcomes: list = field(default_factory=list)
    statistic: float = float("nan")
    passed: bool = False
    wall_time: float = 0.0
    summary: dict = field(default_factory=dict)

    def as_json(self) -> dict:
        return {"suite": self.suite, "N": self.N, "statistic": self.statistic,
                "passed": self.passed, "wall_time": round(self.wall_time, 3), **self.summary}

    def to_json(self) -> str:
        return json.dumps(self.as_json(), sort_keys=True)

    def write_csv(self, fh) -> None:
        if not self.outcomes:
            return
        keys = list(self.outcomes[0])
        w = csv.DictWriter(fh, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        for row in self.outcomes:
            w.writerow(row)


def worker_count(n_tasks: int) -> int:
    env = os.environ.get("OSCILLON_THREADS")
    cap = int(env) if env else (os.cpu_count() or 1)
    return max(1, min(cap, n_tasks))


def _map(fn: Callable, args: list) -> list:
    """Order-preserving map over independent trials."""
    workers = worker_count(len(args))
    if workers == 1:
        return [fn(a) for a in args]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, args, chunksize=max(1, len(args) // (8 * workers))))


def _source(seed: int) -> CsprngSource:
    return CsprngSource.from_int(seed)


def _seeds(N: int, base_seed: int) -> list:
    if N < 1:
        raise ValueError("N must be >= 1")
    return [base_seed + i for i in range(1, N + 1)]


def _indexed(rows: list) -> list:
    return [{"trial_index": i, **r} for i, r in enumerate(rows)]


def arcsine_cdf(x: float) -> float:
    """(2/pi) arcsin(sqrt(x)), the law of the minimizer location on [0, 1]."""
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    return 2.0 / math.pi * math.asin(math.sqrt(x))


def ks_distance(samples, cdf: Callable[[float], float]) -> float:
    return float(stats.kstest(np.asarray(list(samples), dtype=float),
                              lambda xs: np.array([cdf(x) for x in xs])).statistic)


def theil_sen_slope(xs, ys) -> float:
    return float(stats.theilslopes(ys, xs)[0])


# ---------------------------------------------------------------------------
# arcsine law


def _arcsine_trial(args) -> dict:
    seed, level, bits = args
    ev = PathEvaluator.stochastic(_source(seed))
    row = {"seed": seed, "location": float("nan"), "status": "ok"}
    try:
        rec = locate_minimizer(ev, (0, 1), Dyadic(1, -level), Budget(bits, 4 * level + 64))
    except (TailBoundViolation, CutoffExceeded) as exc:
        row["status"] = type(exc).__name__
        return row
    if isinstance(rec, Exhausted):
        row["status"] = "exhausted"
        return row
    row["location"] = float(rec.enclosure.midpoint)
    return row


def ks_arcsine(N: int, level: int = 12, base_seed: int = 0, seeds=None, budget_bits: int = 64,
               config: SuiteConfig = SuiteConfig()) -> TrialReport:
    """KS distance between minimizer locations (enclosure midpoints) and the arcsine law."""
    if seeds is None:
        seeds = _seeds(N, base_seed)
    if N < 100:
        raise ValueError("N must be >= 100")
    if len(seeds) != N:
        raise ValueError("need exactly N seeds")
    t0 = time.perf_counter()
    rows = _map(_arcsine_trial, [(s, level, budget_bits) for s in seeds])
    rows = _indexed(rows)
    locs = [r["location"] for r in rows if r["status"] == "ok"]
    failed = N - len(locs)
    ks = ks_distance(locs, arcsine_cdf) if locs else 1.0
    rate = failed / N
    ecdf_half = sum(1 for x in locs if x <= 0.5) / max(len(locs), 1)
    passed = ks <= config.ks_threshold and rate <= config.max_exhaustion_rate
    return TrialReport("arcsine", N, rows, ks, passed, time.perf_counter() - t0,
                       {"ks": ks, "exhausted": failed, "exhaustion_rate": rate,
                        "ecdf_half": ecdf_half, "level": level,
                        "threshold": config.ks_threshold})


# ---------------------------------------------------------------------------
# distinct minima


def distinct_minima_verdict(ev: PathEvaluator, b: Budget, left=(0, Dyadic(1, -1)),
                            right=(Dyadic(1, -1), 1)) -> Verdict:
    """Certified order of m(left) and m(right), refining the looser side first."""
    sl = MinimumSearch(ev, left, b)
    sr = MinimumSearch(ev, right, b)
    while True:
        a, c = sl.value_enclosure, sr.value_enclosure
        order = separate(a, c)
        if order is Order.LESS:
            return Verdict("less", max(sl.precision, sr.precision))
        if order is Order.GREATER:
            return Verdict("greater", max(sl.precision, sr.precision))
        first, second = (sl, sr) if a.width >= c.width else (sr, sl)
        if not first.refine() and not second.refine():
            return Verdict("exhausted", max(sl.precision, sr.precision),
                           max(a.width, c.width))


def _distinct_trial(args) -> dict:
    seed, bits = args
    ev = PathEvaluator.stochastic(_source(seed))
    try:
        v = distinct_minima_verdict(ev, Budget(bits, 4 * bits))
        status = v.kind
    except (TailBoundViolation, CutoffExceeded) as exc:
        status = type(exc).__name__
    return {"seed": seed, "status": status}


def validate_distinct_minima(N: int, budget_bits: int = 60, base_seed: int = 0,
                             config: SuiteConfig = SuiteConfig()) -> TrialReport:
    t0 = time.perf_counter()
    seeds = _seeds(N, base_seed)
    rows = _map(_distinct_trial, [(s, budget_bits) for s in seeds])
    rows = _indexed(rows)
    separated = sum(1 for r in rows if r["status"] in ("less", "greater"))
    exhausted = N - separated
    rate = separated / N
    passed = exhausted / N <= config.max_exhaustion_rate
    return TrialReport("distinct", N, rows, rate, passed, time.perf_counter() - t0,
                       {"separation_rate": rate, "exhausted": exhausted,
                        "budget_bits": budget_bits})


# ---------------------------------------------------------------------------
# symmetry


def _symmetry_trial(args) -> dict:
    seed, level, p = args
    ev = PathEvaluator.stochastic(_source(seed))
    neg = ev.negated()
    eps = Dyadic(1, -p)
    total = (1 << level) + 1
    ok = 0
    for i in range(total):
        t = Dyadic(i, -level)
        if ev.value_at_dyadic(t, eps).overlaps(-neg.value_at_dyadic(t, eps)):
            ok += 1
    return {"seed": seed, "points": total, "overlapping": ok}


def validate_symmetry(N: int, level: int = 8, base_seed: int = 0, eps_bits: int = 30,
                      config: SuiteConfig = SuiteConfig()) -> TrialReport:
    t0 = time.perf_counter()
    seeds = _seeds(N, base_seed)
    rows = _map(_symmetry_trial, [(s, level, eps_bits) for s in seeds])
    rows = _indexed(rows)
    pts = sum(r["points"] for r in rows)
    ok = sum(r["overlapping"] for r in rows)
    rate = ok / pts
    return TrialReport("symmetry", N, rows, rate, rate >= config.symmetry_min_rate,
                       time.perf_counter() - t0, {"overlap_rate": rate, "points": pts})


# ---------------------------------------------------------------------------
# walk rate


def _walk_trial(args) -> dict:
    seed, levels, bits, eps_bits = args
    ev = PathEvaluator.stochastic(_source(seed))
    row = {"seed": seed, "status": "ok"}
    try:
        for j in levels:
            code = code_of_path(ev, j, Budget(bits, 8))
            if isinstance(code, Verdict):
                row["status"] = "exhausted"
                return row
            d = sup_distance(ev, code, Dyadic(1, -eps_bits))
            n = 1 << j
            row[f"ratio_{j}"] = float(d.midpoint) / (n ** -0.5 * math.log(n))
            row[f"sup_lo_{j}"] = float(d.lo)
            row[f"sup_hi_{j}"] = float(d.hi)
    except (TailBoundViolation, CutoffExceeded) as exc:
        row["status"] = type(exc).__name__
    return row


def validate_walks(N: int, levels=range(6, 13), base_seed: int = 0, budget_bits: int = 64,
                   eps_bits: int = 10, config: SuiteConfig = SuiteConfig()) -> TrialReport:
    """Median of sup|x - x_n| / (n**-1/2 ln n) per n, and its trend over the top three n."""
    levels = list(levels)
    t0 = time.perf_counter()
    seeds = _seeds(N, base_seed)
    rows = _map(_walk_trial, [(s, tuple(levels), budget_bits, eps_bits) for s in seeds])
    rows = _indexed(rows)
    good = [r for r in rows if r["status"] == "ok"]
    medians = {j: statistics.median(r[f"ratio_{j}"] for r in good) for j in levels} if good else {}
    top = levels[-3:]
    slope = theil_sen_slope(top, [medians[j] for j in top]) if len(top) >= 2 and good else float("nan")
    worst = max(medians.values()) if medians else float("inf")
    passed = bool(good) and worst <= config.walk_ratio_max and slope <= config.walk_slope_max
    # rows hold different keys per status; pad so the CSV has one header
    keys = ["seed", "status"] + [f"{k}_{j}" for j in levels for k in ("ratio", "sup_lo", "sup_hi")]
    rows = [{"trial_index": r["trial_index"], **{k: r.get(k, "") for k in keys}} for r in rows]
    return TrialReport("walks", N, rows, worst, passed, time.perf_counter() - t0,
                       {"medians": {str(j): m for j, m in medians.items()},
                        "theil_sen_slope": slope, "exhausted": N - len(good)})
