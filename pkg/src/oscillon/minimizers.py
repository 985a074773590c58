"""Certified local minimizers: grid argmins, localization, staged enumeration."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .exactnum import Dyadic, Enclosure, Order, separate
from .levypath import PathEvaluator
from .oracle import (Budget, DyadicInterval, MinimumSearch, Verdict, as_interval,
                     precision_schedule)

__all__ = [
    "MinimizerRecord",
    "Exhausted",
    "Enumeration",
    "grid_argmin",
    "locate_minimizer",
    "enumerate_minimizers",
    "write_jsonl",
    "read_jsonl",
]


@dataclass(frozen=True)
class MinimizerRecord:
    host: DyadicInterval
    enclosure: Enclosure
    value_enclosure: Enclosure
    stage: int = 0
    grid_trace: tuple = ()

    def as_json(self) -> dict:
        return {
            "stage": self.stage,
            "host": self.host.as_json(),
            "lo": str(self.enclosure.lo),
            "hi": str(self.enclosure.hi),
            "value_lo": str(self.value_enclosure.lo),
            "value_hi": str(self.value_enclosure.hi),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "MinimizerRecord":
        host = DyadicInterval(Dyadic.parse(obj["host"][0]), Dyadic.parse(obj["host"][1]))
        return cls(host,
                   Enclosure(Dyadic.parse(obj["lo"]), Dyadic.parse(obj["hi"])),
                   Enclosure(Dyadic.parse(obj["value_lo"]), Dyadic.parse(obj["value_hi"])),
                   int(obj["stage"]))


@dataclass(frozen=True)
class Exhausted:
    """Budget ran out; ``span`` is the best surviving hull of candidate cells."""

    span: DyadicInterval | None
    value_enclosure: Enclosure | None = None
    precision: int = 0
    reason: str = "budget"

    def __bool__(self):
        return False


def grid_argmin(ev: PathEvaluator, I, n: int, b: Budget) -> Dyadic | Verdict:
    """The level-n grid point of I whose value is certified below all others.

    The grid is {k/2**n : [k/2**n, (k+1)/2**n] inside I}.  All grid values
    are refined together on the oracle's doubling schedule, which is a
    tournament of point comparisons sharing one precision.
    """
    I = as_interval(I)
    k0 = I.lo.scaled_ceil(n)
    k1 = I.hi.scaled_floor(n) - 1
    if k1 < k0:
        raise ValueError("the level-n grid of I is empty")
    pts = [Dyadic(k, -n) for k in range(k0, k1 + 1)]
    if len(pts) == 1:
        return pts[0]
    p = 0
    for p in precision_schedule(b):
        eps = Dyadic(1, -p)
        vals = [ev.value_at_dyadic(t, eps) for t in pts]
        best = min(range(len(pts)), key=lambda i: vals[i].hi)
        top = vals[best].hi
        if all(top < v.lo for i, v in enumerate(vals) if i != best):
            return pts[best]
    return Verdict("exhausted", p)


def _avoids(span: DyadicInterval, level: int | None, host: DyadicInterval) -> bool:
    """True when the span meets level dyadics only at endpoints of the host.

    Minimizers of genuine paths are a.s. not dyadic, so the strict test
    passes eventually; the host exemption serves paths whose minimizer sits
    on the host boundary (truncated lattices, e.g. x(t) = t on [0, 1]).
    """
    if level is None:
        return True
    a, b = span.lo.scaled_ceil(level), span.hi.scaled_floor(level)
    return all(Dyadic(k, -level) in (host.lo, host.hi) for k in range(a, b + 1))


def locate_minimizer(ev: PathEvaluator, I, width_target, b: Budget | None = None,
                     stage: int = 0, avoid_level: int | None = None) -> MinimizerRecord | Exhausted:
    """Certified enclosure of the unique minimizer of x on I.

    Cells are discarded by branch and bound until the surviving cells span at
    most ``width_target``.  With ``avoid_level`` the enclosure is refined
    further until it contains no dyadic of that level, which keeps records
    from neighbouring cells disjoint.  On stochastic paths the value
    enclosure is then refined, budget permitting, until it excludes 0.
    """
    I = as_interval(I)
    width_target = Dyadic.coerce(width_target)
    search = MinimumSearch(ev, I, b or Budget())

    def done(s: MinimumSearch) -> bool:
        span = s.span
        return span.width <= width_target and _avoids(span, avoid_level, I)

    if not search.run_until(done):
        return Exhausted(search.span, search.value_enclosure, search.precision)
    if ev.lattice.truncated is None:
        # m(I) != 0 almost surely; spend what budget is left on settling its
        # sign so records never straddle the zero set.  Refining only narrows.
        search.run_until(lambda s: s.upper < 0 or s.lower > 0)
    return MinimizerRecord(I, search.span.as_enclosure(), search.value_enclosure,
                           stage, tuple(search.trace))


@dataclass
class Enumeration:
    records: list = field(default_factory=list)
    complete: bool = True
    exhausted_stage: int | None = None
    # (parent record, left child localization, right child localization, left inherits)
    splits: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)

    def by_stage(self, stage: int) -> list:
        return [r for r in self.records if r.stage == stage]


def _compare_minima(ev, left: MinimizerRecord, right: MinimizerRecord, width, b, S):
    """Refine the two localizations until their value enclosures separate."""
    for _ in range(b.max_refinements):
        order = separate(left.value_enclosure, right.value_enclosure)
        if order is not Order.OVERLAP:
            return order, left, right
        width = width.shift(-2)
        nl = locate_minimizer(ev, left.host, width, b, left.stage, S)
        nr = locate_minimizer(ev, right.host, width, b, right.stage, S)
        if isinstance(nl, Exhausted) or isinstance(nr, Exhausted):
            return None, left, right
        left, right = nl, nr
    return None, left, right


def enumerate_minimizers(ev: PathEvaluator, S: int, b: Budget | None = None,
                         width_target=None) -> Enumeration:
    """Stage 0 emits the minimizer of [0, 1]; stage n the 2**(n-1) new ones.

    At stage n each level-(n-1) cell splits into two children.  The child
    whose minimum is lower inherits the parent's minimizer; the other
    child's minimizer has not been seen before and is emitted.
    """
    if S < 0:
        raise ValueError("S must be >= 0")
    b = b or Budget()
    width = Dyadic.coerce(width_target) if width_target is not None else Dyadic(1, -(S + 10))
    out = Enumeration()
    root = DyadicInterval(0, 1)
    first = locate_minimizer(ev, root, width, b, 0, S)
    if isinstance(first, Exhausted):
        out.complete = False
        out.exhausted_stage = 0
        return out
    out.records.append(first)
    owners = [first]  # record of the minimizer of each level-(n-1) cell, left to right
    cells = [root]
    for n in range(1, S + 1):
        next_owners, next_cells = [], []
        for parent_cell, parent in zip(cells, owners):
            lc, rc = parent_cell.children()
            left = locate_minimizer(ev, lc, width, b, n, S)
            right = locate_minimizer(ev, rc, width, b, n, S)
            if isinstance(left, Exhausted) or isinstance(right, Exhausted):
                out.complete = False
                out.exhausted_stage = n
                return out
            order, left, right = _compare_minima(ev, left, right, width, b, S)
            if order is None:
                out.complete = False
                out.exhausted_stage = n
                return out
            left_inherits = order is Order.LESS
            out.records.append(right if left_inherits else left)
            out.splits.append((parent, left, right, left_inherits))
            next_owners += [left, right]
            next_cells += [lc, rc]
        owners, cells = next_owners, next_cells
    return out


def write_jsonl(records, fh) -> None:
    for r in records:
        fh.write(json.dumps(r.as_json()) + "\n")


def read_jsonl(fh) -> list:
    return [MinimizerRecord.from_json(json.loads(line)) for line in fh if line.strip()]
