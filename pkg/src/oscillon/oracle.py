"""Comparison oracles over certified path enclosures.

Every verdict other than ``Exhausted`` is a proof: the two enclosures were
disjoint.  Precision follows a doubling schedule (8, 16, 32, ... bits) so the
total work is within a constant factor of the last round.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .exactnum import Dyadic, Enclosure, Order, precision_bits, separate
from .levypath import GUARD, PathEvaluator, _reduce, dyadic_split

__all__ = [
    "Budget",
    "Verdict",
    "LESS",
    "GREATER",
    "SignCertificate",
    "MinimumSearch",
    "DyadicInterval",
    "as_interval",
    "compare_at_points",
    "compare_to_rational",
    "one_sided_less",
    "compare_to_rational_one_sided",
    "interval_min_enclosure",
    "sign_certificate",
    "precision_schedule",
]


@dataclass(frozen=True)
class Budget:
    """Caps on certified work.  ``max_cells`` bounds branch-and-bound fronts."""

    max_precision_bits: int = 64
    max_refinements: int = 64
    max_cells: int = 1 << 15

    def __post_init__(self):
        if self.max_precision_bits < 1 or self.max_refinements < 1 or self.max_cells < 1:
            raise ValueError("budget fields must be >= 1")


@dataclass(frozen=True)
class Verdict:
    kind: str  # "less", "greater" or "exhausted"
    precision: int = 0
    gap: Dyadic | None = None  # for exhausted: widest enclosure at the final precision

    @property
    def exhausted(self) -> bool:
        return self.kind == "exhausted"

    def flip(self) -> "Verdict":
        if self.kind == "less":
            return Verdict("greater", self.precision)
        if self.kind == "greater":
            return Verdict("less", self.precision)
        return self

    def same_order(self, other: "Verdict") -> bool:
        return self.kind == other.kind

    def __str__(self):
        if self.exhausted:
            return f"Exhausted({self.precision} bits)"
        return self.kind.capitalize()


LESS = Verdict("less")
GREATER = Verdict("greater")


def precision_schedule(b: Budget, start: int = 8):
    """8, 16, 32, ... capped at the budget, at most ``max_refinements`` rounds."""
    p = min(start, b.max_precision_bits)
    for _ in range(b.max_refinements):
        yield p
        if p >= b.max_precision_bits:
            return
        p = min(2 * p, b.max_precision_bits)


def _verdict_from(order: Order, p: int) -> Verdict | None:
    if order is Order.LESS:
        return Verdict("less", p)
    if order is Order.GREATER:
        return Verdict("greater", p)
    return None


def compare_at_points(ev: PathEvaluator, t1, t2, b: Budget) -> Verdict:
    t1, t2 = Dyadic.coerce(t1), Dyadic.coerce(t2)
    if t1 == t2:
        raise ValueError("points must be distinct")
    p = 0
    a = c = None
    for p in precision_schedule(b):
        eps = Dyadic(1, -p)
        a = ev.value_at_dyadic(t1, eps)
        c = ev.value_at_dyadic(t2, eps)
        v = _verdict_from(separate(a, c), p)
        if v is not None:
            return v
    return Verdict("exhausted", p, max(a.width, c.width))


def compare_to_rational(ev: PathEvaluator, t, q, b: Budget) -> Verdict:
    """Certified order of x(t) against the rational q."""
    t = Dyadic.coerce(t)
    q = Fraction(q)
    p = 0
    a = None
    for p in precision_schedule(b):
        a = ev.value_at_dyadic(t, Dyadic(1, -p))
        if a.hi.to_fraction() < q:
            return Verdict("less", p)
        if a.lo.to_fraction() > q:
            return Verdict("greater", p)
    return Verdict("exhausted", p, a.width)


def one_sided_less(ev: PathEvaluator, t, q, b: Budget) -> int | None:
    """Semi-decide x(t) < q from upper bounds alone; the precision that proved it, or None."""
    t = Dyadic.coerce(t)
    q = Fraction(q)
    for p in precision_schedule(b):
        if ev.value_at_dyadic(t, Dyadic(1, -p)).hi.to_fraction() < q:
            return p
    return None


def compare_to_rational_one_sided(ev: PathEvaluator, t, q, b: Budget) -> Verdict:
    """Decide x(t) vs q with two upper-bound searches.

    x(t) > q is searched as x'(t) < -q on the complement path x' = -x, which
    turns one semi-decision procedure into a two-sided decision.
    """
    q = Fraction(q)
    neg = ev.negated()
    t = Dyadic.coerce(t)
    p = 0
    for p in precision_schedule(b):
        eps = Dyadic(1, -p)
        if ev.value_at_dyadic(t, eps).hi.to_fraction() < q:
            return Verdict("less", p)
        if neg.value_at_dyadic(t, eps).hi.to_fraction() < -q:
            return Verdict("greater", p)
    return Verdict("exhausted", p)


# ---------------------------------------------------------------------------
# interval minima


@dataclass(frozen=True)
class DyadicInterval:
    lo: Dyadic
    hi: Dyadic

    def __post_init__(self):
        object.__setattr__(self, "lo", Dyadic.coerce(self.lo))
        object.__setattr__(self, "hi", Dyadic.coerce(self.hi))
        if not (0 <= self.lo < self.hi <= 1):
            raise ValueError("need 0 <= lo < hi <= 1")

    @property
    def level(self) -> int:
        return max(self.lo.level, self.hi.level)

    @property
    def width(self) -> Dyadic:
        return self.hi - self.lo

    def as_enclosure(self) -> Enclosure:
        return Enclosure(self.lo, self.hi)

    def children(self) -> tuple["DyadicInterval", "DyadicInterval"]:
        mid = (self.lo + self.hi).shift(-1)
        return DyadicInterval(self.lo, mid), DyadicInterval(mid, self.hi)

    def disjoint(self, other: "DyadicInterval") -> bool:
        return self.hi < other.lo or other.hi < self.lo

    def __str__(self):
        return f"[{self.lo}, {self.hi}]"

    def as_json(self) -> list:
        return [str(self.lo), str(self.hi)]


def as_interval(I) -> DyadicInterval:
    if isinstance(I, DyadicInterval):
        return I
    if isinstance(I, Enclosure):
        return DyadicInterval(I.lo, I.hi)
    lo, hi = I
    return DyadicInterval(lo, hi)


def _grid(I: DyadicInterval, n: int) -> tuple[int, int, int]:
    """(m, k0, k1): grid level m >= n and index range covering I exactly."""
    m = max(n, I.level)
    return m, I.lo.scaled_floor(m), I.hi.scaled_floor(m)


def interval_min_enclosure(ev: PathEvaluator, I, level: int, eps, modulus: str = "schauder") -> Enclosure:
    """Enclosure of m(I) = min of x over I from the level-n grid.

    The upper bound is the least grid upper bound.  The lower bound is the
    least grid lower bound minus a certified modulus: ``"holder"`` uses
    H * 2**(-n/3); ``"schauder"`` uses the cell slack, the sum of tent
    amplitudes of levels >= n, which is certified under the same tail bound
    and is much tighter.
    """
    I = as_interval(I)
    eps = Dyadic.coerce(eps)
    m, k0, k1 = _grid(I, level)
    lows = []
    highs = []
    for k in range(k0, k1 + 1):
        v = ev.value_at_dyadic(Dyadic(k, -m), eps)
        lows.append(v.lo)
        highs.append(v.hi)
    upper = min(highs)
    if modulus == "holder":
        from .levypath import cbrt_upper
        lower = min(lows) - ev.holder().hi * cbrt_upper(Dyadic(1, -m))
    elif modulus == "schauder":
        s = ev.slack(m)
        lower = min(min(lows[i], lows[i + 1]) for i in range(len(lows) - 1)) - s
    else:
        raise ValueError(f"unknown modulus {modulus!r}")
    return Enclosure(min(lower, upper), upper)


class MinimumSearch:
    """Branch and bound over the dyadic cells of I.

    At level m every surviving cell [k, k+1] / 2**m has the certified lower
    bound min(x(k/2**m), x((k+1)/2**m)) - slack(m); a cell is dropped when
    that bound exceeds the least upper bound of any grid value.  Surviving
    cells always contain the minimizer.
    """

    def __init__(self, ev: PathEvaluator, I, budget: Budget | None = None):
        self.ev = ev
        self.I = as_interval(I)
        self.budget = budget or Budget()
        m, k0, k1 = _grid(self.I, 0)
        if k1 - k0 > self.budget.max_cells:
            raise ValueError("interval is not a union of few enough dyadic cells")
        self.level = m
        self.cells = list(range(k0, k1))
        self.trace: list[Dyadic] = []
        self.exhausted = False
        self.refinements = 0
        self.lower = None  # Fraction
        self.upper = None
        self.precision = 0
        self._bound()

    def _precision(self, m: int) -> int:
        s = self.ev.slack(m)
        if s.mantissa == 0:
            p = m + 8
        else:
            # steps of 4 bits let consecutive levels share cached ancestors
            p = -(-(precision_bits(s) + 2) // 4) * 4
        return max(8, min(p, self.budget.max_precision_bits))

    def _bound(self) -> None:
        ev, m = self.ev, self.level
        p = self._precision(m)
        self.precision = p
        Q = p + GUARD
        slack = ev.slack(m).scaled_ceil(Q)
        vals = {}
        for k in self.cells:
            for kk in (k, k + 1):
                if kk not in vals:
                    vals[kk] = ev.scaled_value(*_reduce(m, kk), p)
        U = min(v[1] for v in vals.values())
        best = min(vals, key=lambda kk: (vals[kk][0] + vals[kk][1], kk))
        self.trace.append(Dyadic(best, -m))
        keep = []
        lows = []
        for k in self.cells:
            lb = min(vals[k][0], vals[k + 1][0]) - slack
            if lb <= U:
                keep.append(k)
                lows.append(lb)
        self.cells = keep
        self.lower = Fraction(min(lows), 1 << Q)
        self.upper = Fraction(U, 1 << Q)

    @property
    def span(self) -> DyadicInterval:
        m = self.level
        return DyadicInterval(Dyadic(self.cells[0], -m), Dyadic(self.cells[-1] + 1, -m))

    @property
    def value_enclosure(self) -> Enclosure:
        Q = self.precision + GUARD
        lo = Dyadic((self.lower.numerator << Q) // self.lower.denominator, -Q)
        hi = Dyadic(-((-self.upper.numerator << Q) // self.upper.denominator), -Q)
        return Enclosure(lo, hi)

    def refine(self) -> bool:
        """Descend one level; False once the budget is spent."""
        if self.refinements >= self.budget.max_refinements or \
                2 * len(self.cells) > self.budget.max_cells:
            self.exhausted = True
            return False
        self.level += 1
        self.cells = [c for k in self.cells for c in (2 * k, 2 * k + 1)]
        self.refinements += 1
        self._bound()
        return True

    def run_until(self, predicate) -> bool:
        while not predicate(self):
            if not self.refine():
                return False
        return True


@dataclass(frozen=True)
class SignCertificate:
    """m(I) < -r when ``negative``, else m(I) > r."""

    r: Dyadic
    negative: bool


def sign_certificate(ev: PathEvaluator, I, b: Budget) -> SignCertificate | Verdict:
    search = MinimumSearch(ev, I, b)

    def decided(s: MinimumSearch) -> bool:
        return s.upper < 0 or s.lower > 0

    if not search.run_until(decided):
        return Verdict("exhausted", search.precision, search.value_enclosure.width)
    v = search.value_enclosure
    if v.hi < 0:
        return SignCertificate(abs(v.hi).shift(-1), True)
    return SignCertificate(v.lo.shift(-1), False)
