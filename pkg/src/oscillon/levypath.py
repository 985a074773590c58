"""The xi-lattice and certified evaluation of the midpoint recursion.

A path is x(0) = 0, x(1) = xi_0, 2 x(1/2) = xi_0 + xi_1 and

    2 x((2n+1)/2**(j+1)) = 2**(-j/2) xi_{j,n} + x(n/2**j) + x((n+1)/2**j).

We index coefficients level-major: c(xi_0) = 0, c(xi_1) = 1 and
c(xi_{j,n}) = 2**j + n, so xi_1 is the level-0 coefficient of the same
formula (j = 0, n = 0).  Internally values live in integer fixed point
``(lo, hi)`` at scale ``2**-(p + GUARD)``; the public API returns
``Enclosure`` objects.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import isqrt

from .bitstream import BitSource, cantor_pair
from .exactnum import Dyadic, Enclosure, precision_bits, sqrt2_scaled
from .gauss import CutoffExceeded, quantile_bound

__all__ = [
    "TailBound",
    "TailBoundViolation",
    "TruncatedXi",
    "XiLattice",
    "PathEvaluator",
    "Surd",
    "coefficient_index",
    "dyadic_split",
    "xi",
    "value_at_dyadic",
    "value_at_real",
    "negated_evaluator",
]

GUARD = 12
MAX_XI_BITS = 320  # enough to clear the +-16 cutoff (Phi(-16) > 2**-190)
_SQRT2_BITS = 24   # extra bits of sqrt(2) beyond the working scale


class TailBoundViolation(ArithmeticError):
    """A generated coefficient exceeds the assumed bound A + B sqrt(j)."""


def coefficient_index(j: int, n: int) -> int:
    """Level-major index; ``j = -1`` names xi_0, ``j = 0`` names xi_1."""
    if j == -1:
        if n != 0:
            raise ValueError("xi_0 has only n = 0")
        return 0
    if j < 0 or not 0 <= n < (1 << j):
        raise ValueError(f"invalid coefficient (j={j}, n={n})")
    return (1 << j) + n


def coefficient_of(c: int) -> tuple[int, int]:
    if c == 0:
        return -1, 0
    j = c.bit_length() - 1
    return j, c - (1 << j)


def dyadic_split(t: Dyadic) -> tuple[int, int]:
    """(m, k) with t = k / 2**m and k odd, or m = 0 for t in {0, 1}."""
    t = Dyadic.coerce(t)
    if t < 0 or t > 1:
        raise ValueError("t must lie in [0, 1]")
    if t.exponent >= 0:
        return 0, t.mantissa << t.exponent
    return -t.exponent, t.mantissa


# ---------------------------------------------------------------------------
# certified series bounds


def _sqrt_upper(n: int, bits: int) -> Fraction:
    """Dyadic upper bound of sqrt(n)."""
    r = isqrt(n << (2 * bits))
    if r * r != n << (2 * bits):
        r += 1
    return Fraction(r, 1 << bits)


def _sqrt_lower(n: int, bits: int) -> Fraction:
    return Fraction(isqrt(n << (2 * bits)), 1 << bits)


def _root_upper(n: int, bits: int = 64) -> Fraction:
    """Dyadic upper bound of 2**(-1/n)."""
    # smallest q = a / 2**bits with q**n >= 1/2
    lo, hi = 0, 1 << bits
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if 2 * mid ** n >= 1 << (bits * n):
            hi = mid
        else:
            lo = mid
    return Fraction(hi, 1 << bits)


def _round_up(x: Fraction, bits: int = 96) -> Fraction:
    return Fraction(-((-x.numerator << bits) // x.denominator), 1 << bits)


@lru_cache(maxsize=4096)
def weighted_tail(A: Fraction, B: Fraction, r: Fraction, start: int, scale: Fraction = Fraction(1)) -> Fraction:
    """Upper bound of sum_{k >= start} scale * (A + B sqrt(k)) * r**k, 0 < r < 1."""
    # rounding and cutoff are relative to r**start so deep tails stay sharp
    bits = 96 + start
    cutoff = Fraction(1, 1 << (80 + start))
    total = Fraction(0)
    k = start
    rk = _round_up(r ** k, bits) if k else Fraction(1)
    while True:
        term = _round_up(scale * (A + B * _sqrt_upper(k, 32)) * rk, bits)
        kk = max(k, 1)
        # successive-term ratio is at most r * sqrt((k+1)/k) <= r * (1 + 1/(2k))
        rho = r * (1 + Fraction(1, 2 * kk))
        if rho < Fraction(15, 16) and term < cutoff:
            return _round_up(total + term / (1 - rho), bits)
        total += term
        rk = _round_up(rk * r, bits)
        k += 1
        if k - start > 4000:
            rho = r * (1 + Fraction(1, 2 * k))
            return _round_up(total + term / (1 - rho), bits)


_R_HALF = _root_upper(2)   # >= 2**(-1/2)
_R_SIXTH = _root_upper(6)  # >= 2**(-1/6)


@dataclass(frozen=True)
class TailBound:
    """Assumed bound |xi_{j,n}| <= A + B sqrt(j) for j >= 1."""

    A: Dyadic = Dyadic(2)
    B: Dyadic = Dyadic(2)

    def __post_init__(self):
        object.__setattr__(self, "A", Dyadic.coerce(self.A))
        object.__setattr__(self, "B", Dyadic.coerce(self.B))
        if self.A <= 0 or self.B <= 0:
            raise ValueError("tail bound parameters must be positive")

    def bound(self, j: int) -> tuple[Fraction, Fraction]:
        """(lower, upper) rational bounds of A + B sqrt(j)."""
        a, b = self.A.to_fraction(), self.B.to_fraction()
        return a + b * _sqrt_lower(j, 40), a + b * _sqrt_upper(j, 40)


# ---------------------------------------------------------------------------
# truncated-test lattices and exact surd values


@dataclass(frozen=True)
class TruncatedXi:
    """Explicit coefficients for levels <= J; exact zero beyond."""

    J: int
    values: dict = field(default_factory=dict)  # coefficient index -> Dyadic

    def __post_init__(self):
        vals = {}
        for c, v in dict(self.values).items():
            j, _ = coefficient_of(c)
            if j > self.J:
                raise ValueError(f"coefficient {c} is beyond level J={self.J}")
            v = Dyadic.coerce(v)
            if v != 0:
                vals[c] = v
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_levels(cls, J: int, xi0=0, xi1=0, levels=None) -> "TruncatedXi":
        vals = {0: Dyadic.coerce(xi0), 1: Dyadic.coerce(xi1)}
        for (j, n), v in (levels or {}).items():
            vals[coefficient_index(j, n)] = Dyadic.coerce(v)
        return cls(J, vals)

    @classmethod
    def random(cls, J: int, rng: random.Random, bits: int = 20) -> "TruncatedXi":
        """Dyadic approximations of Gaussians, for tests."""
        vals = {}
        for c in range(1 << (J + 1)):
            vals[c] = Dyadic(round(rng.gauss(0.0, 1.0) * (1 << bits)), -bits)
        return cls(J, vals)

    def get(self, c: int) -> Dyadic:
        return self.values.get(c, Dyadic(0))

    def negated(self) -> "TruncatedXi":
        return TruncatedXi(self.J, {c: -v for c, v in self.values.items()})

    def to_json(self) -> str:
        return json.dumps({"J": self.J,
                           "values": {str(c): str(v) for c, v in sorted(self.values.items())}})

    @classmethod
    def from_json(cls, text: str) -> "TruncatedXi":
        """Accepts {"J": .., "values": {index: "m*2^e" | "3/8" | ...}}."""
        from .exactnum import parse_dyadic
        obj = json.loads(text)
        vals = {}
        for c, v in obj.get("values", {}).items():
            vals[int(c)] = parse_dyadic(str(v))
        return cls(int(obj["J"]), vals)


@dataclass(frozen=True)
class Surd:
    """The exact number a + sqrt(2) * b with dyadic a and b."""

    a: Dyadic
    b: Dyadic = Dyadic(0)

    def __add__(self, other: "Surd") -> "Surd":
        return Surd(self.a + other.a, self.b + other.b)

    def __sub__(self, other: "Surd") -> "Surd":
        return Surd(self.a - other.a, self.b - other.b)

    def __neg__(self) -> "Surd":
        return Surd(-self.a, -self.b)

    def scale(self, d: Dyadic) -> "Surd":
        return Surd(self.a * d, self.b * d)

    def times_sqrt2(self) -> "Surd":
        return Surd(self.b.shift(1), self.a)

    def shift(self, k: int) -> "Surd":
        return Surd(self.a.shift(k), self.b.shift(k))

    def is_rational(self) -> bool:
        return self.b == 0

    def enclosure(self, eps: Dyadic) -> Enclosure:
        """Enclosure of width <= eps (exact point when b == 0)."""
        if self.b == 0:
            return Enclosure(self.a)
        p = precision_bits(eps)
        mag = abs(self.b).mantissa.bit_length() + abs(self.b).exponent
        q = max(p + max(mag, 0) + 2, 1)
        lo, hi = sqrt2_scaled(q)
        r = Enclosure(Dyadic(lo, -q), Dyadic(hi, -q)) * Enclosure(self.b)
        return r + Enclosure(self.a)


def _coef_surd(j: int) -> Surd:
    """2**(-j/2 - 1) as a surd."""
    if j % 2 == 0:
        return Surd(Dyadic(1, -(j // 2) - 1))
    return Surd(Dyadic(0), Dyadic(1, -(j + 1) // 2 - 1))


# ---------------------------------------------------------------------------
# lattice


class XiLattice:
    """Gaussian coefficients drawn lazily from a bit source, or stored exactly.

    In stochastic mode coefficient c reads the substream bits
    ``source.bit(<c, k>)``; after k bits the uniform variate is known to lie
    in [U/2**k, (U+1)/2**k] and the coefficient in the image of that interval
    under the inverse normal CDF.  The number of bits read is a deterministic
    function of (c, requested width), so caches never change results.
    """

    def __init__(self, source: BitSource | None = None, truncated: TruncatedXi | None = None,
                 tail: TailBound | None = None):
        if (source is None) == (truncated is None):
            raise ValueError("give exactly one of source or truncated")
        self.source = source
        self.truncated = truncated
        self.tail = tail or TailBound()
        self._prefix: dict[int, tuple[int, int]] = {}
        self._enc: dict[tuple[int, int], Enclosure] = {}
        self._checked: set[int] = set()
        self._bounds: dict[int, tuple[int, int]] = {}

    @property
    def mode(self) -> str:
        return "truncated" if self.truncated is not None else "stochastic"

    def _bits(self, c: int, k: int) -> int:
        U, have = self._prefix.get(c, (0, 0))
        if have >= k:
            return U >> (have - k)
        more = self.source.read_substream(c, have, k - have)
        U = (U << (k - have)) | more
        self._prefix[c] = (U, k)
        return U

    @staticmethod
    def _ends(U: int, k: int) -> tuple[Dyadic, Dyadic]:
        """Certified lower end for U/2**k and upper end for (U+1)/2**k."""
        tz = (U & -U).bit_length() - 1
        lo = quantile_bound(U >> tz, k - tz, False)
        V = U + 1
        tz = (V & -V).bit_length() - 1
        hi = quantile_bound(V >> tz, k - tz, True)
        return lo, hi

    def _draw(self, c: int, e: int) -> Enclosure:
        """Coefficient enclosure of width <= 2**-e from the fewest scheduled bits."""
        k = max(e + 3, 4)
        while True:
            if k > MAX_XI_BITS:
                raise CutoffExceeded(
                    f"coefficient {c}: uniform variate still within the cutoff "
                    f"tail after {MAX_XI_BITS} bits")
            U = self._bits(c, k)
            top = 1 << k
            if U == 0 or U + 1 == top:
                k += 8
                continue
            try:
                lo, hi = self._ends(U, k)
            except CutoffExceeded:
                k += 8
                continue
            # width <= 2**-e, tested on integers at scale 2**e
            if hi.scaled_ceil(e) - lo.scaled_floor(e) <= 1:
                return Enclosure(lo, hi)
            k += 2

    def _bound(self, j: int) -> tuple[int, int]:
        """A + B sqrt(j) as integers (lo, hi) at scale 2**-32."""
        b = self._bounds.get(j)
        if b is None:
            lo, hi = self.tail.bound(j)
            b = self._bounds[j] = ((lo.numerator << 32) // lo.denominator,
                                   -((-hi.numerator << 32) // hi.denominator))
        return b

    def _check_tail(self, c: int, enc: Enclosure, e: int) -> None:
        j, n = coefficient_of(c)
        if j < 1:
            return
        b_lo, b_hi = self._bound(j)
        while True:
            lo, hi = enc.lo.scaled_floor(32), enc.hi.scaled_ceil(32)
            if max(-lo, hi) <= b_lo:
                self._checked.add(c)
                return
            if lo > b_hi or -hi > b_hi:
                raise TailBoundViolation(
                    f"xi_({j},{n}) ~ {float(enc.midpoint):.4g} exceeds the assumed "
                    f"bound {b_hi / 2 ** 32:.4g} = A + B*sqrt({j})")
            e += 8
            enc = self.enclosure(c, e)

    def enclosure(self, c: int, e: int) -> Enclosure:
        """Enclosure of coefficient c with width <= 2**-e."""
        key = (c, e)
        enc = self._enc.get(key)
        if enc is not None:
            return enc
        if self.truncated is not None:
            enc = Enclosure(self.truncated.get(c))
        else:
            enc = self._draw(c, e)
        self._enc[key] = enc
        if c not in self._checked and self.truncated is None:
            self._check_tail(c, enc, e)
        return enc

    def xi(self, j: int, n: int, eps) -> Enclosure:
        return self.enclosure(coefficient_index(j, n), max(precision_bits(eps), 0))

    def complement(self) -> "XiLattice":
        if self.source is None:
            raise ValueError("complement is only defined for stochastic lattices")
        return XiLattice(source=self.source.complement(), tail=self.tail)


# ---------------------------------------------------------------------------
# evaluator


def _floor_shift(v: int, k: int) -> int:
    return v << k if k >= 0 else v >> -k


def _ceil_shift(v: int, k: int) -> int:
    return v << k if k >= 0 else -((-v) >> -k)


class PathEvaluator:
    """Certified evaluation of one path.

    ``holder_levels`` is the horizon up to which the Hoelder constant uses
    the generated coefficients; beyond it the tail bound is used.
    """

    def __init__(self, lattice: XiLattice, tail: TailBound | None = None, holder_levels: int = 8):
        self.lattice = lattice
        self.tail = tail or lattice.tail
        self.holder_levels = holder_levels
        self._vals: dict[tuple[int, int, int], tuple[int, int]] = {}
        self._exact: dict[tuple[int, int], Surd] = {}
        self._slack: dict[int, Dyadic] = {}
        self._horizon: dict[int, int] = {}
        self._sqrt2: dict[int, tuple[int, int]] = {}
        self._holder: Enclosure | None = None

    @classmethod
    def stochastic(cls, source: BitSource, tail: TailBound | None = None, **kw) -> "PathEvaluator":
        return cls(XiLattice(source=source, tail=tail), **kw)

    @classmethod
    def truncated(cls, spec: TruncatedXi, **kw) -> "PathEvaluator":
        return cls(XiLattice(truncated=spec), **kw)

    @property
    def mode(self) -> str:
        return self.lattice.mode

    # -- coefficients -------------------------------------------------------

    def xi(self, j: int, n: int, eps) -> Enclosure:
        return self.lattice.xi(j, n, eps)

    # -- exact values (truncated mode) -------------------------------------

    def exact_value(self, t) -> Surd:
        """x(t) as an exact surd; truncated-test mode only."""
        if self.lattice.truncated is None:
            raise ValueError("exact values exist only in truncated-test mode")
        return self._exact_mk(*dyadic_split(t))

    def _exact_mk(self, m: int, k: int) -> Surd:
        if m == 0:
            return Surd(Dyadic(0)) if k == 0 else Surd(self.lattice.truncated.get(0))
        key = (m, k)
        v = self._exact.get(key)
        if v is not None:
            return v
        spec = self.lattice.truncated
        j = m - 1
        left = self._exact_mk(*_reduce(m, k - 1))
        right = self._exact_mk(*_reduce(m, k + 1))
        v = (left + right).shift(-1)
        if j <= spec.J:
            x = spec.get((1 << j) + (k >> 1))
            if x != 0:
                v = v + _coef_surd(j).scale(x)
        self._exact[key] = v
        return v

    # -- fast certified values ---------------------------------------------

    def _sqrt2_at(self, scale: int) -> tuple[int, int]:
        s = self._sqrt2.get(scale)
        if s is None:
            s = self._sqrt2[scale] = sqrt2_scaled(scale)
        return s

    def horizon(self, p: int) -> int:
        """Level beyond which the tail bound, not coefficients, is used."""
        J = self._horizon.get(p)
        if J is None:
            if self.lattice.truncated is not None:
                J = self.lattice.truncated.J + 1
            else:
                target = Fraction(1, 1 << (p + 2))
                J = max(p, 8)
                while self.slack(J).to_fraction() >= target:
                    J += 4
            self._horizon[p] = J
        return J

    def scaled_value(self, m: int, k: int, p: int) -> tuple[int, int]:
        """x(k/2**m) as integers (lo, hi) at scale 2**-(p+GUARD), width <= 2**-p."""
        key = (p, m, k)
        v = self._vals.get(key)
        if v is not None:
            return v
        Q = p + GUARD
        if m == 0:
            if k == 0:
                v = (0, 0)
            else:
                enc = self.lattice.enclosure(0, p + 2)
                v = (enc.lo.scaled_floor(Q), enc.hi.scaled_ceil(Q))
        elif self.lattice.truncated is not None:
            enc = self._exact_mk(m, k).enclosure(Dyadic(1, -(Q + 1)))
            v = (enc.lo.scaled_floor(Q), enc.hi.scaled_ceil(Q))
        else:
            J = self.horizon(p)
            if m > J:
                v = self._beyond_horizon(m, k, p, J)
            else:
                l_lo, l_hi = self.scaled_value(*_reduce(m, k - 1), p)
                r_lo, r_hi = self.scaled_value(*_reduce(m, k + 1), p)
                t_lo, t_hi = self._term(m - 1, k >> 1, p)
                v = ((l_lo + r_lo) >> 1) + t_lo, -((-(l_hi + r_hi)) >> 1) + t_hi
        self._vals[key] = v
        return v

    def _term(self, j: int, n: int, p: int) -> tuple[int, int]:
        """2**(-j/2-1) * xi_{j,n} at scale 2**-(p+GUARD)."""
        Q = p + GUARD
        # coefficient widths 2**-e_j keep the summed term widths below eps/2
        # while letting deep levels get away with a handful of bits
        e = max(p + 4 - j // 2 + -(-abs(j - 2 * p) // 3), 1)
        enc = self.lattice.enclosure((1 << j) + n, e)
        if j % 2 == 0:
            sh = j // 2 + 1
            return enc.lo.scaled_floor(Q - sh), enc.hi.scaled_ceil(Q - sh)
        sh = (j + 1) // 2 + 1
        R = Q + _SQRT2_BITS
        s_lo, s_hi = self._sqrt2_at(R)
        x_lo, x_hi = enc.lo.scaled_floor(R), enc.hi.scaled_ceil(R)
        lo = (s_lo if x_lo >= 0 else s_hi) * x_lo
        hi = (s_hi if x_hi >= 0 else s_lo) * x_hi
        # product scale 2**-(2R); want 2**-Q after the extra 2**-sh
        return _floor_shift(lo, Q - 2 * R - sh), _ceil_shift(hi, Q - 2 * R - sh)

    def _beyond_horizon(self, m: int, k: int, p: int, J: int) -> tuple[int, int]:
        # linear interpolation between level-J neighbours plus the tail radius
        d = m - J
        a = k >> d
        frac_num = k - (a << d)
        a_lo, a_hi = self.scaled_value(*_reduce(J, a), p)
        b_lo, b_hi = self.scaled_value(*_reduce(J, a + 1), p)
        w1, w0 = frac_num, (1 << d) - frac_num
        lo = (a_lo * w0 + b_lo * w1) >> d
        hi = -((-(a_hi * w0 + b_hi * w1)) >> d)
        r = self.slack(J).scaled_ceil(p + GUARD)
        return lo - r, hi + r

    # -- public evaluation -------------------------------------------------

    def value_at_dyadic(self, t, eps) -> Enclosure:
        t = Dyadic.coerce(t)
        p = max(precision_bits(eps), 0)
        m, k = dyadic_split(t)
        if self.lattice.truncated is not None:
            return self._exact_mk(m, k).enclosure(Dyadic.coerce(eps))
        lo, hi = self.scaled_value(m, k, p)
        return Enclosure.from_scaled(lo, hi, p + GUARD)

    def value_at_real(self, t: Enclosure, eps) -> Enclosure:
        """Enclosure of {x(s) : s in t} via the Hoelder-1/3 modulus."""
        if not isinstance(t, Enclosure):
            t = Enclosure(t)
        if t.lo < 0 or t.hi > 1:
            raise ValueError("t must lie in [0, 1]")
        eps = Dyadic.coerce(eps)
        mid = t.midpoint
        v = self.value_at_dyadic(mid, eps)
        if t.is_point():
            return v
        r = self.holder().hi * cbrt_upper(t.width)
        return v.inflate(r + eps)

    # -- moduli ------------------------------------------------------------

    def slack(self, m: int) -> Dyadic:
        """Upper bound of |x(t) - chord| over any level-m cell.

        The chord is the linear interpolation of the cell's endpoint values;
        what remains is the sum of all Schauder tents of levels >= m.
        """
        s = self._slack.get(m)
        if s is not None:
            return s
        spec = self.lattice.truncated
        if spec is not None:
            total = Fraction(0)
            for j in range(m, spec.J + 1):
                M = max((abs(spec.get((1 << j) + n)) for n in range(1 << j)), default=Dyadic(0))
                total += _coef_upper(j) * M.to_fraction()
        else:
            a, b = self.tail.A.to_fraction(), self.tail.B.to_fraction()
            start = max(m, 1)
            total = weighted_tail(a, b, _R_HALF, start, Fraction(1, 2))
            if m == 0:
                total += self.lattice.enclosure(1, 4).abs_max().to_fraction() / 2
        s = _dyadic_ceil(total, 64 + m)
        self._slack[m] = s
        return s

    def holder(self) -> Enclosure:
        """Enclosure of H with |x(s) - x(t)| <= H |s - t|**(1/3) on [0, 1]."""
        if self._holder is not None:
            return self._holder
        spec = self.lattice.truncated
        lat = self.lattice
        J = spec.J if spec is not None else self.holder_levels
        r = _R_SIXTH
        lo = Fraction(0)
        hi = Fraction(0)
        x0 = lat.enclosure(0, 4)
        lo_abs = _abs_min(x0)
        lo += lo_abs
        hi += x0.abs_max().to_fraction()
        rk = Fraction(1)
        for k in range(0, J + 1):
            Ms = [lat.enclosure((1 << k) + n, 4) for n in range(1 << k)]
            m_hi = max(e.abs_max().to_fraction() for e in Ms)
            m_lo = max(_abs_min(e) for e in Ms)
            lo += m_lo * _root_lower_pow(k)
            hi += _round_up(m_hi * rk)
            rk = _round_up(rk * r)
        if spec is None:
            hi += weighted_tail(self.tail.A.to_fraction(), self.tail.B.to_fraction(), r, J + 1)
        self._holder = Enclosure(_dyadic_floor(lo), _dyadic_ceil(hi))
        return self._holder

    # -- misc ---------------------------------------------------------------

    def negated(self) -> "PathEvaluator":
        return PathEvaluator(self.lattice.complement(), self.tail, self.holder_levels)

    def dump(self, level: int, eps) -> list[dict]:
        """Path values on the level grid as JSON-ready records."""
        out = []
        for i in range((1 << level) + 1):
            t = Dyadic(i, -level)
            v = self.value_at_dyadic(t, eps)
            out.append({"t": str(t), "lo": str(v.lo), "hi": str(v.hi)})
        return out


def _reduce(m: int, k: int) -> tuple[int, int]:
    if k == 0:
        return 0, 0
    while m > 0 and k % 2 == 0:
        k >>= 1
        m -= 1
    return m, k


def _coef_upper(j: int) -> Fraction:
    """Upper bound of 2**(-j/2 - 1)."""
    if j % 2 == 0:
        return Fraction(1, 1 << (j // 2 + 1))
    return _sqrt_upper(2, 64) / (1 << ((j + 1) // 2 + 1))


def _root_lower_pow(k: int) -> Fraction:
    # crude lower bound of 2**(-k/6): 2**(-ceil(k/6))
    return Fraction(1, 1 << -(-k // 6))


def _abs_min(e: Enclosure) -> Fraction:
    if e.lo.sign() * e.hi.sign() <= 0:
        return Fraction(0)
    return min(abs(e.lo), abs(e.hi)).to_fraction()


def _dyadic_ceil(x: Fraction, bits: int = 64) -> Dyadic:
    return Dyadic(-((-x.numerator << bits) // x.denominator), -bits)


def _dyadic_floor(x: Fraction, bits: int = 64) -> Dyadic:
    return Dyadic((x.numerator << bits) // x.denominator, -bits)


def cbrt_upper(w: Dyadic, bits: int = 40) -> Dyadic:
    """Dyadic upper bound of w**(1/3) for w >= 0."""
    w = Dyadic.coerce(w)
    if w.mantissa == 0:
        return Dyadic(0)
    N = w.scaled_ceil(3 * bits)
    r = _icbrt(N)
    if r ** 3 < N:
        r += 1
    return Dyadic(r, -bits)


def _icbrt(n: int) -> int:
    if n < 2:
        return n
    x = 1 << ((n.bit_length() + 2) // 3)
    while True:
        y = (2 * x + n // (x * x)) // 3
        if y >= x:
            break
        x = y
    while x ** 3 > n:
        x -= 1
    while (x + 1) ** 3 <= n:
        x += 1
    return x


# ---------------------------------------------------------------------------
# functional interface


def xi(ev: PathEvaluator, j: int, n: int, eps) -> Enclosure:
    return ev.xi(j, n, eps)


def value_at_dyadic(ev: PathEvaluator, t, eps) -> Enclosure:
    return ev.value_at_dyadic(t, eps)


def value_at_real(ev: PathEvaluator, t: Enclosure, eps) -> Enclosure:
    return ev.value_at_real(t, eps)


def negated_evaluator(ev: PathEvaluator) -> PathEvaluator:
    return ev.negated()
