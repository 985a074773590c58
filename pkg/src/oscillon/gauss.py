"""Rigorous enclosures of the standard normal CDF and its inverse.

All arithmetic is on Python integers in fixed point with explicit floor/ceil
rounding, so every returned enclosure is a proof, not an estimate.  The CDF
uses

    Phi(x) = 1/2 + phi(x) * sum_{n>=0} x**(2n+1) / (2n+1)!!

whose terms are all positive for x > 0 (no cancellation inside the sum),
together with a range-reduced exponential and a Machin-formula pi.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from statistics import NormalDist

from .exactnum import Dyadic, Enclosure, precision_bits

__all__ = [
    "CUTOFF",
    "CutoffExceeded",
    "NormalQuery",
    "normal_cdf",
    "normal_inverse",
    "inverse_breakpoint",
    "quantile_bound",
]

CUTOFF = 16

_STD = NormalDist()


class CutoffExceeded(ArithmeticError):
    """Argument (or probability) lies beyond the +-CUTOFF window of the normal law."""


# ---------------------------------------------------------------------------
# fixed-point building blocks


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def _shift_floor(v: int, k: int) -> int:
    return v << k if k >= 0 else v >> -k


def _shift_ceil(v: int, k: int) -> int:
    return v << k if k >= 0 else -((-v) >> -k)


def _arctan_inv(m: int, w: int) -> tuple[int, int]:
    """arctan(1/m) scaled by 2**w, as (lo, hi).  Alternating series."""
    lo = hi = 0
    power_lo = (1 << w) // m
    power_hi = _ceil_div(1 << w, m)
    m2 = m * m
    k = 0
    sign = 1
    while power_hi > 1:
        t_lo = power_lo // (2 * k + 1)
        t_hi = _ceil_div(power_hi, 2 * k + 1)
        if sign > 0:
            lo += t_lo
            hi += t_hi
        else:
            lo -= t_hi
            hi -= t_lo
        power_lo //= m2
        power_hi = _ceil_div(power_hi, m2)
        k += 1
        sign = -sign
    # the omitted alternating tail is bounded by its first term, <= 1 unit
    return lo - 2, hi + 2


@lru_cache(maxsize=64)
def _sqrt_two_pi(w: int) -> tuple[int, int]:
    """sqrt(2*pi) scaled by 2**w."""
    g = w + 8
    a_lo, a_hi = _arctan_inv(5, g)
    b_lo, b_hi = _arctan_inv(239, g)
    two_pi_lo = 32 * a_lo - 8 * b_hi
    two_pi_hi = 32 * a_hi - 8 * b_lo
    # scale 2**g -> value; sqrt(v * 2**-g) * 2**w = sqrt(v * 2**(2w-g))
    lo = _isqrt_floor(_shift_floor(two_pi_lo, 2 * w - g))
    hi = _isqrt_floor(_shift_ceil(two_pi_hi, 2 * w - g)) + 1
    return lo, hi


def _isqrt_floor(v: int) -> int:
    from math import isqrt
    return isqrt(v)


def _exp_dyadic(m: int, e: int, w: int) -> tuple[int, int, int]:
    """exp(m * 2**e) for m >= 0 as (lo, hi, exp): value in [lo, hi] * 2**exp.

    Relative precision is roughly 2**-w.
    """
    if m == 0:
        return 1, 1, 0
    mag = m.bit_length() + e  # value < 2**mag
    s = max(0, mag + 3)  # reduced argument r < 2**-3
    work = w + s + 16
    # r = m * 2**(e - s), scaled by 2**work
    r_lo = _shift_floor(m, e - s + work)
    r_hi = _shift_ceil(m, e - s + work)
    one = 1 << work
    sum_lo = sum_hi = one
    t_lo = t_hi = one
    n = 1
    while t_hi > 1:
        t_lo = (t_lo * r_lo >> work) // n
        t_hi = _ceil_div(_shift_ceil(t_hi * r_hi, -work), n)
        sum_lo += t_lo
        sum_hi += t_hi
        n += 1
    sum_hi += 2  # remainder: geometric tail with ratio < 1/8 of a term <= 1 unit
    lo, hi, ex = sum_lo, sum_hi, -work
    cap = work + 4
    for _ in range(s):
        lo, hi, ex = lo * lo, hi * hi, 2 * ex
        extra = hi.bit_length() - cap
        if extra > 0:
            lo >>= extra
            hi = -((-hi) >> extra)
            ex += extra
    return lo, hi, ex


def _series_scaled(m: int, e: int, w: int) -> tuple[int, int]:
    """sum_{n>=0} x**(2n+1)/(2n+1)!! for x = m * 2**e > 0, scaled by 2**w."""
    t_lo = _shift_floor(m, e + w)
    t_hi = _shift_ceil(m, e + w)
    m2 = m * m
    e2 = 2 * e
    # ratio x**2/(2n+3) <= 1/2  iff  2 * m2 * 2**e2 <= 2n+3
    x2 = Fraction(m2) * (Fraction(2) ** e2)
    n_geo = max(0, int((2 * x2 - 3) / 2) + 1)
    s_lo, s_hi = t_lo, t_hi
    n = 0
    while True:
        if n >= n_geo and t_hi <= 1:
            break
        d = 2 * n + 3
        t_lo = _shift_floor(t_lo * m2, e2) // d
        t_hi = _ceil_div(_shift_ceil(t_hi * m2, e2), d)
        s_lo += t_lo
        s_hi += t_hi
        n += 1
    # tail after a term <= 1 unit, ratios <= 1/2: at most 1 unit
    return s_lo, s_hi + 1


def _half_excess(m: int, e: int, p: int) -> tuple[int, int]:
    """Phi(x) - 1/2 for x = m * 2**e > 0, scaled by 2**p, as (lo, hi)."""
    w = p + 12
    # exp(x**2/2)
    y_m, y_e = m * m, 2 * e - 1
    E_lo, E_hi, E_ex = _exp_dyadic(y_m, y_e, w)
    r_lo, r_hi = _sqrt_two_pi(w)
    # D = sqrt(2 pi) * exp(x^2/2) in [D_lo, D_hi] * 2**(E_ex - w)
    D_lo, D_hi = r_lo * E_lo, r_hi * E_hi
    D_ex = E_ex - w
    # phi = 1/D in [f_lo, f_hi] * 2**-(N + D_ex)
    N = D_hi.bit_length() + w + 4
    f_lo = (1 << N) // D_hi
    f_hi = _ceil_div(1 << N, D_lo)
    f_ex = -N - D_ex
    # series at absolute precision good enough for relative 2**-(p+8)
    lead = m.bit_length() + e  # x < 2**lead, x >= 2**(lead-1)
    ws = p + 10 + max(0, 1 - lead)
    s_lo, s_hi = _series_scaled(m, e, ws)
    # product scaled by 2**(f_ex - ws) -> to 2**-p scale
    k = f_ex - ws + p
    lo = _shift_floor(f_lo * s_lo, k)
    hi = _shift_ceil(f_hi * s_hi, k)
    return lo, hi


def _cdf_scaled(x: Dyadic, p: int) -> tuple[int, int]:
    """Phi(x) scaled by 2**p as (lo, hi) with hi - lo small (a few units)."""
    half = 1 << (p - 1)
    if x.mantissa == 0:
        return half, half
    m = abs(x.mantissa)
    d_lo, d_hi = _half_excess(m, x.exponent, p)
    if x.mantissa > 0:
        return half + d_lo, min(half + d_hi, 1 << p)
    return max(half - d_hi, 0), half - d_lo


def _check_cutoff(x: Dyadic, cutoff: int) -> None:
    if abs(x) > cutoff:
        raise CutoffExceeded(f"|x| = {float(abs(x)):.3g} exceeds cutoff {cutoff}")


def normal_cdf(x: Enclosure, eps: Dyadic, cutoff: int = CUTOFF) -> Enclosure:
    """Enclosure of ``P(N(0,1) <= s)`` over ``s`` in ``x``.

    Width is at most ``eps`` plus the CDF's own variation over ``x``.
    """
    if not isinstance(x, Enclosure):
        x = Enclosure(x)
    _check_cutoff(x.lo, cutoff)
    _check_cutoff(x.hi, cutoff)
    p = precision_bits(eps) + 3
    lo, _ = _cdf_scaled(x.lo, p)
    _, hi = _cdf_scaled(x.hi, p)
    return Enclosure.from_scaled(lo, hi, p)


# ---------------------------------------------------------------------------
# inverse


@dataclass(frozen=True)
class NormalQuery:
    u: Enclosure
    eps: Dyadic

    def __post_init__(self):
        if not isinstance(self.u, Enclosure):
            object.__setattr__(self, "u", Enclosure(self.u))
        object.__setattr__(self, "eps", Dyadic.coerce(self.eps))
        if not (self.u.lo > 0 and self.u.hi < 1):
            raise ValueError("u must lie inside the open unit interval")
        if self.eps <= 0:
            raise ValueError("eps must be positive")


_TAIL_PREC = 300


@lru_cache(maxsize=1)
def _upper_cut() -> Fraction:
    """Certified lower bound of Phi(CUTOFF) (and 1 - it bounds Phi(-CUTOFF) above)."""
    lo, _ = _cdf_scaled(Dyadic(CUTOFF), _TAIL_PREC)
    return Fraction(lo, 1 << _TAIL_PREC)


def _cdf_vs(x: Dyadic, b: Fraction, bits: int) -> int:
    """Sign of Phi(x) - b, or 0 if undecided at ``bits`` of precision."""
    lo, hi = _cdf_scaled(x, bits)
    scale = 1 << bits
    if hi < b * scale:
        return -1
    if lo > b * scale:
        return 1
    return 0


def _needed_bits(x: Dyadic, gap_bits: int) -> int:
    # phi(x) ~ 2**-(0.7214 x^2): resolve gaps of phi(x) * 2**-gap_bits
    xf = abs(float(x))
    return gap_bits + int(0.7214 * xf * xf) + 8


def _decide(x: Dyadic, b: Fraction, gap_bits: int) -> int:
    bits = _needed_bits(x, gap_bits)
    for _ in range(8):
        s = _cdf_vs(x, b, bits)
        if s:
            return s
        bits += 32
    return 0


def _seed(b: Fraction, prec: int) -> Fraction | None:
    """Uncertified estimate of Phi^-1(b) for b > 1/2, used only to place a bracket."""
    tail = 1 - b
    if prec <= 44:
        t = float(tail)
        if t <= 0.0:
            return None
        return Fraction(-_STD.inv_cdf(t))
    import mpmath
    with mpmath.workprec(prec + 24):
        g = -mpmath.sqrt(2) * mpmath.erfinv(2 * mpmath.mpf(tail.numerator) / tail.denominator - 1)
        man, exp = mpmath.mpf(g).man_exp
        return Fraction(int(man)) * Fraction(2) ** int(exp)


def _round_to_grid(v: Fraction, bits: int) -> Dyadic:
    return Dyadic((v.numerator << bits) // v.denominator, -bits)


def _inverse_point(b: Fraction, prec: int) -> tuple[Dyadic, Dyadic]:
    """Bracket of Phi^-1(b) of width <= 2**-prec; b must be strictly inside the cutoff window."""
    if b == Fraction(1, 2):
        return Dyadic(0), Dyadic(0)
    if b < Fraction(1, 2):
        lo, hi = _inverse_point(1 - b, prec)
        return -hi, -lo
    lo = hi = None
    g = _seed(b, prec)
    if g is not None:
        centre = _round_to_grid(g, prec + 8)
        # the seed is usually far more accurate than 2**-prec; widen only on failure
        for widen in (0, 8, 16):
            delta = Dyadic(1, -(prec + 1) + widen)
            a, c = max(centre - delta, Dyadic(0)), min(centre + delta, Dyadic(CUTOFF))
            gap = prec + 2 - widen
            if _decide(a, b, gap) < 0 and _decide(c, b, gap) > 0:
                lo, hi = a, c
                break
    if lo is None:
        lo, hi = Dyadic(0), Dyadic(CUTOFF)
    target = Dyadic(1, -prec)
    while hi - lo > target:
        mid = (lo + hi).shift(-1)
        s = _decide(mid, b, precision_bits(hi - lo) + 2)
        if s < 0:
            lo = mid
        elif s > 0:
            hi = mid
        else:  # pragma: no cover - Phi(mid) == b cannot happen for dyadic mid != 0
            raise ArithmeticError("bisection failed to separate")
    return lo, hi


def _check_probability(b: Fraction) -> None:
    cut = _upper_cut()
    if b <= 1 - cut or b >= cut:
        raise CutoffExceeded(
            "probability is closer to 0 or 1 than the cutoff allows; read more bits")


def normal_inverse(q: NormalQuery) -> Enclosure:
    """Enclosure E of the inverse CDF image of ``q.u`` with Phi(E) covering u.

    Width is at most ``q.eps`` plus the image width of ``u``.
    """
    u_lo = q.u.lo.to_fraction()
    u_hi = q.u.hi.to_fraction()
    _check_probability(u_lo)
    _check_probability(u_hi)
    prec = precision_bits(q.eps) + 1
    lo, _ = _inverse_point(u_lo, prec)
    _, hi = _inverse_point(u_hi, prec)
    return Enclosure(lo, hi)


@lru_cache(maxsize=1 << 18)
def inverse_breakpoint(k: int, K: int) -> tuple[Dyadic, Dyadic]:
    """Bracket of Phi^-1(k / 2**K); the fraction must be in lowest terms.

    Brackets (width 2**-(K+10)) are far narrower than the spacing of
    neighbouring breakpoints (at least sqrt(2 pi) 2**-K), so intervals built
    from consecutive ones nest under refinement.
    """
    b = Fraction(k, 1 << K)
    _check_probability(b)
    return _inverse_point(b, max(24, K + 10))


@lru_cache(maxsize=1 << 18)
def quantile_bound(k: int, K: int, upper: bool) -> Dyadic:
    """A dyadic x on the requested side of Phi^-1(k / 2**K), within ~2**-(K+5).

    Cheaper than a full bracket: a float seed pushed outward by 2**-(K+6) and
    confirmed with a single rigorous CDF evaluation.
    """
    b = Fraction(k, 1 << K)
    _check_probability(b)
    if b < Fraction(1, 2):
        return -quantile_bound((1 << K) - k, K, not upper)
    if b == Fraction(1, 2):
        return Dyadic(0)
    if K + 8 <= 44:
        g = _seed(b, K + 8)
        if g is not None:
            delta = Fraction(1, 1 << (K + 6))
            x = _round_to_grid(g + delta if upper else g - delta, K + 8)
            if not upper and x < 0:
                x = Dyadic(0)
            if _decide(x, b, K + 8) == (1 if upper else -1):
                return x
    lo, hi = inverse_breakpoint(k, K)
    return hi if upper else lo
