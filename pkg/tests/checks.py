"""Package-aware helpers shared by unit and acceptance tests."""

from oscillon.exactnum import Dyadic, Enclosure, pow2_half
from oscillon.levypath import Surd


def reconstruct_exact(ev, j: int, n: int) -> Surd:
    """2**(j/2) (2 x((2n+1)/2**(j+1)) - x(n/2**j) - x((n+1)/2**j)) as an exact surd."""
    mid = ev.exact_value(Dyadic(2 * n + 1, -(j + 1)))
    left = ev.exact_value(Dyadic(n, -j))
    right = ev.exact_value(Dyadic(n + 1, -j))
    d = mid.shift(1) - left - right
    if j % 2:
        d = d.times_sqrt2()
    return d.shift((j - j % 2) // 2)


def reconstruct_enclosure(ev, j: int, n: int, eps) -> Enclosure:
    mid = ev.value_at_dyadic(Dyadic(2 * n + 1, -(j + 1)), eps)
    left = ev.value_at_dyadic(Dyadic(n, -j), eps)
    right = ev.value_at_dyadic(Dyadic(n + 1, -j), eps)
    d = mid.shift(1) - left - right
    r = pow2_half(j, 60)  # 2**(-j/2); divide by multiplying with 2**j
    return (r * d).shift(j)
