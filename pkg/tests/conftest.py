import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oscillon import CsprngSource, Dyadic, Enclosure, PathEvaluator, TruncatedXi  # noqa: E402


def dec_fraction(text: str) -> Fraction:
    """Exact rational value of a decimal string."""
    return Fraction(text)


def point_in(e: Enclosure, q) -> bool:
    q = Fraction(q)
    return e.lo.to_fraction() <= q <= e.hi.to_fraction()


def dyadic_bracket(q: Fraction, bits: int) -> Enclosure:
    lo = (q.numerator << bits) // q.denominator
    hi = -((-q.numerator << bits) // q.denominator)
    return Enclosure(Dyadic(lo, -bits), Dyadic(hi, -bits))


@pytest.fixture
def linear_up():
    return PathEvaluator.truncated(TruncatedXi.from_levels(0, xi0=1))


@pytest.fixture
def linear_down():
    return PathEvaluator.truncated(TruncatedXi.from_levels(0, xi0=-1))


@pytest.fixture
def zero_path():
    return PathEvaluator.truncated(TruncatedXi.from_levels(0))


@pytest.fixture
def stochastic():
    return lambda seed: PathEvaluator.stochastic(CsprngSource.from_int(seed))


ACCEPTANCE_LINES: list[str] = []


def report(name: str, ok: bool, detail: str) -> None:
    """Record one acceptance line; printed live and again in the terminal summary."""
    line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
