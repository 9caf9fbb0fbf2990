import functools
from fractions import Fraction

from sparseroots import SparsePolynomial, isolate_all, parse
from sparseroots.stats import Stats

GOLDEN_TEXT = "x^50 - 4*x^48 + 4*x^46 - x^4 + 4*x^2 - 4"


def golden() -> SparsePolynomial:
    return parse(GOLDEN_TEXT)


@functools.lru_cache(maxsize=None)
def golden_isolation():
    """isolate_all on the six-term worked example (slow: double roots need 2^-L width)."""
    stats = Stats()
    return tuple(isolate_all(golden(), stats)), stats


def hard_instance(n=512, tau=16, a=3) -> SparsePolynomial:
    """x^n - (2^(2 tau) x^2 - a)^2, expanded."""
    c = 2 ** (2 * tau)
    return SparsePolynomial([(n, 1), (4, -c * c), (2, 2 * a * c), (0, -a * a)])


def brackets_sqrt(lo, hi, a=2) -> bool:
    """Exact check that sqrt(a) lies in [lo, hi] (squares compared as rationals)."""
    lo, hi = Fraction(lo.to_fraction()), Fraction(hi.to_fraction())
    return lo >= 0 and lo * lo <= a <= hi * hi


def contains(root, value) -> bool:
    v = Fraction(value)
    lo, hi = root.lo.to_fraction(), root.hi.to_fraction()
    return lo <= v <= hi


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("]")[0][1:])):
            terminalreporter.write_line(line)
