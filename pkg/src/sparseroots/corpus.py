"""Seeded random k-nomials for verification runs and benchmarks."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Iterator

from .poly import SparsePolynomial


def random_knomial(rng: random.Random, k: int, max_degree: int, max_bits: int,
                   degree: int | None = None) -> SparsePolynomial:
    """``k`` nonzero terms, degree ``degree`` (or random up to ``max_degree``),
    coefficients of absolute value below ``2**bits`` with ``bits <= max_bits``."""
    n = degree if degree is not None else rng.randint(k - 1, max_degree)
    exps = rng.sample(range(n), k - 1) + [n]
    bits = rng.randint(1, max_bits)
    terms = []
    for e in exps:
        c = 0
        while c == 0:
            c = rng.randint(-(2**bits) + 1, 2**bits - 1)
        terms.append((e, c))
    return SparsePolynomial(terms)


def corpus(seed: int, count: int, k_range=(2, 6), max_degree: int = 64,
           max_bits: int = 16) -> Iterator[SparsePolynomial]:
    rng = random.Random(seed)
    for _ in range(count):
        yield random_knomial(rng, rng.randint(*k_range), max_degree, max_bits)


def random_rational_knomial(rng: random.Random, k: int, max_degree: int,
                            max_bits: int) -> list[tuple[int, Fraction]]:
    """Sorted ``(exponent, Fraction)`` terms with small random denominators."""
    n = rng.randint(k - 1, max_degree)
    exps = sorted(rng.sample(range(n), k - 1) + [n])
    out = []
    for e in exps:
        num = 0
        while num == 0:
            num = rng.randint(-(2**max_bits) + 1, 2**max_bits - 1)
        out.append((e, Fraction(num, rng.randint(1, 2**max_bits - 1))))
    return out
