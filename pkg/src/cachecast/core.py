"""Exact arithmetic and subset utilities shared by every caching scheme.

All rates, cache sizes and subfile lengths are ``fractions.Fraction``
values; nothing in the rate pipeline ever touches floating point, so
equality checks between formula rates and simulated loads are exact.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

Rational = Fraction

# Canonical user-set representation: sorted, duplicate-free tuple of indices.
UserSet = tuple[int, ...]


def binom(a: int, b: int) -> int:
    """C(a, b), taken to be 0 when b > a or b < 0.

    The zero convention makes the scheme formulas total: terms like
    C(L-1, t_int-1) appear with t_int = 0 and must vanish rather than fail.
    """
    if a < 0:
        raise ValueError(f"binom: upper index must be non-negative, got {a}")
    if b < 0 or b > a:
        return 0
    return math.comb(a, b)


def user_set(users: Iterable[int]) -> UserSet:
    """Canonical (sorted, deduplicated) form of a collection of user indices."""
    return tuple(sorted(set(users)))


def users_range(k: int) -> UserSet:
    """The full user set {1, ..., k}."""
    return tuple(range(1, k + 1))


def enumerate_subsets(ground: Iterable[int], size: int) -> list[UserSet]:
    """All size-``size`` subsets of ``ground`` in lexicographic order.

    Deterministic across runs; an out-of-range size yields an empty list,
    mirroring the zero-binomial convention.
    """
    members = user_set(ground)
    if size < 0 or size > len(members):
        return []
    return list(combinations(members, size))


def lcm_denominators(lengths: Sequence[Fraction]) -> int:
    """Least common multiple of the denominators of ``lengths``.

    Used to pick the smallest file size (in bits) for which every subfile
    boundary lands on an integer bit position.
    """
    if not lengths:
        raise ValueError("no lengths")
    return math.lcm(*(x.denominator for x in lengths))


def parse_rational(text: str) -> Fraction:
    """Parse 'p/q' or a decimal string into an exact fraction.

    Decimals are read exactly over powers of ten ('0.25' -> 1/4).
    """
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {text!r}") from exc


def format_rational(x: Fraction) -> str:
    """Canonical 'p/q' form ('p' when the denominator is 1)."""
    return str(x)
