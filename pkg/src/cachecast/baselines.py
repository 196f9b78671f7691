"""Comparison baselines: layered memory-sharing (scheme 1) and imported rates.

Scheme 1 splits the system into K nested sub-problems — sub-problem i serves
users 1..i with the cache headroom M_i - M_{i+1} and unicasts to the rest —
and optimizes the file share beta_i given to each sub-problem.  The optimum
has no closed form, so it is approximated by a simplex grid search followed
by coordinate descent; the result is an upper bound on the true minimum and
non-increasing in the grid resolution.

Rates produced by schemes we do not implement (e.g. the exponential-size
linear program for uncoded-placement/linear-delivery systems) are imported
from a plain-text table and attached to comparison output as-is.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterator, Sequence

from .core import Rational, parse_rational
from .equal_cache import rate_eq

CachePoint = tuple[int, int, int, Rational, Rational]  # (N, K, L, Mhat, M)


@dataclass(frozen=True)
class BetaAllocation:
    """File shares given to the K layered sub-problems; non-negative, sum 1."""

    beta: tuple[Rational, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "beta", tuple(Fraction(b) for b in self.beta))
        if any(b < 0 for b in self.beta):
            raise ValueError("beta components must be non-negative")
        if sum(self.beta) != 1:
            raise ValueError(f"beta must sum to 1, got {sum(self.beta)}")


def _check_cache_vector(M_sorted: Sequence, N: int, K: int) -> list[Fraction]:
    M = [Fraction(x) for x in M_sorted]
    if len(M) != K:
        raise ValueError(f"cache vector must have length K={K}")
    if any(M[i] < M[i + 1] for i in range(K - 1)):
        raise ValueError("cache vector must be sorted in descending order")
    if M and (M[-1] < 0 or M[0] > N):
        raise ValueError("cache sizes must lie in [0, N]")
    return M


def scheme1_rate_at(
    beta: BetaAllocation | Sequence, N: int, K: int, M_sorted: Sequence
) -> Rational | None:
    """Sum rate of the K layered sub-problems under one beta allocation.

    Returns None when infeasible: a sub-problem with zero file share cannot
    absorb a positive cache gap.  A per-user cache exceeding N is clamped to
    N, since cache beyond the whole library is wasted.
    """
    if not isinstance(beta, BetaAllocation):
        beta = BetaAllocation(tuple(beta))
    M = _check_cache_vector(M_sorted, N, K)
    M.append(Fraction(0))  # M_{K+1} = 0
    total = Fraction(0)
    for i in range(1, K + 1):
        gap = M[i - 1] - M[i]
        b = beta.beta[i - 1]
        if b == 0:
            if gap == 0:
                continue
            return None
        cache = gap / b
        if cache > N:
            cache = Fraction(N)
        total += b * rate_eq(N, i, cache) + b * (K - i)
    return total


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in _compositions(total - head, parts - 1):
            yield (head, *tail)


def scheme1_optimize(
    N: int, K: int, M_sorted: Sequence, resolution: int = 64
) -> tuple[BetaAllocation, Rational]:
    """Best beta found by simplex grid search plus coordinate descent.

    Ties break toward the lexicographically smallest beta, so the result is
    deterministic.  The value is an upper bound on the scheme-1 optimum.
    """
    if resolution < 8:
        raise ValueError(f"resolution must be at least 8, got {resolution}")
    M = _check_cache_vector(M_sorted, N, K)
    best: tuple[Rational, tuple[Rational, ...]] | None = None
    for comp in _compositions(resolution, K):
        beta = tuple(Fraction(c, resolution) for c in comp)
        value = scheme1_rate_at(beta, N, K, M)
        if value is not None and (best is None or (value, beta) < best):
            best = (value, beta)
    if best is None:
        raise ValueError("no feasible beta allocation on the grid")
    value, beta = best
    step = Fraction(1, resolution)
    floor_step = Fraction(1, resolution * 256)
    while step >= floor_step:
        improved = False
        for i in range(K):
            for j in range(K):
                if i == j or beta[j] < step:
                    continue
                cand = list(beta)
                cand[i] += step
                cand[j] -= step
                cand_t = tuple(cand)
                v = scheme1_rate_at(cand_t, N, K, M)
                if v is not None and (v, cand_t) < (value, beta):
                    value, beta = v, cand_t
                    improved = True
        if not improved:
            step /= 2
    return BetaAllocation(beta), value


def import_external_rates(path: str | Path) -> dict[CachePoint, Rational]:
    """Load externally computed rates from 'N,K,L,Mhat,M,rate' rows.

    Rationals are accepted as 'p/q' or decimals; '#' starts a comment.
    A malformed row raises with its line number.
    """
    table: dict[CachePoint, Rational] = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = [f.strip() for f in line.split(",")]
        if len(fields) != 6:
            raise ValueError(
                f"{path}:{lineno}: expected 6 fields 'N,K,L,Mhat,M,rate', "
                f"got {len(fields)}"
            )
        try:
            N, K, L = (int(fields[i]) for i in range(3))
            mhat, m, rate = (parse_rational(fields[i]) for i in range(3, 6))
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: {exc}") from exc
        table[(N, K, L, mhat, m)] = rate
    return table
