"""Two-level caching: L users with a large cache, K - L with a small one.

The placement runs in two stages.  Stage one ignores the extra cache and
lays out the equal-cache placement for (N, K, M).  Stage two pools, per
file, the subfiles owned entirely inside the large-cache group: that pool
behaves like a single file of length F' placed over L users, and the extra
cache is filled by incrementally refining it to the equal-cache layout for
the derived cache size M' (see ``unequal_params``).  Delivery keeps every
stage-one transmission that serves at least one small-cache user and
replaces the rest with the pool's own second-level delivery.

When M' would exceed N (scenario 2), files are split: a gamma share runs
the construction at the boundary cache size Phi (where M' = N and the pool
delivery disappears), and on the remaining share the large users store
everything and drop out, leaving an equal-cache system over K - L users.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

from .core import Rational, UserSet, binom, enumerate_subsets, user_set, users_range
from .equal_cache import (
    ZERO,
    DeliveryPlan,
    EqualCacheParams,
    Part,
    Placement,
    Segment,
    Subfile,
    Transmission,
    aligned_transmissions,
    check_demands,
    equal_params,
    equal_placement,
    man_delivery_over,
    man_placement_over,
    rate_eq,
)
from .incremental import PoolIndex, refine_pool


@dataclass(frozen=True)
class UnequalConfig:
    """System shape: users 1..L hold Mhat, users L+1..K hold M (Mhat >= M)."""

    N: int
    K: int
    L: int
    Mhat: Rational
    M: Rational

    def __post_init__(self) -> None:
        object.__setattr__(self, "Mhat", Fraction(self.Mhat))
        object.__setattr__(self, "M", Fraction(self.M))
        if self.K < 1 or self.N < self.K:
            raise ValueError(f"need N >= K >= 1, got N={self.N}, K={self.K}")
        if not 1 <= self.L < self.K:
            raise ValueError(f"need 1 <= L < K, got L={self.L}, K={self.K}")
        if self.Mhat < self.M:
            raise ValueError(f"large cache below small cache: {self.Mhat} < {self.M}")
        if self.M < 0 or self.Mhat > self.N:
            raise ValueError("cache sizes must lie in [0, N]")

    @property
    def large_users(self) -> UserSet:
        return tuple(range(1, self.L + 1))

    @property
    def small_users(self) -> UserSet:
        return tuple(range(self.L + 1, self.K + 1))


@dataclass(frozen=True)
class UnequalParams:
    """Derived quantities of the two-stage construction."""

    base: EqualCacheParams
    L: int
    Mhat: Rational
    Fprime: Rational        # pooled intra-group length per file, units of F
    occupied: Rational      # pool content already cached per large user after stage 1
    Rprime: Rational        # stage-1 load of purely intra-group transmissions
    Mprime: Rational | None  # second-level cache size, units of F'; None if no pool
    scenario: int
    Phi: Rational | None
    gamma: Rational | None
    pool_empty: bool


def unequal_params(cfg: UnequalConfig) -> UnequalParams:
    """Second-level parameters F', M', R' and the scenario split."""
    base = equal_params(cfg.N, cfg.K, cfg.M)
    N, K, L = cfg.N, cfg.K, cfg.L
    ti, aw = base.t_int, base.alpha
    bw = 1 - aw

    fprime = aw * Fraction(binom(L, ti), binom(K, ti))
    occupied = aw * Fraction(binom(L - 1, ti - 1), binom(K, ti)) * N
    rprime = aw * Fraction(binom(L, ti + 1), binom(K, ti))
    if bw:
        fprime += bw * Fraction(binom(L, ti + 1), binom(K, ti + 1))
        occupied += bw * Fraction(binom(L - 1, ti), binom(K, ti + 1)) * N
        rprime += bw * Fraction(binom(L, ti + 2), binom(K, ti + 1))

    if fprime == 0:
        # t exceeds the pool: no subfile lives entirely inside the large group,
        # so the extra cache is unusable by this construction.
        return UnequalParams(
            base=base, L=L, Mhat=cfg.Mhat, Fprime=fprime, occupied=occupied,
            Rprime=rprime, Mprime=None, scenario=1, Phi=None, gamma=None,
            pool_empty=True,
        )

    mprime = (occupied + cfg.Mhat - cfg.M) / fprime
    if mprime <= N:
        return UnequalParams(
            base=base, L=L, Mhat=cfg.Mhat, Fprime=fprime, occupied=occupied,
            Rprime=rprime, Mprime=mprime, scenario=1, Phi=None, gamma=None,
            pool_empty=False,
        )
    phi = cfg.M - occupied + N * fprime
    gamma = Fraction(N - cfg.Mhat, N - phi)
    return UnequalParams(
        base=base, L=L, Mhat=cfg.Mhat, Fprime=fprime, occupied=occupied,
        Rprime=rprime, Mprime=mprime, scenario=2, Phi=phi, gamma=gamma,
        pool_empty=False,
    )


@dataclass(frozen=True)
class RateReport:
    """Achieved rate with every intermediate the CLI and tests care about."""

    scheme: str
    N: int
    K: int
    M: Rational
    rate: Rational
    L: int | None = None
    Mhat: Rational | None = None
    t: Rational | None = None
    t_int: int | None = None
    alpha: Rational | None = None
    Fprime: Rational | None = None
    Mprime: Rational | None = None
    Rprime: Rational | None = None
    Phi: Rational | None = None
    gamma: Rational | None = None
    scenario: int | None = None
    pool_empty: bool = False


def equal_rate_report(N: int, K: int, M) -> RateReport:
    p = equal_params(N, K, M)
    return RateReport(
        scheme="equal", N=N, K=K, M=p.M, rate=rate_eq(N, K, M),
        t=p.t, t_int=p.t_int, alpha=p.alpha,
    )


def rate_ueq(cfg: UnequalConfig) -> RateReport:
    """Worst-case rate of the two-level scheme, with all intermediates."""
    p = unequal_params(cfg)
    base_rate = rate_eq(cfg.N, cfg.K, cfg.M)
    if p.pool_empty:
        rate = base_rate
    elif p.scenario == 1:
        rate = base_rate - p.Rprime + rate_eq(cfg.N, cfg.L, p.Mprime) * p.Fprime
    else:
        rate = p.gamma * (base_rate - p.Rprime) + (1 - p.gamma) * rate_eq(
            cfg.N, cfg.K - cfg.L, cfg.M
        )
    return RateReport(
        scheme="proposed", N=cfg.N, K=cfg.K, M=cfg.M, rate=rate,
        L=cfg.L, Mhat=cfg.Mhat, t=p.base.t, t_int=p.base.t_int, alpha=p.base.alpha,
        Fprime=p.Fprime, Mprime=p.Mprime, Rprime=p.Rprime, Phi=p.Phi, gamma=p.gamma,
        scenario=p.scenario, pool_empty=p.pool_empty,
    )


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------


def _scale_segment(seg: Segment, factor: Rational, offset: Rational) -> Segment:
    return Segment(seg.file, offset + factor * seg.start, factor * seg.length)


def _scale_placement(
    placement: Placement, factor: Rational, offset: Rational,
    add_owners: UserSet = (), K: int | None = None,
) -> Placement:
    if factor == 0:
        return Placement(N=placement.N, K=K or placement.K, subfiles=())
    subfiles = []
    for sf in placement.subfiles:
        owners = user_set(sf.owners + add_owners) if add_owners else sf.owners
        segs = tuple(_scale_segment(s, factor, offset) for s in sf.segments)
        subfiles.append(replace(sf, owners=owners, segments=segs))
    return Placement(N=placement.N, K=K or placement.K, subfiles=tuple(subfiles))


def _scale_plan(
    txs: Sequence[Transmission], factor: Rational, offset: Rational
) -> list[Transmission]:
    if factor == 0:
        return []
    return [
        Transmission(tuple(
            Part(_scale_segment(p.segment, factor, offset), p.target) for p in tx.parts
        ))
        for tx in txs
    ]


def _equal_placement_over(N: int, ground: UserSet, M, K: int) -> tuple[EqualCacheParams, Placement]:
    """Equal-cache placement for |ground| users addressed by their real ids."""
    p = equal_params(N, len(ground), M)
    subfiles: list[Subfile] = []
    for layer in p.layers:
        lp = man_placement_over(
            N, ground, p.layer_t(layer), layer,
            p.layer_fraction(layer), p.layer_start(layer), K=K,
        )
        subfiles.extend(lp.subfiles)
    return p, Placement(N=N, K=K, subfiles=tuple(subfiles))


@dataclass(frozen=True)
class TwoStageContext:
    """Canonical placement of a config plus enough structure to build plans."""

    cfg: UnequalConfig
    params: UnequalParams
    placement: Placement
    pool: PoolIndex | None = None                     # scenario 1
    sub_full: "TwoStageContext | None" = None         # scenario 2, gamma share
    rest_params: EqualCacheParams | None = None       # scenario 2, remainder share
    rest_placement: Placement | None = None

    def plan(self, d: Sequence[int]) -> DeliveryPlan:
        d = check_demands(d, self.cfg.N, self.cfg.K)
        return DeliveryPlan(tuple(self._transmissions(d)))

    def _transmissions(self, d: tuple[int, ...]) -> list[Transmission]:
        cfg, p = self.cfg, self.params
        demand = {i + 1: f for i, f in enumerate(d)}
        if p.scenario == 2:
            gamma = p.gamma
            txs = _scale_plan(self.sub_full._transmissions(d), gamma, ZERO)
            rest = man_layers_delivery(
                self.rest_placement, cfg.small_users, demand, self.rest_params
            )
            txs.extend(_scale_plan(rest, 1 - gamma, gamma))
            return txs

        base = p.base
        large = set(cfg.large_users)
        txs: list[Transmission] = []
        content = self.placement.stage1_content
        for layer in base.layers:
            size = base.layer_t(layer) + 1
            for S in enumerate_subsets(users_range(cfg.K), size):
                if set(S) <= large:
                    continue  # replaced by the second-level pool delivery
                components = []
                for s in S:
                    T = tuple(u for u in S if u != s)
                    components.append((content[(demand[s], layer, T)], s))
                txs.extend(aligned_transmissions(components))
        if self.pool is not None:
            txs.extend(_pool_delivery(self.pool, demand, self.pool.t2_int,
                                      self.pool.x_content))
            if self.pool.alpha2 != 1:
                txs.extend(_pool_delivery(self.pool, demand, self.pool.t2_int + 1,
                                          self.pool.y_content))
        return txs


def man_layers_delivery(
    placement: Placement, ground: UserSet, demand: dict[int, int],
    params: EqualCacheParams,
) -> list[Transmission]:
    txs: list[Transmission] = []
    for layer in params.layers:
        txs.extend(
            man_delivery_over(placement, ground, demand, params.layer_t(layer), layer)
        )
    return txs


def _pool_delivery(
    pool: PoolIndex, demand: dict[int, int], level: int,
    index: dict[tuple[int, UserSet], tuple[Segment, ...]],
) -> list[Transmission]:
    txs: list[Transmission] = []
    for S in enumerate_subsets(pool.pool_users, level + 1):
        components = []
        for s in S:
            T = tuple(u for u in S if u != s)
            components.append((index[(demand[s], T)], s))
        txs.extend(aligned_transmissions(components))
    return txs


def build_two_stage(cfg: UnequalConfig) -> TwoStageContext:
    """Construct the canonical two-stage placement and its plan builder."""
    p = unequal_params(cfg)
    stage1 = equal_placement(cfg.N, cfg.K, cfg.M)
    if p.pool_empty:
        return TwoStageContext(cfg=cfg, params=p, placement=stage1)
    if p.scenario == 1:
        second = equal_params(cfg.N, cfg.L, p.Mprime)
        refined, pool = refine_pool(
            stage1, cfg.large_users, second.t_int, second.alpha
        )
        return TwoStageContext(cfg=cfg, params=p, placement=refined, pool=pool)

    # Scenario 2: gamma share at the boundary cache size Phi, remainder share
    # with the large users caching everything and an equal-cache system left
    # over the small users.
    sub_full = build_two_stage(replace(cfg, Mhat=p.Phi))
    rest_params, rest_placement = _equal_placement_over(
        cfg.N, cfg.small_users, cfg.M, K=cfg.K
    )
    gamma = p.gamma
    subfiles = list(_scale_placement(sub_full.placement, gamma, ZERO).subfiles)
    subfiles.extend(
        _scale_placement(
            rest_placement, 1 - gamma, gamma, add_owners=cfg.large_users
        ).subfiles
    )
    merged = Placement(N=cfg.N, K=cfg.K, subfiles=tuple(subfiles))
    return TwoStageContext(
        cfg=cfg, params=p, placement=merged,
        sub_full=sub_full, rest_params=rest_params, rest_placement=rest_placement,
    )


def two_stage_placement(cfg: UnequalConfig) -> Placement:
    """Final caches of the two-level scheme (both stages applied)."""
    return build_two_stage(cfg).placement


def two_stage_delivery(
    cfg: UnequalConfig, placement: Placement, d: Sequence[int]
) -> DeliveryPlan:
    """Delivery plan for a two-stage placement; total load equals rate_ueq."""
    ctx = build_two_stage(cfg)
    if set(placement.subfiles) != set(ctx.placement.subfiles):
        raise ValueError("placement does not match the two-stage construction")
    return ctx.plan(d)
