from fractions import Fraction

import pytest

from cachecast.equal_cache import equal_params, equal_placement, man_placement
from cachecast.incremental import (
    refine_placement,
    refine_placement_restricted,
    refine_pool,
)
from cachecast.unequal import UnequalConfig, unequal_params


def content_sets(placement, user):
    """Per-user multiset of (file, merged owner set, total length)."""
    totals = {}
    for sf in placement.subfiles:
        if user in sf.owners:
            key = (sf.file, sf.owners)
            totals[key] = totals.get(key, Fraction(0)) + sf.length
    return {(f, o, length) for (f, o), length in totals.items()}


def coverage(placement, user):
    return placement.user_intervals(user)


class TestRefinePlacement:
    @pytest.mark.parametrize("N,K,t", [(3, 3, 1), (2, 4, 2), (4, 4, 1), (5, 5, 3)])
    def test_merge_equivalence(self, N, K, t):
        refined = refine_placement(man_placement(N, K, t), N, K, t)
        direct = man_placement(N, K, t + 1)
        for user in range(1, K + 1):
            assert content_sets(refined, user) == content_sets(direct, user)

    def test_nondestructive(self):
        base = man_placement(3, 3, 1)
        refined = refine_placement(base, 3, 3, 1)
        for user in range(1, 4):
            before = coverage(base, user)
            after = coverage(refined, user)
            for file, ivs in before.items():
                covered = after.get(file, [])
                for start, stop in ivs:
                    assert any(a <= start and stop <= b for a, b in covered)

    def test_added_bytes_per_user(self):
        # refinement adds N/K per unit file to every cache
        N, K, t = 4, 4, 1
        base = man_placement(N, K, t)
        refined = refine_placement(base, N, K, t)
        for user in range(1, K + 1):
            assert refined.user_load(user) - base.user_load(user) == Fraction(N, K)

    def test_single_part_at_t_K_minus_1(self):
        base = man_placement(3, 3, 2)
        refined = refine_placement(base, 3, 3, 2)
        # each subfile splits into exactly one part, same segment geometry
        assert {sf.segments for sf in refined.subfiles} == {
            sf.segments for sf in base.subfiles
        }

    def test_nothing_to_refine_at_t_K(self):
        base = man_placement(3, 3, 3)
        with pytest.raises(ValueError, match="nothing to refine"):
            refine_placement(base, 3, 3, 3)


class TestRefinePool:
    def test_piece_assignment_is_deterministic(self):
        # pool {1,2,3}, t=1 -> t'=2: the first half of subfile {1} goes to
        # user 2, the second half to user 3, and so on cyclically
        base = equal_placement(4, 4, 1)
        refined, pool = refine_pool(base, (1, 2, 3), 2, Fraction(1))
        segs12 = pool.x_content[(1, (1, 2))]
        assert [(s.start, s.length) for s in segs12] == [
            (Fraction(0), Fraction(1, 8)),      # first half of A_1
            (Fraction(1, 4), Fraction(1, 8)),   # first half of A_2
        ]
        segs13 = pool.x_content[(1, (1, 3))]
        assert [(s.start, s.length) for s in segs13] == [
            (Fraction(1, 8), Fraction(1, 8)),   # second half of A_1
            (Fraction(1, 2), Fraction(1, 8)),   # first half of A_3
        ]
        segs23 = pool.x_content[(1, (2, 3))]
        assert [(s.start, s.length) for s in segs23] == [
            (Fraction(3, 8), Fraction(1, 8)),   # second half of A_2
            (Fraction(5, 8), Fraction(1, 8)),   # second half of A_3
        ]

    def test_pool_merge_matches_direct_second_level(self):
        # merged pool subfiles carry F'/C(L, t') content each
        base = equal_placement(4, 4, 1)
        _, pool = refine_pool(base, (1, 2, 3), 2, Fraction(1))
        for (file, T), segs in pool.x_content.items():
            assert sum(s.length for s in segs) == Fraction(1, 4)  # (3/4) / C(3,2)

    def test_noop_when_target_is_current(self):
        base = equal_placement(4, 4, 1)
        p = equal_params(4, 4, 1)
        refined = refine_placement_restricted(base, (1, 2, 3), 4, (p.t_int, p.alpha))
        assert set(refined.subfiles) == set(base.subfiles)

    def test_budget_accounting_noninteger_target(self):
        # (N,K,L,Mhat,M) = (6,4,2,9/4,3/2): each pool user gains exactly 3/4
        cfg = UnequalConfig(6, 4, 2, Fraction(9, 4), Fraction(3, 2))
        params = unequal_params(cfg)
        base = equal_placement(6, 4, Fraction(3, 2))
        second = equal_params(6, 2, params.Mprime)
        refined = refine_placement_restricted(
            base, (1, 2), 6, (second.t_int, second.alpha)
        )
        for user in (1, 2):
            gain = refined.user_load(user) - base.user_load(user)
            assert gain == Fraction(3, 4)
        for user in (3, 4):
            assert refined.user_load(user) == base.user_load(user)

    def test_cannot_shrink(self):
        base = equal_placement(4, 4, 1)
        with pytest.raises(ValueError, match="cannot shrink"):
            refine_placement_restricted(base, (1, 2, 3), 4, (0, Fraction(1, 2)))

    def test_multi_step_promotion(self):
        # t=1 placement refined to t'=3 over a pool of 3 users: two promotions
        base = equal_placement(4, 4, 1)
        refined, pool = refine_pool(base, (1, 2, 3), 3, Fraction(1))
        assert set(pool.x_content) == {(f, (1, 2, 3)) for f in range(1, 5)}
        for segs in pool.x_content.values():
            assert sum(s.length for s in segs) == Fraction(3, 4)
        # every pool user now caches the entire pool of every file
        for user in (1, 2, 3):
            gain = refined.user_load(user) - base.user_load(user)
            assert gain == 2  # from M=1 to occupying 1 + 2 = 3F of cache

    def test_nondestructive_restricted(self):
        base = equal_placement(6, 4, Fraction(3, 2))
        cfg = UnequalConfig(6, 4, 2, Fraction(9, 4), Fraction(3, 2))
        second = equal_params(6, 2, unequal_params(cfg).Mprime)
        refined = refine_placement_restricted(
            base, (1, 2), 6, (second.t_int, second.alpha)
        )
        for user in range(1, 5):
            before = coverage(base, user)
            after = coverage(refined, user)
            for file, ivs in before.items():
                covered = after.get(file, [])
                for start, stop in ivs:
                    assert any(a <= start and stop <= b for a, b in covered)
