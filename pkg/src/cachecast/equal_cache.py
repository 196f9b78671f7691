"""Equal-cache centralized caching: placement, XOR delivery, and the exact rate.

Every file of unit size is split into subfiles indexed by user subsets; a
subfile sits in a user's cache iff the user belongs to its owner set.  With
t = K*M/N an integer, owner sets have size t and delivery sends, for every
(t+1)-subset S of users, the XOR of the subfiles wanted by each member of S
and cached by the other members.  Non-integer t is realized by memory
sharing: the first alpha fraction of every file runs the scheme with
parameter t_int, the rest with t_int + 1.

All offsets and lengths are fractions of the file size F, so a later
bit-level realization only has to scale by one common denominator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .core import Rational, UserSet, binom, enumerate_subsets, users_range

# Memory-sharing layer tags.  The alpha layer is the first alpha*F bits of a
# file, the beta layer the remaining (1-alpha)*F bits.
ALPHA = "alpha"
BETA = "beta"

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class EqualCacheParams:
    """Derived parameters of the equal-cache scheme for (N, K, M)."""

    N: int
    K: int
    M: Rational
    t: Rational
    t_int: int
    alpha: Rational

    def layer_fraction(self, layer: str) -> Rational:
        return self.alpha if layer == ALPHA else ONE - self.alpha

    def layer_start(self, layer: str) -> Rational:
        return ZERO if layer == ALPHA else self.alpha

    def layer_t(self, layer: str) -> int:
        return self.t_int if layer == ALPHA else self.t_int + 1

    @property
    def layers(self) -> list[str]:
        """Layers with non-zero size (beta vanishes when t is an integer)."""
        return [ALPHA] if self.alpha == 1 else [ALPHA, BETA]


def equal_params(N: int, K: int, M) -> EqualCacheParams:
    """Compute t = K*M/N, its floor, and the memory-sharing weight alpha."""
    if K < 1:
        raise ValueError(f"need at least one user, got K={K}")
    if K > N:
        raise ValueError(f"unsupported regime K > N (K={K}, N={N})")
    M = Fraction(M)
    if M < 0 or M > N:
        raise ValueError(f"cache size must satisfy 0 <= M <= N, got M={M}")
    t = Fraction(K, N) * M
    t_int = math.floor(t)
    alpha = t_int + 1 - t
    return EqualCacheParams(N=N, K=K, M=M, t=t, t_int=t_int, alpha=alpha)


def rate_eq(N: int, K: int, M) -> Rational:
    """Worst-case rate of the equal-cache scheme, as an exact rational.

    alpha * C(K, t_int+1)/C(K, t_int) + (1-alpha) * C(K, t_int+2)/C(K, t_int+1),
    which reduces to (K-t)/(1+t) at integer t.
    """
    p = equal_params(N, K, M)
    rate = p.alpha * Fraction(binom(K, p.t_int + 1), binom(K, p.t_int))
    if p.alpha != 1:
        rate += (1 - p.alpha) * Fraction(binom(K, p.t_int + 2), binom(K, p.t_int + 1))
    return rate


# ---------------------------------------------------------------------------
# Placement and delivery data model
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Segment:
    """A contiguous slice of one file: offsets are fractions of F."""

    file: int
    start: Rational
    length: Rational

    @property
    def stop(self) -> Rational:
        return self.start + self.length


@dataclass(frozen=True, slots=True)
class Subfile:
    """A placed piece of content.

    ``stage1_set`` is the owner set assigned by the first-stage placement and
    never changes; ``owners`` grows when an incremental refinement adds the
    piece to further caches.  ``segments`` is ordered (refined pieces keep the
    order in which they were concatenated, which delivery relies on).
    """

    file: int
    layer: str
    stage1_set: UserSet
    owners: UserSet
    segments: tuple[Segment, ...]

    @property
    def length(self) -> Rational:
        return sum((s.length for s in self.segments), ZERO)


@dataclass(frozen=True)
class Placement:
    """All placed subfiles of a system with N files and K users."""

    N: int
    K: int
    subfiles: tuple[Subfile, ...]

    def user_subfiles(self, user: int) -> list[Subfile]:
        return [sf for sf in self.subfiles if user in sf.owners]

    def user_load(self, user: int) -> Rational:
        """Total cached length at ``user``, in units of F."""
        return sum((sf.length for sf in self.user_subfiles(user)), ZERO)

    def user_intervals(self, user: int) -> dict[int, list[tuple[Rational, Rational]]]:
        """Merged (start, stop) coverage per file for one user's cache."""
        raw: dict[int, list[tuple[Rational, Rational]]] = {}
        for sf in self.user_subfiles(user):
            for seg in sf.segments:
                raw.setdefault(sf.file, []).append((seg.start, seg.stop))
        return {f: merge_intervals(ivs) for f, ivs in raw.items()}

    @cached_property
    def stage1_content(self) -> dict[tuple[int, str, UserSet], tuple[Segment, ...]]:
        """Map (file, layer, stage1 set) -> the subfile's contiguous content.

        Refinement scatters a stage-1 subfile over several placement entries
        but never moves a bit, so sorting the pieces by offset and fusing them
        recovers the original contiguous range.
        """
        grouped: dict[tuple[int, str, UserSet], list[Segment]] = {}
        for sf in self.subfiles:
            grouped.setdefault((sf.file, sf.layer, sf.stage1_set), []).extend(sf.segments)
        return {key: fuse_segments(segs) for key, segs in grouped.items()}


def merge_intervals(
    intervals: Iterable[tuple[Rational, Rational]],
) -> list[tuple[Rational, Rational]]:
    out: list[tuple[Rational, Rational]] = []
    for start, stop in sorted(intervals):
        if out and start <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], stop))
        else:
            out.append((start, stop))
    return out


def fuse_segments(segments: Sequence[Segment]) -> tuple[Segment, ...]:
    """Sort pieces of one subfile by offset and fuse adjacent ranges."""
    segs = sorted(segments, key=lambda s: s.start)
    fused: list[Segment] = []
    for seg in segs:
        if fused and fused[-1].stop == seg.start and fused[-1].file == seg.file:
            fused[-1] = replace(fused[-1], length=fused[-1].length + seg.length)
        else:
            fused.append(seg)
    return tuple(fused)


@dataclass(frozen=True, slots=True)
class Part:
    """One XOR component of a transmission, useful to exactly one user."""

    segment: Segment
    target: int


@dataclass(frozen=True, slots=True)
class Transmission:
    """XOR of equal-length parts, broadcast once over the shared link."""

    parts: tuple[Part, ...]

    def __post_init__(self) -> None:
        lengths = {p.segment.length for p in self.parts}
        if len(lengths) != 1:
            raise ValueError(f"XOR parts must have equal length, got {lengths}")

    @property
    def length(self) -> Rational:
        return self.parts[0].segment.length


@dataclass(frozen=True)
class DeliveryPlan:
    transmissions: tuple[Transmission, ...]

    @property
    def total_load(self) -> Rational:
        """Sum of transmission lengths, in units of F."""
        return sum((tx.length for tx in self.transmissions), ZERO)


def split_segments(
    segments: Sequence[Segment], cuts: Sequence[Rational]
) -> list[list[Segment]]:
    """Cut the concatenation of ``segments`` at the given content offsets.

    ``cuts`` must be strictly increasing and lie strictly inside the total
    length; returns len(cuts)+1 ordered groups that tile the input.
    """
    groups: list[list[Segment]] = [[]]
    pending = list(segments)
    pos = ZERO
    cut_iter = iter(cuts)
    cut = next(cut_iter, None)
    for seg in pending:
        seg_left = seg
        while cut is not None and pos < cut < pos + seg_left.length:
            head_len = cut - pos
            groups[-1].append(replace(seg_left, length=head_len))
            seg_left = Segment(
                seg_left.file, seg_left.start + head_len, seg_left.length - head_len
            )
            pos = cut
            groups.append([])
            cut = next(cut_iter, None)
        groups[-1].append(seg_left)
        pos += seg_left.length
        if cut is not None and cut == pos:
            groups.append([])
            cut = next(cut_iter, None)
    if cut is not None:
        raise ValueError("cut offsets exceed the content length")
    return groups


def aligned_transmissions(
    components: Sequence[tuple[Sequence[Segment], int]]
) -> list[Transmission]:
    """Turn equal-length multi-segment components into aligned XOR pieces.

    Each component is (ordered segments, target user).  Content is cut at the
    union of all internal segment boundaries so that every resulting
    transmission XORs exactly one contiguous segment per component.
    """
    totals = {sum((s.length for s in segs), ZERO) for segs, _ in components}
    if len(totals) != 1:
        raise ValueError(f"XOR components must have equal total length, got {totals}")
    total = totals.pop()
    if total == 0:
        return []
    boundaries: set[Rational] = set()
    for segs, _ in components:
        acc = ZERO
        for seg in segs[:-1]:
            acc += seg.length
            boundaries.add(acc)
    cuts = sorted(boundaries)
    pieces = [split_segments(segs, cuts) for segs, _ in components]
    out: list[Transmission] = []
    for idx in range(len(cuts) + 1):
        parts = []
        for comp_pieces, (_, target) in zip(pieces, components):
            group = comp_pieces[idx]
            assert len(group) == 1, "cut groups must be single segments"
            parts.append(Part(group[0], target))
        out.append(Transmission(tuple(parts)))
    return out


# ---------------------------------------------------------------------------
# Placement and delivery construction
# ---------------------------------------------------------------------------


def man_placement_over(
    N: int,
    ground: UserSet,
    t: int,
    layer: str = ALPHA,
    layer_fraction: Rational = ONE,
    layer_start: Rational = ZERO,
    K: int | None = None,
) -> Placement:
    """Owner-subset placement of one layer over an arbitrary ground user set.

    The layer of each file is split into C(|ground|, t) equal subfiles, one
    per size-t subset, laid out in subset-lexicographic order.
    """
    if t < 0 or t > len(ground):
        raise ValueError(f"need 0 <= t <= |ground|, got t={t}")
    K = K if K is not None else (max(ground) if ground else 0)
    subsets = enumerate_subsets(ground, t)
    sub_len = Fraction(layer_fraction, len(subsets))
    subfiles = []
    if layer_fraction > 0:
        for file in range(1, N + 1):
            for j, T in enumerate(subsets):
                seg = Segment(file, layer_start + j * sub_len, sub_len)
                subfiles.append(Subfile(file, layer, T, T, (seg,)))
    return Placement(N=N, K=K, subfiles=tuple(subfiles))


def man_placement(
    N: int,
    K: int,
    t: int,
    layer: str = ALPHA,
    layer_fraction: Rational = ONE,
    layer_start: Rational = ZERO,
) -> Placement:
    """MAN placement of one layer over the full user set {1..K}."""
    return man_placement_over(
        N, users_range(K), t, layer, Fraction(layer_fraction), Fraction(layer_start), K=K
    )


def check_demands(d: Sequence[int], N: int, K: int) -> tuple[int, ...]:
    d = tuple(d)
    if len(d) != K:
        raise ValueError(f"demand vector must have length K={K}, got {len(d)}")
    bad = [x for x in d if not 1 <= x <= N]
    if bad:
        raise ValueError(f"demand index outside 1..{N}: {bad[0]}")
    return d


def man_delivery_over(
    placement: Placement,
    ground: UserSet,
    d: dict[int, int],
    t: int,
    layer: str = ALPHA,
) -> list[Transmission]:
    """XOR delivery for one layer restricted to ``ground`` users.

    One transmission per (t+1)-subset S of ground: the XOR over s in S of the
    subfile of file d[s] owned by S minus s.
    """
    content = placement.stage1_content
    out: list[Transmission] = []
    for S in enumerate_subsets(ground, t + 1):
        components = []
        for s in S:
            T = tuple(u for u in S if u != s)
            segs = content[(d[s], layer, T)]
            components.append((segs, s))
        out.extend(aligned_transmissions(components))
    return out


def man_delivery(
    placement: Placement, d: Sequence[int], t: int, layer: str = ALPHA
) -> DeliveryPlan:
    """Full-ground XOR delivery for an integer-t placement layer."""
    d = check_demands(d, placement.N, placement.K)
    demand = {i + 1: f for i, f in enumerate(d)}
    txs = man_delivery_over(placement, users_range(placement.K), demand, t, layer)
    return DeliveryPlan(tuple(txs))


def equal_placement(N: int, K: int, M) -> Placement:
    """Both memory-sharing layers of the equal-cache placement."""
    p = equal_params(N, K, M)
    subfiles: list[Subfile] = []
    for layer in p.layers:
        lp = man_placement(
            N, K, p.layer_t(layer), layer, p.layer_fraction(layer), p.layer_start(layer)
        )
        subfiles.extend(lp.subfiles)
    return Placement(N=N, K=K, subfiles=tuple(subfiles))


def equal_delivery(placement: Placement, params: EqualCacheParams, d: Sequence[int]) -> DeliveryPlan:
    d = check_demands(d, params.N, params.K)
    demand = {i + 1: f for i, f in enumerate(d)}
    txs: list[Transmission] = []
    for layer in params.layers:
        txs.extend(
            man_delivery_over(
                placement, users_range(params.K), demand, params.layer_t(layer), layer
            )
        )
    return DeliveryPlan(tuple(txs))


def equal_scheme(N: int, K: int, M, d: Sequence[int]) -> tuple[Placement, DeliveryPlan]:
    """Placement plus delivery plan for (N, K, M); total load equals rate_eq."""
    p = equal_params(N, K, M)
    placement = equal_placement(N, K, M)
    plan = equal_delivery(placement, p, d)
    return placement, plan
