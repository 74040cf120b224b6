"""Exhaustive robustness determination.

These routines check robustness conditions pair by pair over every pair of
nonempty disjoint vertex subsets.  They are exponential in ``n`` and serve
as ground truth for the MILP route; keep ``n`` at a dozen or below.

Two flavours live here:

* :func:`determine_robustness` and :func:`determine_rmax_exhaustive` follow
  the classic nested-descent search, scanning unordered pairs grouped by the
  size of their union and lowering ``(r, s)`` as counterexamples appear.
* :func:`smax_exhaustive` is a deliberately plain oracle: for each candidate
  ``s`` from ``n`` down it tests every ordered pair at once.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from typing import Iterator, NamedTuple

import numpy as np

from .graph import Digraph, GraphError, VertexSubset, min_in_degree, r_reachable_set

MAX_EXHAUSTIVE_N = 16


class RobustnessPair(NamedTuple):
    r: int
    s: int


def ceil_half(n: int) -> int:
    return (n + 1) // 2


def robust_holds(D: Digraph, S1: VertexSubset, S2: VertexSubset, r: int, s: int) -> bool:
    """Whether the pair ``(S1, S2)`` meets the (r, s) condition.

    True iff every vertex of ``S1`` has ``r`` outside in-neighbours, or every
    vertex of ``S2`` does, or together they contain at least ``s`` such
    vertices.
    """
    if S1.n != D.n or S2.n != D.n:
        raise GraphError("subsets must live on the graph's vertex set")
    if not S1.mask or not S2.mask:
        raise GraphError("both subsets must be nonempty")
    if S1.mask & S2.mask:
        raise GraphError("subsets must be disjoint")
    if r < 0 or s < 0:
        raise ValueError("r and s must be nonnegative")
    x1 = len(r_reachable_set(D, S1, r))
    x2 = len(r_reachable_set(D, S2, r))
    return x1 == len(S1) or x2 == len(S2) or x1 + x2 >= s


class _SubsetTable:
    """Per-subset reachability data for every mask of an ``n``-vertex graph.

    ``size[m]`` is ``|S|``, ``reach[m]`` is the max number of outside
    in-neighbours over members, and ``xcount[r][m]`` is ``|X_S^r|``.
    """

    def __init__(self, D: Digraph, r_top: int):
        n = D.n
        if n > MAX_EXHAUSTIVE_N:
            raise ValueError(f"exhaustive routines are capped at n = {MAX_EXHAUSTIVE_N}")
        masks = np.arange(1 << n, dtype=np.int64)
        outside = np.empty((n, masks.size), dtype=np.int64)
        member = np.empty((n, masks.size), dtype=bool)
        for j, inm in enumerate(D.in_masks):
            outside[j] = np.bitwise_count(np.int64(inm) & ~masks)
            member[j] = (masks >> j) & 1 == 1
        self.size_arr = member.sum(axis=0)
        self.reach_arr = np.where(member, outside, 0).max(axis=0)
        self.x_arr = np.stack(
            [(member & (outside >= r)).sum(axis=0) for r in range(r_top + 1)]
        )
        # plain lists keep the sequential scans fast
        self.size = self.size_arr.tolist()
        self.xcount = [row.tolist() for row in self.x_arr]

    def holds(self, m1: int, m2: int, r: int, s: int) -> bool:
        x1 = self.xcount[r][m1]
        x2 = self.xcount[r][m2]
        return x1 == self.size[m1] or x2 == self.size[m2] or x1 + x2 >= s


def iter_partition_pairs(n: int) -> Iterator[tuple[int, int]]:
    """Unordered nonempty disjoint pairs as masks, grouped by union size.

    For ``k = 2..n`` and each ``k``-subset ``K`` in lexicographic order, yield
    the ``2**(k-1) - 1`` splits of ``K`` into two nonempty parts.  The part
    holding the smallest vertex of ``K`` comes first.  The robustness
    conditions are symmetric in the two parts, so each unordered pair is
    visited once instead of twice.
    """
    for k in range(2, n + 1):
        for K in combinations(range(n), k):
            low = 1 << K[0]
            rest = [1 << v for v in K[1:]]
            kmask = low | sum(rest)
            for pick in range(2 ** (k - 1) - 1):
                a = low
                for bit, v in enumerate(rest):
                    if pick >> bit & 1:
                        a |= v
                yield a, kmask ^ a


def _nested_descent(D: Digraph, s_reset: int, rescan: bool) -> RobustnessPair:
    n = D.n
    table = _SubsetTable(D, ceil_half(n))
    r = min(max(min_in_degree(D), 1), ceil_half(n))
    s = s_reset
    while True:
        r_start = r
        for m1, m2 in iter_partition_pairs(n):
            # Both status flags of the published listing track the latest
            # pair test, so a single ``holds`` flag carries them.
            holds = table.holds(m1, m2, r, s)
            if not holds and s > 0:
                s -= 1
            while not holds and r > 0:
                while not holds and s > 0:
                    holds = table.holds(m1, m2, r, s)
                    if not holds:
                        s -= 1
                if not holds:
                    r -= 1
                    s = s_reset
            if r == 0:
                return RobustnessPair(r, s)
        if not rescan or r == r_start:
            return RobustnessPair(r, s)


def determine_robustness(D: Digraph, rescan: bool = True) -> RobustnessPair:
    """Lexicographically largest ``(r, s)`` for which ``D`` is (r, s)-robust.

    ``r`` starts at ``min(max(min in-degree, 1), ceil(n/2))`` so that rooted
    out-trees, whose root has in-degree zero, are still recognised as
    1-robust.  A graph that is not 1-robust returns ``(0, n)``; the trivial
    graph returns ``(1, 1)``.

    Whenever ``r`` drops, ``s`` restarts at ``n`` and pairs scanned earlier
    were only certified for the old ``r``.  With ``rescan=True`` the scan is
    repeated until a full pass leaves ``r`` unchanged.  ``rescan=False``
    runs the single pass of the published listing, which can overstate
    ``s`` on dense graphs.
    """
    if D.n == 1:
        return RobustnessPair(1, 1)
    return _nested_descent(D, s_reset=D.n, rescan=rescan)


def determine_rmax_exhaustive(D: Digraph) -> int:
    """Largest ``r`` for which ``D`` is r-robust, via the same descent with ``s`` pinned to 1.

    A single pass suffices here: a pair that passes at ``(r, 1)`` also
    passes at every smaller ``r``.
    """
    if D.n == 1:
        return 1
    return _nested_descent(D, s_reset=1, rescan=False).r


@lru_cache(maxsize=8)
def _ordered_pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    """All ordered nonempty disjoint mask pairs as two aligned arrays."""
    codes = np.arange(3**n, dtype=np.int64)
    m1 = np.zeros_like(codes)
    m2 = np.zeros_like(codes)
    for j in range(n):
        digit = codes % 3
        codes //= 3
        m1 |= (digit == 1).astype(np.int64) << j
        m2 |= (digit == 2).astype(np.int64) << j
    keep = (m1 != 0) & (m2 != 0)
    m1, m2 = m1[keep], m2[keep]
    m1.setflags(write=False)
    m2.setflags(write=False)
    return m1, m2


def _pair_x(D: Digraph, r: int):
    table = _SubsetTable(D, r)
    m1, m2 = _ordered_pairs(D.n)
    size, x = table.size_arr, table.x_arr[r]
    x1, x2 = x[m1], x[m2]
    exempt = (x1 == size[m1]) | (x2 == size[m2])
    return x1 + x2, exempt


def is_rs_robust(D: Digraph, r: int, s: int) -> bool:
    """Whether every ordered pair satisfies the (r, s) condition."""
    if D.n == 1:
        return r <= 1 and s <= 1
    total, exempt = _pair_x(D, r)
    return bool(np.all(exempt | (total >= s)))


def smax_exhaustive(D: Digraph, r: int) -> int:
    """Largest ``s`` in ``1..n`` with ``D`` (r, s)-robust, else 0.

    Every ``s`` is tested against the full pair set, from ``n`` downwards.
    ``r = 0`` gives ``n``.
    """
    n = D.n
    if r < 0 or r > ceil_half(n):
        raise ValueError(f"r must lie in [0, {ceil_half(n)}]")
    if n == 1:
        return 1
    total, exempt = _pair_x(D, r)
    for s in range(n, 0, -1):
        if np.all(exempt | (total >= s)):
            return s
    return 0


def rmax_by_reachability(D: Digraph) -> int:
    """``min over pairs of max(R(S1), R(S2))`` evaluated directly."""
    if D.n == 1:
        return 1
    table = _SubsetTable(D, 0)
    m1, m2 = _ordered_pairs(D.n)
    return int(np.maximum(table.reach_arr[m1], table.reach_arr[m2]).min())


def theta(D: Digraph) -> set[RobustnessPair]:
    """Every ``(r, s)`` with ``0 <= r <= ceil(n/2)`` and ``1 <= s <= n`` that ``D`` satisfies."""
    out = set()
    for r in range(ceil_half(D.n) + 1):
        for s in range(1, smax_exhaustive(D, r) + 1):
            out.add(RobustnessPair(r, s))
    return out


def fmax_exhaustive(D: Digraph) -> int:
    """Largest ``F`` with ``D`` (F+1, F+1)-robust; 0 when even (1, 1) fails."""
    for f in range(ceil_half(D.n) - 1, -1, -1):
        if smax_exhaustive(D, f + 1) >= f + 1:
            return f
    return 0


def rmax_witness(D: Digraph) -> tuple[VertexSubset, VertexSubset]:
    """A pair ``(S1, S2)`` with ``max(R(S1), R(S2)) = r_max``, first in mask order."""
    if D.n < 2:
        raise ValueError("need n >= 2")
    table = _SubsetTable(D, 0)
    m1, m2 = _ordered_pairs(D.n)
    worst = np.maximum(table.reach_arr[m1], table.reach_arr[m2])
    i = int(np.argmin(worst))
    return VertexSubset(int(m1[i]), D.n), VertexSubset(int(m2[i]), D.n)


def smax_witness(D: Digraph, r: int, s: int) -> tuple[VertexSubset, VertexSubset] | None:
    """A pair that violates the (r, s) condition, or None when ``D`` is (r, s)-robust."""
    if D.n < 2:
        return None
    total, exempt = _pair_x(D, r)
    bad = np.flatnonzero(~(exempt | (total >= s)))
    if bad.size == 0:
        return None
    m1, m2 = _ordered_pairs(D.n)
    i = int(bad[0])
    return VertexSubset(int(m1[i]), D.n), VertexSubset(int(m2[i]), D.n)


def lower_bound_exhaustive(D: Digraph) -> int:
    """``min R(S)`` over nonempty ``S`` with at most ``floor(n/2)`` members."""
    if D.n < 2:
        raise ValueError("need n >= 2")
    table = _SubsetTable(D, 0)
    keep = (table.size_arr >= 1) & (table.size_arr <= D.n // 2)
    return int(table.reach_arr[keep].min())


def upper_bound_exhaustive(D: Digraph) -> int:
    """``min max(R(S), R(V \\ S))`` over proper nonempty ``S``."""
    if D.n < 2:
        raise ValueError("need n >= 2")
    table = _SubsetTable(D, 0)
    full = (1 << D.n) - 1
    masks = np.arange(1, full)
    return int(np.maximum(table.reach_arr[masks], table.reach_arr[full ^ masks]).min())
