"""Simple digraphs, their Laplacians, and the subset calculus built on them.

Vertices are labelled ``1..n`` at every public boundary.  Internally vertex
``j`` occupies bit ``j - 1`` of a subset bitmask, so a subset of an
``n``-vertex graph is a Python ``int`` in ``[0, 2**n)``.  Python integers are
unbounded, so the same representation covers graphs beyond 64 vertices,
although the exhaustive routines are only practical for small ``n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterable, Iterator

import numpy as np


class GraphError(ValueError):
    """Raised for inputs that do not describe a nonempty simple digraph."""


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def _bits(mask: int) -> Iterator[int]:
    """Yield the 0-based positions of the set bits of ``mask``, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class VertexSubset:
    """A subset of the vertex set ``{1..n}`` stored as a bitmask."""

    mask: int
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise GraphError("ambient vertex count must be at least 1")
        if self.mask < 0 or self.mask >> self.n:
            raise GraphError(f"mask {self.mask:#x} has bits outside 1..{self.n}")

    @classmethod
    def from_members(cls, n: int, members: Iterable[int]) -> "VertexSubset":
        mask = 0
        for v in members:
            if not 1 <= v <= n:
                raise GraphError(f"vertex {v} outside 1..{n}")
            mask |= 1 << (v - 1)
        return cls(mask, n)

    @property
    def members(self) -> tuple[int, ...]:
        return tuple(b + 1 for b in _bits(self.mask))

    def __len__(self) -> int:
        return popcount(self.mask)

    def __contains__(self, v: int) -> bool:
        return 1 <= v <= self.n and bool(self.mask >> (v - 1) & 1)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def complement(self) -> "VertexSubset":
        return VertexSubset(((1 << self.n) - 1) & ~self.mask, self.n)

    def __repr__(self) -> str:
        return f"VertexSubset({set(self.members) or '{}'}, n={self.n})"


@dataclass(frozen=True)
class Digraph:
    """An immutable simple digraph on vertices ``1..n``.

    ``in_masks[j - 1]`` is the bitmask of the in-neighbour set ``N_j`` of
    vertex ``j``.  Use :func:`from_edge_list` rather than building one
    directly; the constructor still validates its arguments.
    """

    n: int
    in_masks: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1:
            raise GraphError("a digraph needs at least one vertex")
        if len(self.in_masks) != self.n:
            raise GraphError("need exactly one in-neighbour mask per vertex")
        for j, m in enumerate(self.in_masks):
            if m < 0 or m >> self.n:
                raise GraphError(f"in-neighbours of vertex {j + 1} outside 1..{self.n}")
            if m >> j & 1:
                raise GraphError(f"self-loop at vertex {j + 1}")

    def in_neighbors(self, j: int) -> frozenset[int]:
        """``N_j`` as a set of 1-based vertex labels."""
        return frozenset(b + 1 for b in _bits(self.in_masks[j - 1]))

    def in_degree(self, j: int) -> int:
        return popcount(self.in_masks[j - 1])

    @property
    def in_degrees(self) -> tuple[int, ...]:
        return tuple(popcount(m) for m in self.in_masks)

    def edges(self) -> list[tuple[int, int]]:
        """All edges ``(i, j)`` meaning ``i -> j``, sorted lexicographically."""
        return sorted((i + 1, j + 1) for j, m in enumerate(self.in_masks) for i in _bits(m))

    @property
    def num_edges(self) -> int:
        return sum(self.in_degrees)

    def subset(self, members: Iterable[int]) -> VertexSubset:
        return VertexSubset.from_members(self.n, members)


def from_edge_list(n: int, edges: Iterable[tuple[int, int]]) -> Digraph:
    """Build a digraph from 1-based directed edges ``(i, j)`` meaning ``i -> j``.

    Duplicate edges collapse to one.  Self-loops, out-of-range endpoints and
    ``n < 1`` raise :class:`GraphError`.
    """
    if n < 1:
        raise GraphError("a digraph needs at least one vertex")
    masks = [0] * n
    for i, j in edges:
        if not (1 <= i <= n and 1 <= j <= n):
            raise GraphError(f"edge ({i}, {j}) has an endpoint outside 1..{n}")
        if i == j:
            raise GraphError(f"self-loop ({i}, {i}) is not allowed in a simple digraph")
        masks[j - 1] |= 1 << (i - 1)
    return Digraph(n, tuple(masks))


def from_adjacency(adj) -> Digraph:
    """Build a digraph from a 0/1 matrix with ``adj[i][j] == 1`` iff ``i -> j``."""
    a = np.asarray(adj)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise GraphError("adjacency matrix must be square")
    if not np.isin(a, (0, 1)).all():
        raise GraphError("adjacency entries must be 0 or 1")
    n = a.shape[0]
    if n and np.any(np.diag(a)):
        raise GraphError("adjacency matrix has a nonzero diagonal (self-loop)")
    src, dst = np.nonzero(a)
    return from_edge_list(n, zip((src + 1).tolist(), (dst + 1).tolist()))


def adjacency(D: Digraph) -> np.ndarray:
    """Dense 0/1 adjacency matrix, source row and destination column."""
    a = np.zeros((D.n, D.n), dtype=np.int64)
    for i, j in D.edges():
        a[i - 1, j - 1] = 1
    return a


def laplacian(D: Digraph) -> np.ndarray:
    """In-degree Laplacian: ``L[j, j] = |N_j|`` and ``L[j, i] = -1`` for ``i in N_j``.

    Row ``j`` describes the in-neighbourhood of vertex ``j + 1``.  The array
    is exact ``int64`` and read-only.
    """
    L = -adjacency(D).T
    L[np.diag_indices(D.n)] = D.in_degrees
    L.setflags(write=False)
    return L


def min_in_degree(D: Digraph) -> int:
    return min(D.in_degrees)


def indicator(S: VertexSubset) -> np.ndarray:
    """0/1 vector with a one in position ``j - 1`` for each member ``j``."""
    return np.array([S.mask >> b & 1 for b in range(S.n)], dtype=np.int64)


def inverse_indicator(b) -> VertexSubset:
    v = np.asarray(b)
    if v.ndim != 1 or not np.isin(v, (0, 1)).all():
        raise GraphError("indicator must be a 0/1 vector")
    mask = 0
    for pos in np.flatnonzero(v).tolist():
        mask |= 1 << pos
    return VertexSubset(mask, len(v))


def _check_ambient(D: Digraph, S: VertexSubset) -> None:
    if S.n != D.n:
        raise GraphError(f"subset lives on {S.n} vertices, graph has {D.n}")


def outside_in_degree(D: Digraph, S: VertexSubset, j: int) -> int:
    """``|N_j \\ S|`` for vertex ``j``."""
    _check_ambient(D, S)
    return popcount(D.in_masks[j - 1] & ~S.mask)


def reachability(D: Digraph, S: VertexSubset) -> int:
    """Largest ``r`` for which ``S`` is r-reachable; zero for the empty set."""
    _check_ambient(D, S)
    return max((popcount(D.in_masks[j] & ~S.mask) for j in _bits(S.mask)), default=0)


def reachability_laplacian(L: np.ndarray, S: VertexSubset) -> int:
    """The same quantity as :func:`reachability`, read off ``max_j (L @ sigma(S))_j``."""
    if L.shape != (S.n, S.n):
        raise GraphError("Laplacian and subset sizes disagree")
    return int((L @ indicator(S)).max())


def r_reachable_set(D: Digraph, S: VertexSubset, r: int) -> VertexSubset:
    """Members of ``S`` with at least ``r`` in-neighbours outside ``S``."""
    _check_ambient(D, S)
    if r < 0:
        raise ValueError("r must be nonnegative")
    mask = 0
    for j in _bits(S.mask):
        if popcount(D.in_masks[j] & ~S.mask) >= r:
            mask |= 1 << j
    return VertexSubset(mask, D.n)


# ---------------------------------------------------------------------------
# Enumeration of subset pairs


def count_T(n: int) -> int:
    """Number of ordered pairs of nonempty disjoint subsets of an n-set.

    Python integers are arbitrary precision, so the count cannot overflow.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    return sum(comb(n, p) * (2**p - 2) for p in range(2, n + 1))


def iter_disjoint_masks(n: int) -> Iterator[tuple[int, int]]:
    """Ordered nonempty disjoint mask pairs, ``S1`` ascending then ``S2`` ascending."""
    if n < 2:
        raise ValueError("need n >= 2")
    full = (1 << n) - 1
    for m1 in range(1, full):
        rest = full & ~m1
        # ascending walk over the nonempty submasks of ``rest``
        sub = rest & -rest
        while sub:
            yield m1, sub
            sub = (sub - rest) & rest


def enumerate_T(n: int) -> Iterator[tuple[VertexSubset, VertexSubset]]:
    """Every ordered pair of nonempty disjoint subsets of ``{1..n}`` exactly once."""
    for m1, m2 in iter_disjoint_masks(n):
        yield VertexSubset(m1, n), VertexSubset(m2, n)


def enumerate_T_prime(n: int) -> Iterator[tuple[VertexSubset, VertexSubset]]:
    """The ``2**n - 2`` ordered bipartitions of ``{1..n}`` into nonempty parts."""
    if n < 2:
        raise ValueError("need n >= 2")
    full = (1 << n) - 1
    for m1 in range(1, full):
        yield VertexSubset(m1, n), VertexSubset(full ^ m1, n)
