"""Seeded random digraphs for the four benchmark families.

All randomness comes from numpy's ``PCG64`` bit generator seeded with the
64-bit integer in :class:`GenSpec`.  The draw order is fixed so the same seed
yields the same graph in any implementation that follows it:

* ``er``: one uniform double per unordered pair ``(i, j)``, ``i < j``, in
  lexicographic order; the pair becomes both edges when the draw is below
  ``p``.
* ``digraph``: one uniform double per ordered pair ``(i, j)``, ``i != j``,
  lexicographic; the edge ``i -> j`` is kept when the draw is below ``p``.
* ``kout``: for vertices ``i = 1..n`` in order, a partial Fisher-Yates
  shuffle of the other vertices (ascending) picks ``k`` distinct targets,
  step ``t`` swapping position ``t`` with ``t + integers(0, n - 1 - t)``.
* ``kin``: the ``kout`` draws with every edge reversed.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .graph import Digraph, from_edge_list


class Family(str, Enum):
    ER = "er"
    DIGRAPH = "digraph"
    KOUT = "kout"
    KIN = "kin"


SEED_LIMIT = 1 << 64


@dataclass(frozen=True)
class GenSpec:
    """One random graph: family, size, edge probability or degree, and seed.

    ``p`` is used by ``er`` and ``digraph``; ``k`` by ``kout`` and ``kin``.
    """

    family: Family
    n: int
    p: float | None = None
    k: int | None = None
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not 0 <= self.seed < SEED_LIMIT:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.family in (Family.ER, Family.DIGRAPH):
            if self.p is None or not 0.0 <= self.p <= 1.0:
                raise ValueError(f"{self.family.value} needs p in [0, 1], got {self.p}")
        else:
            if self.k is None or self.k < 1:
                raise ValueError(f"{self.family.value} needs k >= 1, got {self.k}")
            if self.k > self.n - 1:
                raise ValueError(f"k = {self.k} exceeds n - 1 = {self.n - 1}")

    @property
    def parameter(self) -> float | int:
        return self.p if self.family in (Family.ER, Family.DIGRAPH) else self.k


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _k_out_edges(n: int, k: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    edges = []
    for i in range(1, n + 1):
        pool = [v for v in range(1, n + 1) if v != i]
        for t in range(k):
            u = t + int(rng.integers(0, n - 1 - t))
            pool[t], pool[u] = pool[u], pool[t]
        edges.extend((i, j) for j in pool[:k])
    return edges


def generate(spec: GenSpec) -> Digraph:
    """Draw the graph described by ``spec``; the same spec always gives the same graph."""
    n = spec.n
    rng = make_rng(spec.seed)
    if spec.family is Family.ER:
        pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
        keep = rng.random(len(pairs)) < spec.p
        edges = [e for (i, j), on in zip(pairs, keep) if on for e in ((i, j), (j, i))]
    elif spec.family is Family.DIGRAPH:
        pairs = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j]
        keep = rng.random(len(pairs)) < spec.p
        edges = [e for e, on in zip(pairs, keep) if on]
    else:
        edges = _k_out_edges(n, spec.k, rng)
        if spec.family is Family.KIN:
            edges = [(j, i) for i, j in edges]
    return from_edge_list(n, edges)


def random_out_tree(n: int, seed: int) -> tuple[Digraph, int]:
    """A random rooted directed spanning tree and its root.

    A random vertex order is drawn, its first vertex becomes the root, and
    each later vertex receives one edge from a uniformly chosen earlier one.
    The root has in-degree zero and every other vertex in-degree one.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = make_rng(seed)
    order = [int(v) + 1 for v in rng.permutation(n)]
    edges = [(order[int(rng.integers(0, t))], order[t]) for t in range(1, n)]
    return from_edge_list(n, edges), order[0]


def complete_digraph(n: int) -> Digraph:
    return from_edge_list(n, [(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j])


def directed_cycle(n: int) -> Digraph:
    return from_edge_list(n, [(i, i % n + 1) for i in range(1, n + 1)])


__all__ = [
    "Family",
    "GenSpec",
    "complete_digraph",
    "directed_cycle",
    "generate",
    "make_rng",
    "random_out_tree",
]
