"""Shared graphs, corpora and an independent brute-force MILP oracle for the tests."""

from __future__ import annotations

import itertools

import numpy as np
from hypothesis import strategies as st

from robustmilp.generators import Family, GenSpec, complete_digraph, directed_cycle, generate
from robustmilp.graph import Digraph, from_edge_list

# one "criterion N: PASS|FAIL ..." line per acceptance test, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []

CYCLE3 = directed_cycle(3)
K3 = complete_digraph(3)
K4 = complete_digraph(4)
K5 = complete_digraph(5)
K6 = complete_digraph(6)
EDGELESS4 = from_edge_list(4, [])
TWO_CYCLES = from_edge_list(6, [(1, 2), (2, 3), (3, 1), (4, 5), (5, 6), (6, 4)])
# rooted out-tree on 6 vertices with root 1: 1->2, 1->3, 2->4, 2->5, 3->6
SPANNING_TREE = from_edge_list(6, [(1, 2), (1, 3), (2, 4), (2, 5), (3, 6)])
# found by an oracle search over random digraphs with n = 4: (r*, s*) = (2, 1)
# while (1, 1) still holds, so F_max = 0 even though r_max = 2
FIG2_LIKE = from_edge_list(4, [(1, 3), (1, 4), (2, 1), (3, 1), (3, 2), (3, 4), (4, 2), (4, 3)])


@st.composite
def digraphs(draw, min_n=2, max_n=6):
    """Arbitrary simple digraphs on ``min_n..max_n`` vertices."""
    n = draw(st.integers(min_n, max_n))
    pairs = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j]
    flags = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return from_edge_list(n, [e for e, on in zip(pairs, flags) if on])


CORPUS_CELLS = (
    [(Family.ER, p) for p in (0.3, 0.5, 0.8)]
    + [(Family.DIGRAPH, p) for p in (0.3, 0.5, 0.8)]
    + [(Family.KOUT, k) for k in (2, 3)]
    + [(Family.KIN, k) for k in (2, 3)]
)
CORPUS_N = tuple(range(4, 11))


def corpus(size: int = 400, base_seed: int = 20240601) -> list[tuple[str, Digraph]]:
    """Fixed-seed mix over every (family, p or k, n) cell, visited round-robin."""
    cells = [(fam, param, n) for fam, param in CORPUS_CELLS for n in CORPUS_N]
    out = []
    for g in range(size):
        fam, param, n = cells[g % len(cells)]
        seed = base_seed + g
        if fam in (Family.ER, Family.DIGRAPH):
            spec = GenSpec(fam, n, p=param, seed=seed)
        else:
            spec = GenSpec(fam, n, k=param, seed=seed)
        out.append((f"{fam.value}/n={n}/{param}/seed={seed}", generate(spec)))
    return out


def brute_force_milp(p, chunk: int = 1 << 16) -> tuple[object, object]:
    """Minimum of a small MilpProblem by enumerating every integer assignment.

    Integer columns run over their full bound ranges.  At most one continuous
    column is allowed, with coefficients of magnitude one in every row, so its
    best value for a given integer assignment is an integer read off the rows.
    Returns ``(value, point)`` or ``(None, None)`` when infeasible.
    """
    cont = [i for i in range(p.num_vars) if not p.integer[i]]
    if len(cont) > 1:
        raise ValueError("at most one continuous column")
    ints = [i for i in range(p.num_vars) if p.integer[i]]
    A = np.asarray(p.A, dtype=np.int64)
    rhs = np.asarray(p.rhs, dtype=np.int64)
    senses = np.array(p.senses)
    obj = np.asarray(p.objective, dtype=np.int64)
    ranges = [range(p.lower[i], p.upper[i] + 1) for i in ints]
    if cont:
        c = A[:, cont[0]]
        if not np.isin(c, (-1, 0, 1)).all():
            raise ValueError("continuous coefficients must be -1, 0 or 1")
        if obj[cont[0]] < 0:
            raise ValueError("continuous column must not have negative cost")
        upper_rows = ((senses == "<=") & (c > 0)) | ((senses == ">=") & (c < 0)) | ((senses == "=") & (c != 0))
        lower_rows = ((senses == ">=") & (c > 0)) | ((senses == "<=") & (c < 0)) | ((senses == "=") & (c != 0))
        plain = c == 0
    else:
        plain = np.ones(len(rhs), dtype=bool)
    best_val, best_pt = None, None
    combos = itertools.product(*ranges)
    while True:
        block = np.array(list(itertools.islice(combos, chunk)), dtype=np.int64).reshape(-1, len(ints))
        if block.shape[0] == 0:
            break
        act = block @ A[:, ints].T
        ok = np.ones(block.shape[0], dtype=bool)
        for sense in ("<=", ">=", "="):
            rows = plain & (senses == sense)
            if rows.any():
                a, b = act[:, rows], rhs[rows]
                ok &= {"<=": (a <= b), ">=": (a >= b), "=": (a == b)}[sense].all(axis=1)
        val = block @ obj[ints]
        if cont:
            # each row reads c * t (sense) rhs - act, with c = +-1
            bound = (rhs - act) * c
            big = np.iinfo(np.int64).max // 4
            lo = np.where(lower_rows, bound, -big).max(axis=1)
            hi = np.where(upper_rows, bound, big).min(axis=1)
            if p.lower[cont[0]] is not None:
                lo = np.maximum(lo, p.lower[cont[0]])
            if p.upper[cont[0]] is not None:
                hi = np.minimum(hi, p.upper[cont[0]])
            ok &= lo <= hi
            if obj[cont[0]] > 0 and (ok & (lo == -big)).any():
                raise ValueError("unbounded")
            t = np.where(obj[cont[0]] > 0, lo, np.clip(0, lo, hi))
            val = val + obj[cont[0]] * t
        if not ok.any():
            continue
        idx = np.flatnonzero(ok)
        k = idx[np.argmin(val[idx])]
        if best_val is None or val[k] < best_val:
            x = [0] * p.num_vars
            for pos, i in enumerate(ints):
                x[i] = int(block[k, pos])
            if cont:
                x[cont[0]] = int(t[k])
            best_val, best_pt = int(val[k]), x
    return best_val, best_pt
