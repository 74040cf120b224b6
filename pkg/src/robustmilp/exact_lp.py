"""Exact linear programming on a fraction-free integer tableau.

A bounded-variable dual simplex.  Every constraint row gets a slack column,
so the tableau holds ``d * B^-1 [A I | rhs]`` plus a reduced-cost row, where
``d`` is the absolute basis determinant.  Pivots follow the
integer-preserving update

    T'[i, j] = (T[r, q] * T[i, j] - T[i, q] * T[r, j]) / d

whose division is always exact, so no rational arithmetic or tolerance is
involved.  Entries live in ``int64`` while they stay below ``2**31`` and
move to Python integers beyond that.

Because every objective coefficient of the robustness models is
nonnegative, the all-slack basis is dual feasible from the start and no
phase one is needed.  A column whose cost pushes it towards a missing bound
gets an artificial box; an optimum resting on that box is reported as
unbounded.

Determinants grow quickly on big-M rows, so this engine is used for the
public :func:`lp_relax` and for completing candidate points with every
integer column fixed, where the basis stays small.  The search itself
bounds with the floating-point engine in :mod:`solver`.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .model import MilpProblem, ModelError

_INT64_SAFE = 1 << 31
ARTIFICIAL_BOUND = 10**6

AT_LOWER, AT_UPPER, FREE = 0, 1, 2


class LPStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class SolverError(RuntimeError):
    pass


def validate_problem(p: MilpProblem) -> None:
    """Reject problems the solvers cannot take, before any search starts."""
    p.validate()
    for i, integer in enumerate(p.integer):
        if integer and (p.lower[i] is None or p.upper[i] is None):
            raise ModelError(f"integer variable {p.names[i]} needs finite bounds")
        if integer and (p.lower[i] != int(p.lower[i]) or p.upper[i] != int(p.upper[i])):
            raise ModelError(f"integer variable {p.names[i]} has fractional bounds")


@dataclass
class _Bounds:
    """Column bounds over structurals followed by slacks.

    Infinite bounds are flagged in ``has_lo``/``has_up``; the value slots
    then hold zero.
    """

    lo: np.ndarray
    up: np.ndarray
    has_lo: np.ndarray
    has_up: np.ndarray
    artificial: np.ndarray

    def copy(self) -> "_Bounds":
        return _Bounds(self.lo.copy(), self.up.copy(), self.has_lo.copy(), self.has_up.copy(), self.artificial.copy())

    def fixed(self) -> np.ndarray:
        return self.has_lo & self.has_up & (self.lo == self.up)


@dataclass
class _Tableau:
    T: np.ndarray  # (m + 1, N + 1); last row reduced costs, last column rhs
    d: int
    basis: np.ndarray  # column index basic in each row
    state: np.ndarray  # AT_LOWER / AT_UPPER / FREE for nonbasic columns
    is_basic: np.ndarray

    def copy(self) -> "_Tableau":
        # T is replaced, never mutated in place, so it may be shared
        return _Tableau(self.T, self.d, self.basis.copy(), self.state.copy(), self.is_basic.copy())


def _initial(p: MilpProblem, lower=None, upper=None) -> tuple[_Tableau, _Bounds, int]:
    m, k = p.A.shape
    N = k + m
    T = np.zeros((m + 1, N + 1), dtype=np.int64)
    T[:m, :k] = p.A
    T[:m, k : k + m] = np.eye(m, dtype=np.int64)
    T[:m, N] = p.rhs
    T[m, :k] = p.objective

    lo = np.zeros(N, dtype=np.int64)
    up = np.zeros(N, dtype=np.int64)
    has_lo = np.zeros(N, dtype=bool)
    has_up = np.zeros(N, dtype=bool)
    artificial = np.zeros(N, dtype=bool)
    state = np.full(N, AT_LOWER, dtype=np.int8)
    lower = p.lower if lower is None else lower
    upper = p.upper if upper is None else upper
    for j in range(k):
        if lower[j] is not None:
            lo[j], has_lo[j] = int(lower[j]), True
        if upper[j] is not None:
            up[j], has_up[j] = int(upper[j]), True
        c = int(p.objective[j])
        if c > 0 and not has_lo[j]:
            lo[j], has_lo[j], artificial[j] = -ARTIFICIAL_BOUND, True, True
        if c < 0 and not has_up[j]:
            up[j], has_up[j], artificial[j] = ARTIFICIAL_BOUND, True, True
        if c < 0 or (c == 0 and not has_lo[j] and has_up[j]):
            state[j] = AT_UPPER
        elif not has_lo[j]:
            state[j] = FREE
    for i, sense in enumerate(p.senses):
        j = k + i
        if sense in ("<=", "="):
            has_lo[j] = True
        if sense in (">=", "="):
            has_up[j] = True
    basis = np.arange(k, N)
    is_basic = np.zeros(N, dtype=bool)
    is_basic[basis] = True
    return _Tableau(T, 1, basis, state, is_basic), _Bounds(lo, up, has_lo, has_up, artificial), k


def _nonbasic_values(tab: _Tableau, bnd: _Bounds) -> np.ndarray:
    vals = np.where(tab.state == AT_UPPER, bnd.up, bnd.lo)
    vals = np.where(tab.state == FREE, 0, vals)
    vals[tab.is_basic] = 0
    return vals


def _scaled_basic_values(tab: _Tableau, bnd: _Bounds):
    """``d * x_B`` for every row."""
    T = tab.T
    m = T.shape[0] - 1
    xn = _nonbasic_values(tab, bnd)
    if T.dtype == object:
        xn = xn.astype(object)
    return T[:m, -1] - T[:m, :-1] @ xn


def _pivot(tab: _Tableau, r: int, q: int) -> None:
    T = tab.T
    prq = T[r, q]
    if T.dtype != object and (np.abs(T).max() >= _INT64_SAFE or abs(int(tab.d)) >= _INT64_SAFE):
        T = T.astype(object)
        prq = T[r, q]
    new = (T * prq - np.outer(T[:, q], T[r])) // tab.d
    new[r] = T[r]
    if prq < 0:
        new = -new
        prq = -prq
    tab.T = new
    tab.d = int(prq)
    leaving = tab.basis[r]
    tab.is_basic[leaving] = False
    tab.basis[r] = q
    tab.is_basic[q] = True


def _min_ratio(num: np.ndarray, den: np.ndarray, idx: np.ndarray) -> int:
    """Index in ``idx`` minimising ``num / den`` exactly, lowest index on ties."""
    approx = num.astype(float) / den.astype(float)
    lowest = approx.min()
    near = np.flatnonzero(approx <= lowest * (1 + 1e-9) + 1e-300)
    best = near[0]
    for c in near[1:]:
        # num[c]/den[c] < num[best]/den[best] with positive denominators
        if int(num[c]) * int(den[best]) < int(num[best]) * int(den[c]):
            best = c
    return int(idx[best])


def _dual_simplex(tab: _Tableau, bnd: _Bounds, deadline: Optional[float] = None, max_iter: int = 100000):
    """Run bounded dual simplex from a dual feasible tableau; returns ``(status, iterations)``.

    ``status`` is an :class:`LPStatus` or ``None`` when ``deadline`` passed.
    """
    m = tab.T.shape[0] - 1
    degenerate = 0
    fixed = bnd.fixed()
    for it in range(max_iter):
        if deadline is not None and it % 16 == 15 and time.perf_counter() > deadline:
            return None, it
        beta = _scaled_basic_values(tab, bnd)
        d = tab.d
        bvars = tab.basis
        lo_b, up_b = bnd.lo[bvars], bnd.up[bvars]
        if beta.dtype == object:
            lo_b, up_b = lo_b.astype(object), up_b.astype(object)
        below = np.where(bnd.has_lo[bvars], lo_b * d - beta, 0)
        above = np.where(bnd.has_up[bvars], beta - up_b * d, 0)
        infeas = np.maximum(below, above)
        bad = np.flatnonzero(infeas > 0)
        if bad.size == 0:
            return LPStatus.OPTIMAL, it
        if degenerate > 50:
            # Bland-style fallback: lowest column index among infeasible rows
            r = int(bad[np.argmin(bvars[bad])])
        else:
            r = int(bad[np.argmax(infeas[bad])])
        increase = below[r] > 0

        T = tab.T
        row = T[r, :-1]
        red = T[m, :-1]
        st = tab.state
        nb = ~tab.is_basic & ~fixed
        if increase:
            cand = nb & (((st == AT_LOWER) & (row < 0)) | ((st == AT_UPPER) & (row > 0)) | ((st == FREE) & (row != 0)))
        else:
            cand = nb & (((st == AT_LOWER) & (row > 0)) | ((st == AT_UPPER) & (row < 0)) | ((st == FREE) & (row != 0)))
        idx = np.flatnonzero(cand)
        if idx.size == 0:
            return LPStatus.INFEASIBLE, it
        num = np.abs(red[idx])
        den = np.abs(row[idx])
        q = _min_ratio(num, den, idx)
        degenerate = degenerate + 1 if red[q] == 0 else 0

        leaving = int(tab.basis[r])
        _pivot(tab, r, q)
        tab.state[q] = AT_LOWER
        tab.state[leaving] = AT_LOWER if increase else AT_UPPER
    raise SolverError("dual simplex iteration limit reached")


def _point(tab: _Tableau, bnd: _Bounds, k: int) -> list[Fraction]:
    beta = _scaled_basic_values(tab, bnd)
    vals = _nonbasic_values(tab, bnd)
    x = [Fraction(int(v)) for v in vals[:k]]
    d = tab.d
    for i, j in enumerate(tab.basis):
        if j < k:
            x[j] = Fraction(int(beta[i]), d)
    return x


def _objective(p: MilpProblem, x) -> Fraction:
    return sum((int(c) * v for c, v in zip(p.objective, x) if c), Fraction(0))


def _at_artificial(tab: _Tableau, bnd: _Bounds, x, k: int) -> bool:
    for j in np.flatnonzero(bnd.artificial[:k]):
        if x[j] <= -ARTIFICIAL_BOUND or x[j] >= ARTIFICIAL_BOUND:
            return True
    return False


def exact_lp(p: MilpProblem, lower: Optional[Sequence] = None, upper: Optional[Sequence] = None):
    """Exact optimum of the linear relaxation of ``p``, optionally with replaced bounds.

    ``lower``/``upper`` override the problem's integer bounds column by
    column (``None`` entries mean unbounded).  Returns ``(status, value,
    point)`` with :class:`~fractions.Fraction` entries, or ``None`` for
    ``value`` and ``point`` when not optimal.
    """
    tab, bnd, k = _initial(p, lower, upper)
    if np.any(bnd.has_lo & bnd.has_up & (bnd.lo > bnd.up)):
        return LPStatus.INFEASIBLE, None, None
    status, _ = _dual_simplex(tab, bnd)
    if status is not LPStatus.OPTIMAL:
        return status, None, None
    x = _point(tab, bnd, k)
    if _at_artificial(tab, bnd, x, k):
        return LPStatus.UNBOUNDED, None, None
    return LPStatus.OPTIMAL, _objective(p, x), tuple(x)



def lp_relax(p: MilpProblem):
    """Exact optimum of the linear relaxation of ``p`` (integrality dropped).

    Returns ``(status, value, point)``; ``value`` is a
    :class:`~fractions.Fraction` no larger than any integer-feasible
    objective value.
    """
    validate_problem(p)
    return exact_lp(p)
