"""Branch-and-bound for the small integer programs built in :mod:`model`.

Each node runs three steps:

1. Activity-based bound propagation over all rows plus an objective cutoff
   row ``c x <= incumbent - 1`` (for integral objectives).
2. A bounded dual simplex on a dense floating-point tableau, warm started
   from the parent's optimal tableau.  The tableau is recomputed from the
   basis after every 40 pivots along a root-to-node path, which keeps
   rounding drift small.
3. Branching on the most fractional integer column, with ties going to the
   lowest index.

Floating point is only ever used to *bound*.  A node is discarded when
``ceil(z - 1e-6)`` already reaches the incumbent.  The margin is far
larger than the rounding error of these well-scaled systems, so the
discard is exact for integral objectives.  Every incumbent is rebuilt
exactly: the integer columns are rounded, the continuous columns are
re-solved with the exact engine in :mod:`exact_lp`, and every row is then
re-checked with integer arithmetic before the point is accepted.

Node order is best-bound first.  Ties go to the deepest node and then the
oldest one, which gives depth-first dives inside each bound plateau.
"""

from __future__ import annotations

import heapq
import math
import random
import time
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .exact_lp import AT_LOWER, AT_UPPER, FREE, LPStatus, SolverError, exact_lp, lp_relax, validate_problem
from .model import MilpProblem

__all__ = [
    "LPStatus",
    "SolveConfig",
    "SolveResult",
    "SolveStatus",
    "SolverError",
    "lp_relax",
    "solve",
    "solve_anytime",
]

PRIMAL_TOL = 1e-9
PIVOT_TOL = 1e-9
BOUND_MARGIN = 1e-6
REFACTOR_EVERY = 40
_STALLED = "stalled"


class SolveStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    TIME_LIMIT = "time_limit"
    NODE_LIMIT = "node_limit"
    ABORTED = "aborted"


@dataclass(frozen=True)
class SolveConfig:
    """Limits and switches for :func:`solve`.

    Parameters
    ----------
    time_limit : float, optional
        Wall-clock budget in seconds.
    integrality_tolerance : float
        How far an LP value may sit from an integer and still count as
        integral.  Candidates are rebuilt and checked exactly afterwards, so
        this only steers the search.
    node_limit : int, optional
        Maximum number of nodes to process.
    deterministic : bool
        When false, ties between equally fractional branching candidates
        are broken by a generator seeded with ``rng_seed``.
    rounding_heuristic : bool
        Try the rounded LP point as an incumbent at every fractional node.
    """

    time_limit: Optional[float] = None
    integrality_tolerance: float = 1e-6
    node_limit: Optional[int] = None
    deterministic: bool = True
    rng_seed: int = 0
    rounding_heuristic: bool = True

    def __post_init__(self):
        if not 0 < self.integrality_tolerance < 0.5:
            raise ValueError("integrality_tolerance must lie in (0, 0.5)")
        if self.time_limit is not None and self.time_limit < 0:
            raise ValueError("time_limit must be nonnegative")
        if self.node_limit is not None and self.node_limit < 0:
            raise ValueError("node_limit must be nonnegative")


@dataclass
class SolveResult:
    """Outcome of a branch-and-bound run.

    ``best_bound`` is a proven lower bound on the optimum: an ``int`` for
    integral objectives, ``math.inf`` once infeasibility is proven, and
    ``-math.inf`` before any bound is known.
    """

    status: SolveStatus
    incumbent_value: Optional[Fraction | int] = None
    incumbent_point: Optional[tuple] = None
    best_bound: Fraction | int | float = -math.inf
    nodes_explored: int = 0
    elapsed_seconds: float = 0.0
    lp_iterations: int = 0
    error: Optional[BaseException] = field(default=None, repr=False)

    @property
    def is_optimal(self) -> bool:
        return self.status is SolveStatus.OPTIMAL

    @property
    def gap(self):
        if self.incumbent_value is None:
            return math.inf
        return self.incumbent_value - self.best_bound


# ---------------------------------------------------------------------------
# Floating-point relaxation


class _Relaxation:
    """Dense bounded dual simplex over ``[A I] (x, s) = rhs``."""

    def __init__(self, p: MilpProblem):
        m, k = p.A.shape
        self.m, self.k, self.N = m, k, k + m
        M = np.zeros((m, self.N + 1))
        M[:, :k] = p.A
        M[:, k : k + m] = np.eye(m)
        M[:, self.N] = p.rhs
        self.M = M
        self.c = np.zeros(self.N)
        self.c[:k] = p.objective
        self.slack_lo = np.array([0.0 if s in ("<=", "=") else -np.inf for s in p.senses])
        self.slack_up = np.array([0.0 if s in (">=", "=") else np.inf for s in p.senses])
        self.iterations = 0

    def full_bounds(self, lo: np.ndarray, up: np.ndarray):
        return np.concatenate([lo, self.slack_lo]), np.concatenate([up, self.slack_up])

    def tableau(self, basis: np.ndarray) -> np.ndarray:
        m, N = self.m, self.N
        Binv = np.linalg.inv(self.M[:, basis])
        T = np.empty((m + 1, N + 1))
        T[:m] = Binv @ self.M
        T[:m, basis] = np.eye(m)
        T[m] = np.concatenate([self.c, [0.0]]) - self.c[basis] @ T[:m]
        T[m, basis] = 0.0
        return T

    def solve(self, lo, up, basis, state, T=None, age=0, deadline=None):
        """Dual simplex from a dual feasible basis.

        ``T`` is the tableau belonging to ``basis`` if the caller kept it,
        and ``age`` counts the pivots applied to it since it was last
        computed from scratch.  Returns ``(status, basis, state, T, age,
        x)`` where ``status`` is an :class:`LPStatus` or ``None`` on timeout.
        """
        m, N = self.m, self.N
        basis = basis.copy()
        state = state.copy()
        free = state == FREE
        if free.any():
            # a free column that picked up a bound sits on it
            state[free & np.isfinite(lo)] = AT_LOWER
            state[free & ~np.isfinite(lo) & np.isfinite(up)] = AT_UPPER
            free = state == FREE
        has_free = bool(free.any())
        if T is None or age >= REFACTOR_EVERY:
            T, age = self.tableau(basis), 0
        else:
            T = T.copy()
        # sf: +1 nonbasic at lower, -1 nonbasic at upper, 0 basic or fixed
        sf = np.where(state == AT_UPPER, -1.0, 1.0)
        sf[free] = 0.0
        sf[basis] = 0.0
        sf[lo == up] = 0.0
        xn = np.where(state == AT_UPPER, up, lo)
        xn[free] = 0.0
        xn[basis] = 0.0
        lo_b = lo[basis]
        up_b = up[basis]
        degenerate = 0
        body, rhs, red = T[:m, :N], T[:m, N], T[m, :N]
        for it in range(50 * (m + N)):
            if deadline is not None and it % 16 == 15 and time.perf_counter() > deadline:
                self.iterations += it
                return None, basis, state, T, age, None
            beta = rhs - body @ xn
            below = lo_b - beta
            above = beta - up_b
            infeas = np.maximum(below, above)
            r = int(np.argmax(infeas))
            if infeas[r] <= PRIMAL_TOL:
                self.iterations += it
                x = xn.copy()
                x[basis] = beta
                return LPStatus.OPTIMAL, basis, state, T, age, x[: self.k]
            bland = degenerate > 30
            if bland:
                # Bland's rule on both sides once progress stalls
                bad = np.flatnonzero(infeas > PRIMAL_TOL)
                r = int(bad[np.argmin(basis[bad])])
            increase = below[r] > above[r]
            row = T[r, :N]
            dirv = -row if increase else row
            if has_free:
                sfx = sf.copy()
                fb = free & ~np.isin(np.arange(N), basis)
                sfx[fb] = np.sign(dirv[fb])
            else:
                sfx = sf
            w = sfx * dirv
            cand = w > PIVOT_TOL
            if not cand.any():
                self.iterations += it
                return LPStatus.INFEASIBLE, basis, state, T, age, None
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = np.where(cand, np.maximum(sfx * red, 0.0) / w, np.inf)
            best = ratio.min()
            ties = ratio <= best + 1e-12
            if bland:
                q = int(np.argmax(ties))
            else:
                # among near-ties take the largest pivot, lowest column first
                q = int(np.argmax(np.where(ties, w, -1.0)))
            degenerate = degenerate + 1 if best <= 1e-12 else 0

            leaving = int(basis[r])
            pr = T[r] / T[r, q]
            col = T[:, q].copy()
            col[r] = 0.0
            T -= np.outer(col, pr)
            T[r] = pr
            basis[r] = q
            lo_b[r] = lo[q]
            up_b[r] = up[q]
            state[leaving] = AT_LOWER if increase else AT_UPPER
            xn[leaving] = lo[leaving] if increase else up[leaving]
            xn[q] = 0.0
            sf[q] = 0.0
            sf[leaving] = 0.0 if lo[leaving] == up[leaving] else (1.0 if increase else -1.0)
            if has_free:
                free[q] = False
            age += 1
            if age >= REFACTOR_EVERY:
                T, age = self.tableau(basis), 0
                body, rhs, red = T[:m, :N], T[:m, N], T[m, :N]
        self.iterations += it
        return _STALLED, basis, state, T, age, None


# ---------------------------------------------------------------------------
# Bound propagation


class _Propagator:
    """Activity-based tightening over rows ``G x <= h`` of the structural columns.

    For a row with minimum activity ``act`` and room ``h - act``, a column
    with coefficient ``a > 0`` can rise at most ``room / a`` above its lower
    bound, and one with ``a < 0`` can fall at most ``room / |a|`` below its
    upper bound.  Infinite bounds are handled by counting them per row: a
    row with one infinite contribution can still bound that one column.
    """

    def __init__(self, p: MilpProblem):
        rows, rhs = [], []
        A = p.A.astype(float)
        for i, sense in enumerate(p.senses):
            if sense in ("<=", "="):
                rows.append(A[i])
                rhs.append(float(p.rhs[i]))
            if sense in (">=", "="):
                rows.append(-A[i])
                rhs.append(-float(p.rhs[i]))
        self.G0 = np.array(rows).reshape(len(rows), p.num_vars)
        self.h0 = np.array(rhs)
        self.obj = p.objective.astype(float)
        self.is_int = np.array(p.integer, dtype=bool)
        self.set_cutoff(None)

    def set_cutoff(self, cutoff: Optional[float]) -> None:
        if cutoff is None:
            G, h = self.G0, self.h0
        else:
            G = np.vstack([self.G0, self.obj])
            h = np.append(self.h0, cutoff)
        self.h = h
        pos, neg = G > 0, G < 0
        self.Gp = np.where(pos, G, 0.0)
        self.Gn = np.where(neg, G, 0.0)
        self.pos_f = pos.astype(float)
        self.neg_f = neg.astype(float)
        # distances per unit of room: 1/a for a > 0 and 1/|a| for a < 0;
        # the masks add +inf where a row does not constrain that direction
        with np.errstate(divide="ignore"):
            self.inv_pos = np.where(pos, 1.0 / G, 0.0)
            self.inv_neg = np.where(neg, -1.0 / G, 0.0)
        self.off_pos = np.where(pos, 0.0, np.inf)
        self.off_neg = np.where(neg, 0.0, np.inf)

    def run(self, lo: np.ndarray, up: np.ndarray, rounds: int = 25) -> bool:
        """Tighten ``lo``/``up`` in place; False when a row cannot be met."""
        h, is_int = self.h, self.is_int
        for _ in range(rounds):
            inf_lo = np.isinf(lo)
            inf_up = np.isinf(up)
            any_inf = inf_lo.any() or inf_up.any()
            lo_f = np.where(inf_lo, 0.0, lo) if any_inf else lo
            up_f = np.where(inf_up, 0.0, up) if any_inf else up
            room = h - (self.Gp @ lo_f + self.Gn @ up_f)
            if any_inf:
                ninf = self.pos_f @ inf_lo + self.neg_f @ inf_up
                if np.any((ninf == 0) & (room < -1e-9)):
                    return False
                room = np.maximum(room, 0.0)
                rise = room[:, None] * self.inv_pos + self.off_pos
                fall = room[:, None] * self.inv_neg + self.off_neg
                # rows with two or more infinite terms bound nothing; rows
                # with one bound only the column that carries it
                many = ninf >= 2
                one = ninf == 1
                rise[many] = np.inf
                fall[many] = np.inf
                if one.any():
                    rise[np.ix_(one, ~inf_lo)] = np.inf
                    fall[np.ix_(one, ~inf_up)] = np.inf
            else:
                if np.any(room < -1e-9):
                    return False
                room = np.maximum(room, 0.0)
                rise = room[:, None] * self.inv_pos + self.off_pos
                fall = room[:, None] * self.inv_neg + self.off_neg
            new_up = lo_f + rise.min(axis=0)
            new_lo = up_f - fall.min(axis=0)
            new_up = np.where(is_int, np.floor(new_up + 1e-9), new_up + 1e-9)
            new_lo = np.where(is_int, np.ceil(new_lo - 1e-9), new_lo - 1e-9)
            tighter_up = new_up < up - 1e-7
            tighter_lo = new_lo > lo + 1e-7
            if not (tighter_up.any() or tighter_lo.any()):
                return True
            up[tighter_up] = new_up[tighter_up]
            lo[tighter_lo] = new_lo[tighter_lo]
            if np.any(lo > up + 1e-9):
                return False
        return True


# ---------------------------------------------------------------------------
# Branch and bound


@dataclass
class _Node:
    lo: np.ndarray
    up: np.ndarray
    basis: np.ndarray
    state: np.ndarray
    depth: int
    T: Optional[np.ndarray] = None
    age: int = 0


class _Abort(Exception):
    pass


def _as_number(v: Fraction):
    return int(v) if v.denominator == 1 else v


class _Search:
    def __init__(self, p: MilpProblem, cfg: SolveConfig, observer):
        self.p = p
        self.cfg = cfg
        self.observer = observer
        self.start = time.perf_counter()
        self.deadline = None if cfg.time_limit is None else self.start + cfg.time_limit
        self.is_int = np.array(p.integer, dtype=bool)
        self.int_cols = np.flatnonzero(self.is_int)
        self.has_continuous = not self.is_int.all()
        self.relax = _Relaxation(p)
        self.prop = _Propagator(p)
        self.incumbent_value = None
        self.incumbent_point = None
        self.reported_bound = -math.inf
        self.nodes = 0
        self.tried: set = set()
        self.rng = None if cfg.deterministic else random.Random(cfg.rng_seed)

    # -- bookkeeping -----------------------------------------------------
    def key_bound(self, z: float):
        if self.p.integral_objective:
            return math.ceil(z - BOUND_MARGIN)
        return z - BOUND_MARGIN

    def prunable(self, key) -> bool:
        return self.incumbent_value is not None and key >= self.incumbent_value

    def notify(self, bound=None, incumbent_changed=False):
        improved = incumbent_changed
        if bound is not None:
            if self.incumbent_value is not None:
                bound = min(bound, self.incumbent_value)
            if bound > self.reported_bound:
                self.reported_bound = bound
                improved = True
        if improved and self.observer is not None:
            try:
                self.observer(self.reported_bound, self.incumbent_value)
            except Exception as exc:
                raise _Abort(exc) from exc

    def out_of_time(self) -> bool:
        return self.deadline is not None and time.perf_counter() > self.deadline

    # -- incumbents ------------------------------------------------------
    def try_integers(self, values) -> None:
        """Complete an integer assignment exactly and keep it if it improves."""
        key = tuple(int(v) for v in values)
        if key in self.tried:
            return
        self.tried.add(key)
        p = self.p
        x: list = [0] * p.num_vars
        for j, v in zip(self.int_cols, key):
            x[j] = v
        if self.has_continuous:
            lower = list(p.lower)
            upper = list(p.upper)
            for j, v in zip(self.int_cols, key):
                lower[j] = upper[j] = v
            status, _, point = exact_lp(p, lower, upper)
            if status is not LPStatus.OPTIMAL:
                return
            x = list(point)
        if not p.is_feasible(x):
            return
        z = sum((int(c) * Fraction(v) for c, v in zip(p.objective, x) if c), Fraction(0))
        if self.incumbent_value is None or z < self.incumbent_value:
            self.incumbent_value = _as_number(z)
            self.incumbent_point = tuple(_as_number(Fraction(v)) for v in x)
            if p.integral_objective and z.denominator == 1:
                self.prop.set_cutoff(float(z) - 1.0)
            self.notify(incumbent_changed=True)

    def rounding(self, x, lo, up) -> None:
        vals = np.clip(np.floor(x[self.int_cols] + 0.5), lo[self.int_cols], up[self.int_cols])
        if tuple(vals.astype(int)) in self.tried:
            return
        # cheap screen: propagation with every integer column pinned
        flo, fup = lo.copy(), up.copy()
        flo[self.int_cols] = fup[self.int_cols] = vals
        if not self.prop.run(flo, fup):
            self.tried.add(tuple(vals.astype(int)))
            return
        self.try_integers(vals)

    def reduced_cost_fixing(self, lo, up, T, basis, state, z) -> None:
        """Pin nonbasic integer columns whose move would lift the bound past the incumbent."""
        k = self.p.num_vars
        red = np.abs(T[-1, :k])
        nonbasic = np.ones(k, dtype=bool)
        nonbasic[basis[basis < k]] = False
        span = up - lo
        movable = nonbasic & self.is_int & (span > 0)
        if not movable.any():
            return
        # the LP bound after moving column j to its other bound
        lifted = z + red * span
        if self.p.integral_objective:
            doomed = movable & (np.ceil(lifted - BOUND_MARGIN) >= float(self.incumbent_value))
        else:
            doomed = movable & (lifted - BOUND_MARGIN >= float(self.incumbent_value))
        at_upper = state[:k] == AT_UPPER
        pin_low = doomed & ~at_upper
        pin_high = doomed & at_upper
        up[pin_low] = lo[pin_low]
        lo[pin_high] = up[pin_high]

    def exact_node(self, lo, up):
        """Node relaxation through the exact engine, used if the float one stalls."""
        p = self.p
        lower = [int(lo[j]) if p.integer[j] else p.lower[j] for j in range(p.num_vars)]
        upper = [int(up[j]) if p.integer[j] else p.upper[j] for j in range(p.num_vars)]
        status, _, point = exact_lp(p, lower, upper)
        if status is LPStatus.OPTIMAL:
            return status, np.array([float(v) for v in point])
        if status is LPStatus.INFEASIBLE:
            return status, None
        raise SolverError(f"node relaxation ended with status {status.value}")

    def pick_branch(self, x, frac_cols):
        f = x[frac_cols] - np.floor(x[frac_cols])
        dist = np.abs(f - 0.5)
        ties = frac_cols[dist <= dist.min() + 1e-12]
        if self.rng is not None and ties.size > 1:
            return int(self.rng.choice(list(ties)))
        return int(ties[0])

    # -- main loop -------------------------------------------------------
    def run(self) -> SolveResult:
        p = self.p
        k, N = p.num_vars, self.relax.N
        lo = np.array([-np.inf if v is None else float(v) for v in p.lower])
        up = np.array([np.inf if v is None else float(v) for v in p.upper])
        for j in range(k):
            c = p.objective[j]
            if (c > 0 and not np.isfinite(lo[j])) or (c < 0 and not np.isfinite(up[j])):
                raise SolverError(f"objective is unbounded along free column {p.names[j]}")
        state = np.full(N, AT_LOWER, dtype=np.int8)
        for j in range(k):
            if p.objective[j] < 0 or (p.objective[j] == 0 and not np.isfinite(lo[j]) and np.isfinite(up[j])):
                state[j] = AT_UPPER
            elif not np.isfinite(lo[j]):
                state[j] = FREE
        basis = np.arange(k, N)
        heap: list = []
        seq = 0
        status = None
        heapq.heappush(heap, ((-math.inf, 0, seq), _Node(lo, up, basis, state, 0)))
        try:
            while heap:
                if self.out_of_time():
                    status = SolveStatus.TIME_LIMIT
                    break
                if self.cfg.node_limit is not None and self.nodes >= self.cfg.node_limit:
                    status = SolveStatus.NODE_LIMIT
                    break
                item = heapq.heappop(heap)
                (kb, _, _), node = item
                if self.prunable(kb):
                    continue
                self.nodes += 1
                lo, up = node.lo.copy(), node.up.copy()
                if not self.prop.run(lo, up):
                    self.after_node(heap)
                    continue
                flo, fup = self.relax.full_bounds(lo, up)
                lp, nbasis, nstate, nT, age, x = self.relax.solve(
                    flo, fup, node.basis, node.state, node.T, node.age, self.deadline
                )
                if lp is None:
                    heapq.heappush(heap, item)
                    status = SolveStatus.TIME_LIMIT
                    break
                if lp == _STALLED:
                    lp, x = self.exact_node(lo, up)
                    nbasis, nstate, nT, age = node.basis, node.state, None, 0
                if lp is LPStatus.INFEASIBLE:
                    self.after_node(heap)
                    continue
                z = float(self.relax.c[:k] @ x)
                kz = self.key_bound(z)
                if self.prunable(kz):
                    self.after_node(heap)
                    continue
                if nT is not None and self.incumbent_value is not None:
                    self.reduced_cost_fixing(lo, up, nT, nbasis, nstate, z)
                xi = x[self.int_cols]
                off = np.abs(xi - np.round(xi))
                frac_cols = self.int_cols[off > self.cfg.integrality_tolerance]
                if frac_cols.size == 0:
                    self.try_integers(np.round(xi))
                    self.after_node(heap)
                    continue
                if self.cfg.rounding_heuristic:
                    self.rounding(x, lo, up)
                    if self.prunable(kz):
                        self.after_node(heap)
                        continue
                j = self.pick_branch(x, frac_cols)
                v = x[j]
                down_up = up.copy()
                down_up[j] = math.floor(v)
                up_lo = lo.copy()
                up_lo[j] = math.ceil(v)
                down = _Node(lo, down_up, nbasis, nstate, node.depth + 1, nT, age)
                upn = _Node(up_lo, up, nbasis, nstate, node.depth + 1, nT, age)
                first, second = (upn, down) if v - math.floor(v) >= 0.5 else (down, upn)
                for child in (first, second):
                    seq += 1
                    heapq.heappush(heap, ((kz, -child.depth, seq), child))
                self.after_node(heap)
        except _Abort as exc:
            return self.result(SolveStatus.ABORTED, heap, error=exc.args[0])

        if status is None:
            status = SolveStatus.OPTIMAL if self.incumbent_value is not None else SolveStatus.INFEASIBLE
        return self.result(status, heap)

    def after_node(self, heap) -> None:
        if heap:
            self.notify(bound=heap[0][0][0])
        elif self.incumbent_value is not None:
            self.notify(bound=self.incumbent_value)

    def result(self, status: SolveStatus, heap, error=None) -> SolveResult:
        if status is SolveStatus.OPTIMAL:
            bound = self.incumbent_value
            if bound != self.reported_bound:
                try:
                    self.notify(bound=bound)
                except _Abort as exc:
                    status, error = SolveStatus.ABORTED, exc.args[0]
        elif status is SolveStatus.INFEASIBLE:
            bound = math.inf
        else:
            bound = self.reported_bound
        return SolveResult(
            status=status,
            incumbent_value=self.incumbent_value,
            incumbent_point=self.incumbent_point,
            best_bound=bound,
            nodes_explored=self.nodes,
            elapsed_seconds=time.perf_counter() - self.start,
            lp_iterations=self.relax.iterations,
            error=error,
        )


def solve(p: MilpProblem, cfg: SolveConfig | None = None) -> SolveResult:
    """Minimise ``p`` to proven optimality, or until a limit is reached."""
    return solve_anytime(p, cfg, None)


def solve_anytime(
    p: MilpProblem,
    cfg: SolveConfig | None = None,
    observer: Callable[[object, object], None] | None = None,
) -> SolveResult:
    """As :func:`solve`, calling ``observer(best_bound, incumbent_value)`` on each improvement.

    The bound sequence never decreases and the incumbent sequence never
    increases.  An exception raised by the observer stops the search with
    status ``ABORTED`` and is kept in ``SolveResult.error``.
    """
    validate_problem(p)
    return _Search(p, cfg or SolveConfig(), observer).run()
