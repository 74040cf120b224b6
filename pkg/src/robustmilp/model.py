"""Mixed integer linear programs for robustness, built from the graph Laplacian.

Four models are provided:

``build_rmax_milp``
    min ``t`` over two disjoint nonempty indicator vectors with
    ``L b1 <= t`` and ``L b2 <= t``; the optimum is ``r_max``.
``build_sbarmin_milp``
    min ``sbar`` over indicator vectors ``b1, b2`` and reachable-vertex
    indicators ``y1, y2``; the optimum is the smallest ``s`` for which the
    graph is *not* (r, s)-robust, and infeasibility means that value is n+1.
``build_lower_bound_milp`` / ``build_upper_bound_milp``
    single-vector relaxations whose optima bracket ``r_max``.

Every coefficient is an exact integer.  Columns are ordered continuous or
general-integer variables first, then ``b1``, ``b2``, ``y1``, ``y2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

from .graph import VertexSubset, inverse_indicator

SENSES = ("<=", ">=", "=")


class ModelError(ValueError):
    """Raised for malformed problems or invalid builder arguments."""


@dataclass(frozen=True, eq=False)
class MilpProblem:
    """``min objective @ x`` subject to ``A x (senses) rhs`` and variable bounds.

    ``lower[i]``/``upper[i]`` are ints, or ``None`` for an infinite bound.
    ``integer[i]`` marks integrality; an integer column with bounds ``[0, 1]``
    is a binary.  ``integral_objective`` promises that every integer-feasible
    optimum has an integer objective value, which lets a branch-and-bound
    round its bounds up.
    """

    A: np.ndarray
    senses: tuple[str, ...]
    rhs: np.ndarray
    objective: np.ndarray
    lower: tuple[int | None, ...]
    upper: tuple[int | None, ...]
    integer: tuple[bool, ...]
    names: tuple[str, ...]
    integral_objective: bool = False

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        A = self.A
        if A.ndim != 2:
            raise ModelError("constraint matrix must be 2-D")
        m, k = A.shape
        if A.dtype.kind not in "iu":
            raise ModelError("constraint coefficients must be integers")
        if self.rhs.shape != (m,) or len(self.senses) != m:
            raise ModelError(f"{m} rows but {len(self.senses)} senses and rhs of shape {self.rhs.shape}")
        if self.objective.shape != (k,):
            raise ModelError(f"objective has shape {self.objective.shape}, expected ({k},)")
        for arr in (self.rhs, self.objective):
            if arr.dtype.kind not in "iu":
                raise ModelError("objective and right-hand side must be integers")
        for seq, what in ((self.lower, "lower"), (self.upper, "upper"), (self.integer, "integer"), (self.names, "names")):
            if len(seq) != k:
                raise ModelError(f"{what} has {len(seq)} entries for {k} variables")
        bad = [s for s in self.senses if s not in SENSES]
        if bad:
            raise ModelError(f"unknown constraint senses {sorted(set(bad))}")
        for i, (lo, hi) in enumerate(zip(self.lower, self.upper)):
            for v in (lo, hi):
                if v is not None and not isinstance(v, (int, np.integer)):
                    raise ModelError(f"bound {v!r} on {self.names[i]} is not an integer")
            if lo is not None and hi is not None and lo > hi:
                raise ModelError(f"empty bound range on {self.names[i]}")

    @property
    def num_vars(self) -> int:
        return self.A.shape[1]

    @property
    def num_rows(self) -> int:
        return self.A.shape[0]

    def is_binary(self, i: int) -> bool:
        return self.integer[i] and self.lower[i] == 0 and self.upper[i] == 1

    @property
    def num_binary(self) -> int:
        return sum(self.is_binary(i) for i in range(self.num_vars))

    @property
    def num_general_integer(self) -> int:
        return sum(self.integer) - self.num_binary

    @property
    def num_continuous(self) -> int:
        return self.num_vars - sum(self.integer)

    def row_activity(self, x) -> np.ndarray:
        return self.A.astype(object) @ np.asarray(x, dtype=object)

    def is_feasible(self, x) -> bool:
        """Exact check of every row, bound and integrality requirement."""
        x = list(x)
        if len(x) != self.num_vars:
            return False
        for i, v in enumerate(x):
            if self.lower[i] is not None and v < self.lower[i]:
                return False
            if self.upper[i] is not None and v > self.upper[i]:
                return False
            if self.integer[i] and v != int(v):
                return False
        act = self.row_activity(x)
        for a, sense, b in zip(act, self.senses, self.rhs.tolist()):
            if (sense == "<=" and a > b) or (sense == ">=" and a < b) or (sense == "=" and a != b):
                return False
        return True

    def objective_value(self, x):
        return sum(int(c) * v for c, v in zip(self.objective, x) if c)


class ProblemBuilder:
    """Accumulates named variables and sparse rows, then freezes a :class:`MilpProblem`."""

    def __init__(self):
        self.names: list[str] = []
        self.lower: list[int | None] = []
        self.upper: list[int | None] = []
        self.integer: list[bool] = []
        self.obj: dict[int, int] = {}
        self.rows: list[dict[int, int]] = []
        self.senses: list[str] = []
        self.rhs: list[int] = []

    def add_var(self, name: str, lower=0, upper=None, integer=False, cost=0) -> int:
        self.names.append(name)
        self.lower.append(lower)
        self.upper.append(upper)
        self.integer.append(integer)
        idx = len(self.names) - 1
        if cost:
            self.obj[idx] = cost
        return idx

    def add_vars(self, prefix: str, count: int, **kw) -> slice:
        start = len(self.names)
        for j in range(count):
            self.add_var(f"{prefix}_{j + 1}", **kw)
        return slice(start, start + count)

    def add_row(self, coefs: Mapping[int, int], sense: str, rhs: int) -> None:
        if sense not in SENSES:
            raise ModelError(f"unknown sense {sense!r}")
        self.rows.append({i: int(c) for i, c in coefs.items() if c})
        self.senses.append(sense)
        self.rhs.append(int(rhs))

    def build(self, integral_objective: bool = False) -> MilpProblem:
        k = len(self.names)
        A = np.zeros((len(self.rows), k), dtype=np.int64)
        for r, row in enumerate(self.rows):
            for i, c in row.items():
                if not 0 <= i < k:
                    raise ModelError(f"row {r} references undeclared variable {i}")
                A[r, i] = c
        obj = np.zeros(k, dtype=np.int64)
        for i, c in self.obj.items():
            obj[i] = c
        return MilpProblem(
            A=A,
            senses=tuple(self.senses),
            rhs=np.array(self.rhs, dtype=np.int64),
            objective=obj,
            lower=tuple(self.lower),
            upper=tuple(self.upper),
            integer=tuple(self.integer),
            names=tuple(self.names),
            integral_objective=integral_objective,
        )


class ModelKind(str, Enum):
    RMAX = "rmax"
    SBARMIN = "sbarmin"
    LOWER_BOUND = "lower_bound"
    UPPER_BOUND = "upper_bound"


@dataclass(frozen=True)
class ModelMeta:
    """Which columns hold which named vector, for decoding solver points."""

    kind: ModelKind
    n: int
    slices: Mapping[str, slice]
    r: int | None = None
    big_m: int | None = None
    extra: Mapping[str, int] = field(default_factory=dict)

    def block(self, point: Sequence, name: str) -> np.ndarray:
        return np.array([int(v) for v in list(point)[self.slices[name]]], dtype=np.int64)

    def subset(self, point: Sequence, name: str) -> VertexSubset:
        return inverse_indicator(self.block(point, name))


def _as_laplacian(L) -> np.ndarray:
    L = np.asarray(L)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise ModelError("Laplacian must be square")
    if L.dtype.kind not in "iu":
        raise ModelError("Laplacian must have integer entries")
    L = L.astype(np.int64)
    off = L[~np.eye(L.shape[0], dtype=bool)]
    if not np.isin(off, (-1, 0)).all() or (L.sum(axis=1) != 0).any():
        raise ModelError("not a digraph Laplacian: off-diagonal entries must be 0 or -1 and rows must sum to zero")
    return L


def _check_n(n: int) -> None:
    if n < 2:
        raise ModelError("the robustness models need n >= 2")


def _cardinality_rows(pb: ProblemBuilder, block: slice, low: int, high: int) -> None:
    # two one-sided rows per range, never merged
    ones = {i: 1 for i in range(block.start, block.stop)}
    pb.add_row(ones, ">=", low)
    pb.add_row(ones, "<=", high)


def _laplacian_rows(pb, L, block: slice, t: int | None, sign: int = 1, extra=None, rhs=0):
    """Rows ``sign * L_j b - t (+ extra_j) <= rhs`` for every vertex ``j``."""
    n = L.shape[0]
    for j in range(n):
        row = {block.start + i: sign * int(L[j, i]) for i in range(n)}
        if t is not None:
            row[t] = -1
        if extra is not None:
            col, coef = extra(j)
            row[col] = coef
        pb.add_row(row, "<=", rhs)


def build_rmax_milp(L) -> tuple[MilpProblem, ModelMeta]:
    """MILP whose optimal value is the maximum r for which the graph is r-robust.

    Variables ``t >= 0`` and binaries ``b1, b2``; ``3n + 4`` rows.
    """
    L = _as_laplacian(L)
    n = L.shape[0]
    _check_n(n)
    pb = ProblemBuilder()
    t = pb.add_var("t", lower=0, upper=None, cost=1)
    b1 = pb.add_vars("b1", n, lower=0, upper=1, integer=True)
    b2 = pb.add_vars("b2", n, lower=0, upper=1, integer=True)
    _laplacian_rows(pb, L, b1, t)
    _laplacian_rows(pb, L, b2, t)
    for j in range(n):
        pb.add_row({b1.start + j: 1, b2.start + j: 1}, "<=", 1)
    _cardinality_rows(pb, b1, 1, n - 1)
    _cardinality_rows(pb, b2, 1, n - 1)
    meta = ModelMeta(ModelKind.RMAX, n, {"t": slice(t, t + 1), "b1": b1, "b2": b2})
    return pb.build(integral_objective=True), meta


def build_sbarmin_milp(L, r: int, tight_big_m: bool = False) -> tuple[MilpProblem, ModelMeta]:
    """MILP for the smallest ``s`` at which the graph fails to be (r, s)-robust.

    ``sbar`` is a general integer in ``[1, n + 1]``; ``b1, b2, y1, y2`` are
    binary.  ``y`` flags vertices of the matching set with at least ``r``
    outside in-neighbours through ``L b - M y <= (r - 1)``.  ``M`` is ``n``
    unless ``tight_big_m`` asks for the maximum in-degree instead.  The
    problem is infeasible exactly when the answer is ``n + 1``.
    """
    L = _as_laplacian(L)
    n = L.shape[0]
    _check_n(n)
    if r < 1:
        raise ModelError("r must be at least 1; r = 0 needs no solve")
    big_m = int(np.diag(L).max()) if tight_big_m else n
    pb = ProblemBuilder()
    sbar = pb.add_var("sbar", lower=1, upper=n + 1, integer=True, cost=1)
    b1 = pb.add_vars("b1", n, lower=0, upper=1, integer=True)
    b2 = pb.add_vars("b2", n, lower=0, upper=1, integer=True)
    y1 = pb.add_vars("y1", n, lower=0, upper=1, integer=True)
    y2 = pb.add_vars("y2", n, lower=0, upper=1, integer=True)

    def ones(*blocks, coef=1):
        return {i: coef for blk in blocks for i in range(blk.start, blk.stop)}

    pb.add_row({**ones(y1), **ones(b1, coef=-1)}, "<=", -1)
    pb.add_row({**ones(y2), **ones(b2, coef=-1)}, "<=", -1)
    pb.add_row({**ones(y1, y2), sbar: -1}, "<=", -1)
    _laplacian_rows(pb, L, b1, None, extra=lambda j: (y1.start + j, -big_m), rhs=r - 1)
    _laplacian_rows(pb, L, b2, None, extra=lambda j: (y2.start + j, -big_m), rhs=r - 1)
    for j in range(n):
        pb.add_row({b1.start + j: 1, b2.start + j: 1}, "<=", 1)
    _cardinality_rows(pb, b1, 1, n - 1)
    _cardinality_rows(pb, b2, 1, n - 1)
    meta = ModelMeta(
        ModelKind.SBARMIN,
        n,
        {"sbar": slice(sbar, sbar + 1), "b1": b1, "b2": b2, "y1": y1, "y2": y2},
        r=r,
        big_m=big_m,
    )
    return pb.build(integral_objective=True), meta


def build_lower_bound_milp(L) -> tuple[MilpProblem, ModelMeta]:
    """min ``t`` with ``L b <= t`` over nonempty sets of at most ``floor(n/2)`` vertices."""
    L = _as_laplacian(L)
    n = L.shape[0]
    _check_n(n)
    pb = ProblemBuilder()
    t = pb.add_var("t", lower=0, upper=None, cost=1)
    b = pb.add_vars("b", n, lower=0, upper=1, integer=True)
    _laplacian_rows(pb, L, b, t)
    _cardinality_rows(pb, b, 1, n // 2)
    meta = ModelMeta(ModelKind.LOWER_BOUND, n, {"t": slice(t, t + 1), "b": b})
    return pb.build(integral_objective=True), meta


def build_upper_bound_milp(L) -> tuple[MilpProblem, ModelMeta]:
    """min ``t`` with ``-t <= L b <= t`` over proper nonempty vertex sets."""
    L = _as_laplacian(L)
    n = L.shape[0]
    _check_n(n)
    pb = ProblemBuilder()
    t = pb.add_var("t", lower=0, upper=None, cost=1)
    b = pb.add_vars("b", n, lower=0, upper=1, integer=True)
    _laplacian_rows(pb, L, b, t)
    _laplacian_rows(pb, L, b, t, sign=-1)
    _cardinality_rows(pb, b, 1, n - 1)
    meta = ModelMeta(ModelKind.UPPER_BOUND, n, {"t": slice(t, t + 1), "b": b})
    return pb.build(integral_objective=True), meta


def decode_pair(meta: ModelMeta, point) -> tuple[VertexSubset, VertexSubset]:
    """The vertex pair ``(S1, S2)`` encoded in an rmax or sbarmin point."""
    return meta.subset(point, "b1"), meta.subset(point, "b2")


# ---------------------------------------------------------------------------
# LP text export


def _term(coef: int, name: str, first: bool) -> str:
    sign = "-" if coef < 0 else ("" if first else "+")
    mag = abs(coef)
    body = name if mag == 1 else f"{mag} {name}"
    return f"{sign} {body}" if sign else body


def _linear(coefs, names) -> str:
    parts = []
    for i, c in enumerate(coefs):
        c = int(c)
        if c:
            parts.append(_term(c, names[i], not parts))
    return " ".join(parts) if parts else "0"


def to_lp_format(p: MilpProblem, title: str | None = None) -> str:
    """Render ``p`` in CPLEX LP text format with plain integer coefficients."""
    names = p.names
    out = []
    if title:
        out.append(f"\\ {title}")
    out.append("Minimize")
    out.append(f" obj: {_linear(p.objective, names)}")
    out.append("Subject To")
    lp_sense = {"<=": "<=", ">=": ">=", "=": "="}
    for r in range(p.num_rows):
        out.append(f" c{r + 1}: {_linear(p.A[r], names)} {lp_sense[p.senses[r]]} {int(p.rhs[r])}")
    out.append("Bounds")
    for i, nm in enumerate(names):
        lo, hi = p.lower[i], p.upper[i]
        if p.is_binary(i):
            continue
        lo_s = "-inf" if lo is None else str(int(lo))
        if hi is None:
            out.append(f" {nm} >= {lo_s}" if lo is not None else f" {nm} free")
        else:
            out.append(f" {lo_s} <= {nm} <= {int(hi)}")
    bins = [nm for i, nm in enumerate(names) if p.is_binary(i)]
    gens = [nm for i, nm in enumerate(names) if p.integer[i] and not p.is_binary(i)]
    if bins:
        out.append("Binaries")
        out.append(" " + " ".join(bins))
    if gens:
        out.append("Generals")
        out.append(" " + " ".join(gens))
    out.append("End")
    return "\n".join(out) + "\n"
