"""End-to-end robustness procedures.

Each entry point takes a :class:`~robustmilp.graph.Digraph` and answers one
question with either the MILP route (default) or the exhaustive oracle:

* :func:`r_max`: the largest r for which the graph is r-robust.
* :func:`s_max`: the largest s for which it is (r, s)-robust at a given r.
* :func:`rs_robustness`: the lexicographically largest pair ``(r*, s*)``.
* :func:`f_max`: the largest F with the graph (F+1, F+1)-robust.
* :func:`r_max_bounds`: the cheaper lower and upper bounds on ``r_max``.

:func:`analyze` runs any combination of these and collects a
:class:`RobustnessReport`.  Every certificate is re-checked with exact
integer arithmetic before it is reported.  Two conventions apply: the
trivial graph (``n = 1``) is 1-robust, and ``s_max(0) = n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional

from . import oracle
from .graph import Digraph, VertexSubset, laplacian, min_in_degree, reachability, r_reachable_set
from .model import (
    build_lower_bound_milp,
    build_rmax_milp,
    build_sbarmin_milp,
    build_upper_bound_milp,
    decode_pair,
)
from .oracle import RobustnessPair, ceil_half
from .solver import SolveConfig, SolveResult, SolveStatus, solve


class Method(str, Enum):
    MILP = "milp"
    EXHAUSTIVE = "exhaustive"


class InternalInconsistency(RuntimeError):
    """A solver answer failed its exact re-check.  This should never happen."""


class InexactResult(RuntimeError):
    """A stage hit a limit, so only brackets are known.

    ``partial`` holds whatever was computed, usually a
    :class:`RobustnessReport` or a stage result with brackets.
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class StageSummary:
    """Condensed :class:`~robustmilp.solver.SolveResult` of one solve."""

    name: str
    status: str
    best_bound: Optional[object]
    incumbent: Optional[object]
    nodes: int
    elapsed: float

    @classmethod
    def from_result(cls, name: str, res: SolveResult) -> "StageSummary":
        return cls(name, res.status.value, res.best_bound, res.incumbent_value, res.nodes_explored, res.elapsed_seconds)

    @classmethod
    def skipped(cls, name: str, reason: str) -> "StageSummary":
        return cls(name, reason, None, None, 0, 0.0)

    def to_dict(self) -> dict:
        def num(v):
            if v is None or isinstance(v, int):
                return v
            if isinstance(v, float) and math.isinf(v):
                return "inf" if v > 0 else "-inf"
            return str(v)

        return {
            "stage": self.name,
            "status": self.status,
            "best_bound": num(self.best_bound),
            "incumbent": num(self.incumbent),
            "nodes": self.nodes,
            "elapsed_seconds": round(self.elapsed, 6),
        }


Pair = tuple[VertexSubset, VertexSubset]


@dataclass(frozen=True)
class RmaxResult:
    """``r_max`` or, after a time limit, the bracket ``[low, high]`` holding it."""

    value: Optional[int]
    bracket: tuple[int, int]
    optimal: bool
    certificate: Optional[Pair] = None
    stage: Optional[StageSummary] = None


@dataclass(frozen=True)
class SmaxResult:
    """``s_max(r)``, how it was obtained, and a violating pair when ``s_max < n``.

    ``via`` is one of ``"milp"``, ``"infeasible"`` (the MILP had no
    solution, so ``s_max = n``), ``"convention"`` (``r = 0`` or ``n = 1``),
    ``"shortcut"`` (minimum in-degree at least ``floor(n/2) + r - 1``) or
    ``"exhaustive"``.
    """

    r: int
    value: Optional[int]
    bracket: tuple[int, int]
    optimal: bool
    via: str
    certificate: Optional[Pair] = None
    stage: Optional[StageSummary] = None


@dataclass(frozen=True)
class BoundsResult:
    lower: Optional[int]
    upper: Optional[int]
    optimal: bool
    lower_certificate: Optional[VertexSubset] = None
    upper_certificate: Optional[Pair] = None
    stages: tuple[StageSummary, ...] = ()

    def __iter__(self):
        """Unpacks as ``lower, upper``."""
        return iter((self.lower, self.upper))


@dataclass
class RobustnessReport:
    """Everything :func:`analyze` learned about one graph."""

    n: int
    method: Method
    r_max: Optional[int] = None
    s_max_at_r_max: Optional[int] = None
    f_max: Optional[int] = None
    lower_bound_r: Optional[int] = None
    upper_bound_r: Optional[int] = None
    r_max_bracket: Optional[tuple[int, int]] = None
    s_max_bracket: Optional[tuple[int, int]] = None
    certificates: dict = field(default_factory=dict)
    stages: list = field(default_factory=list)
    exact: bool = True
    notes: list = field(default_factory=list)

    @property
    def rs(self) -> Optional[RobustnessPair]:
        if self.r_max is None or self.s_max_at_r_max is None:
            return None
        return RobustnessPair(self.r_max, self.s_max_at_r_max)


# ---------------------------------------------------------------------------
# certificate checks


def _check_rmax_certificate(D: Digraph, pair: Pair, value: int) -> None:
    S1, S2 = pair
    if not S1.mask or not S2.mask or S1.mask & S2.mask:
        raise InternalInconsistency("r_max certificate is not a pair of nonempty disjoint sets")
    got = max(reachability(D, S1), reachability(D, S2))
    if got != value:
        raise InternalInconsistency(f"r_max certificate has reachability {got}, solver claimed {value}")


def _check_smax_certificate(D: Digraph, pair: Pair, r: int, s_bar: int) -> None:
    """The pair must break (r, s_bar)-robustness, which shows ``s_max(r) < s_bar``."""
    S1, S2 = pair
    if not S1.mask or not S2.mask or S1.mask & S2.mask:
        raise InternalInconsistency("s_max certificate is not a pair of nonempty disjoint sets")
    if oracle.robust_holds(D, S1, S2, r, s_bar):
        raise InternalInconsistency(f"s_max certificate does not violate ({r}, {s_bar})-robustness")


def _ceil_bound(bound) -> int:
    if bound is None or (isinstance(bound, float) and math.isinf(bound) and bound < 0):
        return 0
    return max(0, math.ceil(bound))


# ---------------------------------------------------------------------------
# single quantities


def r_max(D: Digraph, cfg: SolveConfig | None = None, method: Method = Method.MILP) -> RmaxResult:
    """Largest ``r`` for which ``D`` is r-robust.

    With the MILP route, a time limit returns ``optimal=False``. The bracket
    then runs from the rounded-up proven bound to the smaller of the
    incumbent and ``ceil(n/2)``.  The certificate always matches the
    incumbent value recorded in ``stage``.
    """
    n = D.n
    if n == 1:
        return RmaxResult(1, (1, 1), True)
    if Method(method) is Method.EXHAUSTIVE:
        value = oracle.determine_rmax_exhaustive(D)
        pair = oracle.rmax_witness(D)
        _check_rmax_certificate(D, pair, value)
        return RmaxResult(value, (value, value), True, pair)
    problem, meta = build_rmax_milp(laplacian(D))
    res = solve(problem, cfg)
    stage = StageSummary.from_result("r_max", res)
    if res.status is SolveStatus.INFEASIBLE:
        raise InternalInconsistency("the r_max program always has a feasible point for n >= 2")
    pair = None
    if res.incumbent_point is not None:
        pair = decode_pair(meta, res.incumbent_point)
        _check_rmax_certificate(D, pair, int(res.incumbent_value))
    if res.status is SolveStatus.OPTIMAL:
        value = int(res.incumbent_value)
        return RmaxResult(value, (value, value), True, pair, stage)
    # r_max never exceeds ceil(n/2), which caps an early incumbent
    high = ceil_half(n)
    if res.incumbent_value is not None:
        high = min(high, int(res.incumbent_value))
    return RmaxResult(None, (min(_ceil_bound(res.best_bound), high), high), False, pair, stage)


def s_max(D: Digraph, r: int, cfg: SolveConfig | None = None, method: Method = Method.MILP) -> SmaxResult:
    """Largest ``s`` in ``0..n`` with ``D`` (r, s)-robust; ``r`` must lie in ``[0, ceil(n/2)]``.

    ``r = 0`` answers ``n`` without solving.  Otherwise the s-bar program is
    solved and ``s_max = s_bar_min - 1``, where an infeasible program means
    ``s_max = n``.
    """
    n = D.n
    if not 0 <= r <= ceil_half(n):
        raise ValueError(f"r must lie in [0, {ceil_half(n)}], got {r}")
    if r == 0 or n == 1:
        return SmaxResult(r, n, (n, n), True, "convention")
    if Method(method) is Method.EXHAUSTIVE:
        value = oracle.smax_exhaustive(D, r)
        pair = oracle.smax_witness(D, r, value + 1) if value < n else None
        if pair is not None:
            _check_smax_certificate(D, pair, r, value + 1)
        return SmaxResult(r, value, (value, value), True, "exhaustive", pair)
    problem, meta = build_sbarmin_milp(laplacian(D), r)
    res = solve(problem, cfg)
    stage = StageSummary.from_result(f"s_max(r={r})", res)
    if res.status is SolveStatus.INFEASIBLE:
        return SmaxResult(r, n, (n, n), True, "infeasible", None, stage)
    pair = None
    if res.incumbent_point is not None:
        pair = decode_pair(meta, res.incumbent_point)
        _check_smax_certificate(D, pair, r, int(res.incumbent_value))
    if res.status is SolveStatus.OPTIMAL:
        value = int(res.incumbent_value) - 1
        return SmaxResult(r, value, (value, value), True, "milp", pair, stage)
    high = int(res.incumbent_value) - 1 if res.incumbent_value is not None else n
    low = min(max(_ceil_bound(res.best_bound) - 1, 0), high)
    return SmaxResult(r, None, (low, high), False, "milp", pair, stage)


def shortcut_applies(D: Digraph, r: int) -> bool:
    """Whether the minimum in-degree alone guarantees ``s_max(r) = n``."""
    return r >= 1 and min_in_degree(D) >= D.n // 2 + r - 1


def rs_robustness(D: Digraph, cfg: SolveConfig | None = None, method: Method = Method.MILP) -> RobustnessPair:
    """``(r*, s*)``: ``r_max`` and then ``s_max(r_max)``.

    With ``r_max = 0`` the answer is ``(0, n)`` by convention.  The MILP route
    skips the second solve when the minimum in-degree is at least
    ``floor(n/2) + r_max - 1``.  Raises :class:`InexactResult` if a time limit
    leaves either value undetermined.
    """
    report = analyze(D, cfg, method, parts=("rs",))
    if not report.exact:
        raise InexactResult("time limit reached before (r*, s*) was proven", report)
    return report.rs


def f_max(D: Digraph, cfg: SolveConfig | None = None, method: Method = Method.MILP) -> int:
    """Largest ``F`` with ``D`` (F+1, F+1)-robust, or 0.

    Starting from ``r' = r_max``, return ``r' - 1`` at the first ``r'`` with
    ``s_max(r') >= r'``, decrementing ``r'`` otherwise.  Needs exact stage
    values, so any time limit raises :class:`InexactResult`.
    """
    report = analyze(D, cfg, method, parts=("fmax",))
    if report.f_max is None:
        raise InexactResult("F_max needs exact r_max and s_max values", report)
    return report.f_max


def r_max_bounds(D: Digraph, cfg: SolveConfig | None = None, method: Method = Method.MILP) -> BoundsResult:
    """Lower and upper bounds on ``r_max`` from the two n-variable programs."""
    n = D.n
    if n < 2:
        raise ValueError("bounds need n >= 2")
    if Method(method) is Method.EXHAUSTIVE:
        return BoundsResult(oracle.lower_bound_exhaustive(D), oracle.upper_bound_exhaustive(D), True)
    L = laplacian(D)
    stages, values, certs = [], [], []
    for name, builder in (("lower_bound", build_lower_bound_milp), ("upper_bound", build_upper_bound_milp)):
        problem, meta = builder(L)
        res = solve(problem, cfg)
        stages.append(StageSummary.from_result(name, res))
        if res.status is SolveStatus.INFEASIBLE:
            raise InternalInconsistency(f"the {name} program always has a feasible point for n >= 2")
        S = meta.subset(res.incumbent_point, "b") if res.incumbent_point is not None else None
        if S is not None:
            got = reachability(D, S) if name == "lower_bound" else max(reachability(D, S), reachability(D, S.complement()))
            if got != res.incumbent_value:
                raise InternalInconsistency(f"{name} certificate has value {got}, solver claimed {res.incumbent_value}")
        values.append(int(res.incumbent_value) if res.status is SolveStatus.OPTIMAL else None)
        certs.append(S)
    lower_cert = certs[0]
    upper_cert = (certs[1], certs[1].complement()) if certs[1] is not None else None
    optimal = all(v is not None for v in values)
    return BoundsResult(values[0], values[1], optimal, lower_cert, upper_cert, tuple(stages))


# ---------------------------------------------------------------------------
# composite report


def _members(pair) -> list:
    return [list(S.members) for S in pair]


def analyze(
    D: Digraph,
    cfg: SolveConfig | None = None,
    method: Method = Method.MILP,
    parts: Iterable[str] = ("rmax",),
) -> RobustnessReport:
    """Compute the requested ``parts`` (any of ``rmax``, ``rs``, ``fmax``, ``bounds``).

    ``rs`` and ``fmax`` imply ``rmax``.  Stages that hit a limit leave
    brackets in the report and set ``exact=False``; the F_max loop is not
    run on inexact inputs.
    """
    method = Method(method)
    parts = set(parts)
    unknown = parts - {"rmax", "rs", "fmax", "bounds"}
    if unknown:
        raise ValueError(f"unknown report parts {sorted(unknown)}")
    n = D.n
    report = RobustnessReport(n=n, method=method)
    cfg = cfg or SolveConfig()

    if parts & {"rmax", "rs", "fmax"}:
        rr = r_max(D, cfg, method)
        if rr.stage:
            report.stages.append(rr.stage)
        report.r_max = rr.value
        report.r_max_bracket = rr.bracket
        if rr.certificate is not None:
            report.certificates["r_max"] = _members(rr.certificate)
        if n == 1:
            report.notes.append("trivial graph: 1-robust by convention")
        if not rr.optimal:
            report.exact = False

    smax_cache: dict[int, SmaxResult] = {}

    def smax_at(r: int) -> SmaxResult:
        if r not in smax_cache:
            if method is Method.MILP and shortcut_applies(D, r):
                smax_cache[r] = SmaxResult(r, n, (n, n), True, "shortcut")
            else:
                res = s_max(D, r, cfg, method)
                if res.stage:
                    report.stages.append(res.stage)
                smax_cache[r] = res
        return smax_cache[r]

    if "rs" in parts:
        if report.r_max is None:
            report.notes.append("s_max skipped: r_max not proven")
        else:
            sr = smax_at(report.r_max)
            report.s_max_at_r_max = sr.value
            report.s_max_bracket = sr.bracket
            if sr.via == "shortcut":
                report.notes.append(f"s_max = n from in-degree shortcut at r = {sr.r}")
                report.stages.append(StageSummary.skipped(f"s_max(r={sr.r})", "shortcut"))
            if sr.via == "convention":
                report.notes.append("s_max = n by convention (r_max = 0 or n = 1)")
            if sr.certificate is not None:
                report.certificates["s_max"] = _members(sr.certificate)
            if not sr.optimal:
                report.exact = False

    if "fmax" in parts:
        if report.r_max is None:
            report.notes.append("F_max refused: r_max not proven")
            report.exact = False
        else:
            fm: Optional[int] = 0
            rp = report.r_max if n > 1 else 0
            while rp > 0:
                sr = smax_at(rp)
                if not sr.optimal:
                    fm = None
                    report.exact = False
                    report.notes.append(f"F_max refused: s_max({rp}) not proven")
                    break
                if sr.value >= rp:
                    fm = rp - 1
                    break
                rp -= 1
            report.f_max = fm

    if "bounds" in parts:
        if n < 2:
            report.notes.append("bounds skipped: n < 2")
        else:
            br = r_max_bounds(D, cfg, method)
            report.stages.extend(br.stages)
            report.lower_bound_r, report.upper_bound_r = br.lower, br.upper
            if br.lower_certificate is not None:
                report.certificates["lower_bound"] = [list(br.lower_certificate.members)]
            if br.upper_certificate is not None:
                report.certificates["upper_bound"] = _members(br.upper_certificate)
            if not br.optimal:
                report.exact = False
            if report.r_max is not None and br.optimal:
                if not br.lower <= report.r_max <= br.upper:
                    raise InternalInconsistency(
                        f"bounds ({br.lower}, {br.upper}) do not bracket r_max = {report.r_max}"
                    )
    return report


__all__ = [
    "BoundsResult",
    "InexactResult",
    "InternalInconsistency",
    "Method",
    "RmaxResult",
    "RobustnessReport",
    "SmaxResult",
    "StageSummary",
    "analyze",
    "f_max",
    "r_max",
    "r_max_bounds",
    "rs_robustness",
    "s_max",
    "shortcut_applies",
]
