import pytest
from hypothesis import given, settings

from _support import CYCLE3, EDGELESS4, FIG2_LIKE, K3, K4, K5, K6, SPANNING_TREE, TWO_CYCLES, digraphs
from robustmilp import api, oracle
from robustmilp.api import InexactResult, Method
from robustmilp.generators import GenSpec, complete_digraph, generate
from robustmilp.graph import from_edge_list, reachability
from robustmilp.oracle import ceil_half, robust_holds
from robustmilp.solver import SolveConfig

METHODS = [Method.MILP, Method.EXHAUSTIVE]
DENSE20 = generate(GenSpec("digraph", 20, p=0.8, seed=4))


@pytest.mark.parametrize("method", METHODS)
@pytest.mark.parametrize("D, expected", [(SPANNING_TREE, 1), (K5, 3), (TWO_CYCLES, 0), (CYCLE3, 1)])
def test_r_max_examples(D, expected, method):
    res = api.r_max(D, method=method)
    assert res.optimal and res.value == expected and res.bracket == (expected, expected)
    S1, S2 = res.certificate
    assert max(reachability(D, S1), reachability(D, S2)) == expected


def test_r_max_trivial_graph():
    assert api.r_max(from_edge_list(1, [])).value == 1


@pytest.mark.parametrize("method", METHODS)
def test_s_max_examples(method):
    assert api.s_max(CYCLE3, 0, method=method).value == 3
    res = api.s_max(K3, 2, method=method)
    assert res.value == 3
    if method is Method.MILP:
        assert res.via == "infeasible"


@pytest.mark.parametrize("method", METHODS)
def test_s_max_three_cycle_r1_is_three(method):
    assert api.s_max(CYCLE3, 1, method=method).value == 3


@pytest.mark.parametrize("r", [-1, 3])
def test_s_max_rejects_r_out_of_range(r):
    with pytest.raises(ValueError):
        api.s_max(K4, r)


def test_s_max_certificate_breaks_next_level():
    D = generate(GenSpec("digraph", 7, p=0.5, seed=9))
    for r in range(1, ceil_half(7) + 1):
        res = api.s_max(D, r)
        assert res.value == oracle.smax_exhaustive(D, r)
        if res.certificate is not None:
            S1, S2 = res.certificate
            assert not robust_holds(D, S1, S2, r, res.value + 1)


@pytest.mark.parametrize("method", METHODS)
@pytest.mark.parametrize("D, expected", [(K6, (3, 6)), (SPANNING_TREE, (1, 1)), (EDGELESS4, (0, 4)), (FIG2_LIKE, (2, 1))])
def test_rs_robustness_examples(D, expected, method):
    assert api.rs_robustness(D, method=method) == expected


def test_shortcut_fires_on_complete_graph():
    assert api.shortcut_applies(K6, 3)
    report = api.analyze(K6, parts=("rs",))
    assert report.s_max_at_r_max == 6
    assert any("shortcut" in note for note in report.notes)
    assert [s.status for s in report.stages] == ["optimal", "shortcut"]


@settings(max_examples=40, deadline=None)
@given(digraphs(min_n=2, max_n=9))
def test_shortcut_is_sound(D):
    for r in range(1, ceil_half(D.n) + 1):
        if api.shortcut_applies(D, r):
            assert oracle.smax_exhaustive(D, r) == D.n


def test_zero_r_max_is_flagged_as_convention():
    report = api.analyze(TWO_CYCLES, parts=("rs",))
    assert (report.r_max, report.s_max_at_r_max) == (0, 6)
    assert any("convention" in note for note in report.notes)


@pytest.mark.parametrize("method", METHODS)
@pytest.mark.parametrize("D, expected", [(K3, 1), (TWO_CYCLES, 0), (FIG2_LIKE, 0), (K5, 2), (CYCLE3, 0)])
def test_f_max_examples(D, expected, method):
    assert api.f_max(D, method=method) == expected


@settings(max_examples=30, deadline=None)
@given(digraphs(min_n=2, max_n=7))
def test_f_max_membership(D):
    f = api.f_max(D)
    theta = oracle.theta(D)
    assert f == oracle.fmax_exhaustive(D)
    if f > 0 or (1, 1) in theta:
        assert (f + 1, f + 1) in theta
    assert (f + 2, f + 2) not in theta


@pytest.mark.parametrize("method", METHODS)
def test_bounds_examples(method):
    assert tuple(api.r_max_bounds(K4, method=method)) == (2, 2)
    assert tuple(api.r_max_bounds(EDGELESS4, method=method)) == (0, 0)


def test_bounds_need_two_vertices():
    with pytest.raises(ValueError):
        api.r_max_bounds(from_edge_list(1, []))


def test_bounds_bracket_r_max_on_random_n10():
    for seed in range(100):
        D = generate(GenSpec("digraph", 10, p=[0.3, 0.5, 0.8][seed % 3], seed=seed))
        b = api.r_max_bounds(D)
        assert b.optimal
        assert b.lower <= api.r_max(D).value <= b.upper
        assert reachability(D, b.lower_certificate) == b.lower
        S, T = b.upper_certificate
        assert max(reachability(D, S), reachability(D, T)) == b.upper


@settings(max_examples=40, deadline=None)
@given(digraphs(min_n=2, max_n=8))
def test_milp_and_oracle_agree(D):
    assert api.rs_robustness(D) == oracle.determine_robustness(D)
    assert api.r_max(D).value == oracle.determine_rmax_exhaustive(D)


@settings(max_examples=20, deadline=None)
@given(digraphs(min_n=2, max_n=7))
def test_report_invariants(D):
    for method in METHODS:
        rep = api.analyze(D, method=method, parts=("rmax", "rs", "fmax", "bounds"))
        assert rep.exact
        assert rep.lower_bound_r <= rep.r_max <= rep.upper_bound_r
        assert 0 <= rep.r_max <= ceil_half(D.n)
        if rep.r_max == 0:
            assert rep.s_max_at_r_max == D.n
        else:
            assert 1 <= rep.s_max_at_r_max <= D.n
        assert rep.f_max >= 0


def test_analyze_rejects_unknown_part():
    with pytest.raises(ValueError):
        api.analyze(K3, parts=("rmax", "spectrum"))


# -- time limits -----------------------------------------------------------------------


def test_time_limit_gives_bracket():
    res = api.r_max(DENSE20, SolveConfig(time_limit=0.05))
    assert not res.optimal and res.value is None
    lo, hi = res.bracket
    assert 0 <= lo <= hi <= ceil_half(20)
    if res.certificate is not None:
        S1, S2 = res.certificate
        assert max(reachability(DENSE20, S1), reachability(DENSE20, S2)) == res.stage.incumbent >= hi


def test_f_max_refuses_inexact_stages():
    with pytest.raises(InexactResult) as info:
        api.f_max(DENSE20, SolveConfig(time_limit=0.05))
    assert info.value.partial.f_max is None
    assert not info.value.partial.exact


def test_rs_robustness_refuses_inexact_stages():
    with pytest.raises(InexactResult):
        api.rs_robustness(DENSE20, SolveConfig(time_limit=0.05))


def test_complete_graphs_give_n_via_infeasibility():
    for n in range(3, 7):
        res = api.s_max(complete_digraph(n), ceil_half(n))
        assert res.via == "infeasible" and res.value == n
