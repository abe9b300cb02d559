"""Test kit: enumeration, oracle, generator, reduction gadgets."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smbribe.core import (
    AccDelete,
    Add,
    CapExceededError,
    PresenceMask,
    Swap,
    UNBOUNDED,
    ValidationError,
    apply_actions,
    make_instance,
    matching_from_pairs,
    serialize_instance,
)
from smbribe.engine import gale_shapley, is_stable
from smbribe.core import Side
from smbribe.solvers import (
    ActionKind,
    Goal,
    SolveRequest,
    Status,
    const_ex_bruteforce,
    exact_ex_delete_fpt,
    exact_uni_bruteforce,
    exact_uni_reorder_xp,
)
from smbribe.testkit import (
    SetSystem,
    SimpleGraph,
    enumerate_stable,
    gadget_clique_accdel_reorder,
    gadget_clique_add,
    gadget_dummy_block,
    gadget_hs_add,
    gadget_hs_reorder,
    gadget_is_delete,
    generate_instance,
    has_clique,
    has_hitting_set,
    has_independent_set,
    oracle_min_manipulation,
)


def full(inst):
    return PresenceMask.initial(inst)


# ---------------------------------------------------------------------------
# enumerate_stable


def test_enumerate_smallest():
    one = make_instance(["m1"], ["w1"], {"m1": ("w1",), "w1": ("m1",)})
    ms = enumerate_stable(one, full(one))
    assert len(ms) == 1
    assert ms[0].pairs == frozenset({("m1", "w1")})


def test_enumerate_frozen_pair_sets(ex3):
    ms = enumerate_stable(ex3, full(ex3))
    assert {m.pairs for m in ms} == {
        frozenset({("m1", "w1"), ("m2", "w3"), ("m3", "w2")}),
        frozenset({("m1", "w1"), ("m2", "w2"), ("m3", "w3")}),
    }


def test_enumerate_contains_both_extremes(rot22):
    ms = enumerate_stable(rot22, full(rot22))
    assert len(ms) == 2
    assert gale_shapley(rot22, full(rot22)) in ms
    assert gale_shapley(rot22, full(rot22), Side.WOMAN) in ms


def test_enumerate_cap(ex3):
    with pytest.raises(CapExceededError):
        enumerate_stable(ex3, full(ex3), cap=5)
    assert enumerate_stable(ex3, full(ex3), cap=6)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 4), st.integers(0, 10_000))
def test_enumerate_results_are_stable_and_include_gs(n, seed):
    inst = generate_instance(n, seed)
    ms = enumerate_stable(inst, full(inst))
    assert all(is_stable(inst, full(inst), m) for m in ms)
    assert len({m.pairs for m in ms}) == len(ms)
    assert gale_shapley(inst, full(inst)) in ms


# ---------------------------------------------------------------------------
# oracle


def test_oracle_const_ex_frozen(ex3):
    grid = [
        (ActionKind.DELETE, 1, (Status.FEASIBLE, 1)),
        (ActionKind.REORDER, 2, (Status.FEASIBLE, 1)),
        (ActionKind.SWAP, 2, (Status.FEASIBLE, 2)),
        (ActionKind.ACC_DELETE, 2, (Status.FEASIBLE, 1)),
    ]
    for action, budget, want in grid:
        res = oracle_min_manipulation(
            SolveRequest(ex3, Goal.CONST_EX, action, budget, ("m3", "w1"))
        )
        assert (res.status, res.cost) == want


def test_oracle_reports_no_cost_when_budget_blocks(ex3):
    res = oracle_min_manipulation(
        SolveRequest(ex3, Goal.CONST_EX, ActionKind.DELETE, 0, ("m3", "w1"))
    )
    assert (res.status, res.cost) == (Status.INFEASIBLE_WITHIN_BUDGET, None)


def test_oracle_exact_ex_frozen(ex5, ex5_mstar):
    grid = [
        (ActionKind.ACC_DELETE, UNBOUNDED, 3),
        (ActionKind.SWAP, 3, 3),
        (ActionKind.REORDER, 2, 2),
        (ActionKind.DELETE, UNBOUNDED, 2),
    ]
    for action, budget, cost in grid:
        res = oracle_min_manipulation(
            SolveRequest(ex5, Goal.EXACT_EX, action, budget, ex5_mstar)
        )
        assert (res.status, res.cost) == (Status.FEASIBLE, cost)


def test_oracle_exact_uni_frozen(rot22, rot22_manopt):
    for action, budget in [
        (ActionKind.ACC_DELETE, UNBOUNDED),
        (ActionKind.REORDER, 2),
        (ActionKind.DELETE, 2),
        (ActionKind.SWAP, 2),
    ]:
        res = oracle_min_manipulation(
            SolveRequest(rot22, Goal.EXACT_UNI, action, budget, rot22_manopt)
        )
        assert (res.status, res.cost) == (Status.FEASIBLE, 1)


def test_oracle_dest_ex_frozen(mutual):
    res = oracle_min_manipulation(
        SolveRequest(mutual, Goal.DEST_EX, ActionKind.DELETE, 1, ("m1", "w1"))
    )
    assert (res.status, res.cost) == (Status.FEASIBLE, 1)
    res = oracle_min_manipulation(
        SolveRequest(mutual, Goal.DEST_EX, ActionKind.DELETE, 0, ("m1", "w1"))
    )
    assert (res.status, res.cost) == (Status.INFEASIBLE_WITHIN_BUDGET, None)


def test_oracle_add_frozen(add1, add_ia, add_mstar):
    res = oracle_min_manipulation(
        SolveRequest(add1, Goal.EXACT_EX, ActionKind.ADD, UNBOUNDED, add_mstar)
    )
    assert (res.status, res.cost, res.actions) == (Status.FEASIBLE, 1, (Add("w2"),))
    res = oracle_min_manipulation(
        SolveRequest(add_ia, Goal.EXACT_EX, ActionKind.ADD, UNBOUNDED, add_mstar)
    )
    assert res.status is Status.INFEASIBLE_ALWAYS


def test_oracle_never_acceptable_pair(part):
    res = oracle_min_manipulation(
        SolveRequest(part, Goal.CONST_EX, ActionKind.SWAP, 5, ("m1", "w2"))
    )
    assert res.status is Status.INFEASIBLE_ALWAYS


def test_oracle_state_cap(ex3):
    with pytest.raises(CapExceededError):
        oracle_min_manipulation(
            SolveRequest(ex3, Goal.CONST_EX, ActionKind.SWAP, 2, ("m3", "w1")),
            state_cap=1,
        )


def test_oracle_agent_cap():
    inst = generate_instance(9, 0)  # 18 agents exceed the default cap of 16
    target = ("m1", gale_shapley(inst, full(inst)).partner("m1"))
    req = SolveRequest(inst, Goal.CONST_EX, ActionKind.DELETE, 0, target)
    with pytest.raises(CapExceededError):
        oracle_min_manipulation(req)
    res = oracle_min_manipulation(req, agent_cap=18)
    assert (res.status, res.cost) == (Status.FEASIBLE, 0)


# ---------------------------------------------------------------------------
# generator


def test_generate_deterministic():
    assert generate_instance(5, 7) == generate_instance(5, 7)
    assert serialize_instance(generate_instance(5, 7)) == serialize_instance(
        generate_instance(5, 7)
    )
    assert serialize_instance(generate_instance(5, 8)) != serialize_instance(
        generate_instance(5, 7)
    )


def test_generate_addable_counts():
    g = generate_instance(8, 3, addable_frac=0.25)
    assert (len(g.addable_men), len(g.addable_women)) == (2, 2)


def test_generate_validation():
    with pytest.raises(ValidationError):
        generate_instance(0, 1)
    with pytest.raises(ValidationError):
        generate_instance(3, 1, addable_frac=1.5)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 8), st.integers(0, 10_000))
def test_generate_complete_lists(n, seed):
    inst = generate_instance(n, seed)
    assert len(inst.men) == len(inst.women) == n
    for m in inst.men:
        assert sorted(inst.prefs[m]) == sorted(inst.women)
    for w in inst.women:
        assert sorted(inst.prefs[w]) == sorted(inst.men)


# ---------------------------------------------------------------------------
# graph and set-system inputs


def test_simple_graph_validation():
    with pytest.raises(ValidationError):
        SimpleGraph(-1)
    with pytest.raises(ValidationError):
        SimpleGraph(2, frozenset({(0, 0)}))
    with pytest.raises(ValidationError):
        SimpleGraph(2, frozenset({(1, 0)}))
    with pytest.raises(ValidationError):
        SimpleGraph(2, frozenset({(0, 2)}))


def test_simple_graph_helpers():
    g = SimpleGraph.from_edges(3, [(2, 0), (1, 0)])
    assert g.edge_list() == ((0, 1), (0, 2))
    assert g.neighbors(0) == (1, 2)
    assert g.incident_edges(1) == ((0, 1),)


def test_set_system_validation():
    with pytest.raises(ValidationError):
        SetSystem(2, (frozenset(),))
    with pytest.raises(ValidationError):
        SetSystem(2, (frozenset({3}),))
    SetSystem(3, (frozenset({1, 2, 3}), frozenset({1, 2})))


def test_np_witness_helpers():
    path = SimpleGraph.from_edges(3, [(0, 1), (1, 2)])
    tri = SimpleGraph.from_edges(3, [(0, 1), (0, 2), (1, 2)])
    z1 = SetSystem(1, (frozenset({1}),))
    assert (has_clique(path, 2), has_clique(path, 3)) == (True, False)
    assert (has_independent_set(tri, 1), has_independent_set(tri, 2)) == (True, False)
    assert (has_hitting_set(z1, 0), has_hitting_set(z1, 1)) == (False, True)


# ---------------------------------------------------------------------------
# clique gadget, additions


def test_clique_add_shape_and_forward():
    tri = SimpleGraph.from_edges(3, [(0, 1), (0, 2), (1, 2)])
    out = gadget_clique_add(tri, 2)
    assert len(out.instance.men) == 13
    assert out.budget == 3
    assert out.target_pair == ("mStar", "wStar")
    assert (len(out.instance.addable_men), len(out.instance.addable_women)) == (6, 0)

    adds = (Add("mVp_1"), Add("mVp_2"), Add("mEp_1_2"))
    inst2, mask2 = apply_actions(out.instance, full(out.instance), adds)
    m_forward = matching_from_pairs(
        [
            ("mStar", "wStar"),
            ("mVp_1", "wV_1"),
            ("mVp_2", "wV_2"),
            ("mV_1", "wTil_1"),
            ("mV_2", "wTil_2"),
            ("mV_3", "wV_3"),
            ("mE_1_2", "wPen_1"),
            ("mEp_1_2", "wE_1_2"),
            ("mE_1_3", "wE_1_3"),
            ("mE_2_3", "wE_2_3"),
        ]
    )
    assert is_stable(inst2, mask2, m_forward)
    assert ("mStar", "wStar") in m_forward

    req = SolveRequest(
        out.instance, Goal.CONST_EX, ActionKind.ADD, out.budget, out.target_pair
    )
    res = const_ex_bruteforce(req)
    assert (res.status, res.cost) == (Status.FEASIBLE, 3)


def test_clique_add_tracks_clique_existence():
    path = SimpleGraph.from_edges(3, [(0, 1), (1, 2)])
    out = gadget_clique_add(path, 2)
    res = const_ex_bruteforce(
        SolveRequest(out.instance, Goal.CONST_EX, ActionKind.ADD, out.budget, out.target_pair)
    )
    assert res.status is Status.FEASIBLE
    out = gadget_clique_add(path, 3)
    res = const_ex_bruteforce(
        SolveRequest(out.instance, Goal.CONST_EX, ActionKind.ADD, out.budget, out.target_pair)
    )
    assert res.status is Status.INFEASIBLE_ALWAYS


def test_clique_add_rejects_small_k():
    with pytest.raises(ValidationError):
        gadget_clique_add(SimpleGraph(2), 1)


# ---------------------------------------------------------------------------
# clique gadget, acceptability deletions and reorders


def test_clique_accdel_shape_and_forward():
    k2 = SimpleGraph.from_edges(2, [(0, 1)])
    out = gadget_clique_accdel_reorder(k2, 2)
    assert (len(out.instance.men), len(out.instance.women)) == (9, 9)
    assert out.budget == 3

    forward = (
        AccDelete("mVp_1", "wVp_1"),
        AccDelete("mVp_2", "wVp_2"),
        AccDelete("mEpp_1_2", "wEpp_1_2"),
    )
    inst2, mask2 = apply_actions(out.instance, full(out.instance), forward)
    m_forward = matching_from_pairs(
        [
            ("mStar", "wStar"),
            ("mV_1", "wVp_1"),
            ("mVp_1", "wV_1"),
            ("mV_2", "wVp_2"),
            ("mVp_2", "wV_2"),
            ("mEp_1_2", "wEpp_1_2"),
            ("mEpp_1_2", "wEp_1_2"),
            ("mE_1_2", "wPen_1"),
            ("mPen_1", "wE_1_2"),
        ]
    )
    assert is_stable(inst2, mask2, m_forward)
    assert ("mStar", "wStar") in m_forward


def test_clique_accdel_empty_graph_shortcut():
    out = gadget_clique_accdel_reorder(SimpleGraph(0), 2)
    assert (len(out.instance.men), len(out.instance.women)) == (2, 2)
    res = oracle_min_manipulation(
        SolveRequest(
            out.instance, Goal.CONST_EX, ActionKind.ACC_DELETE, out.budget, out.target_pair
        )
    )
    assert (res.status, res.cost) == (Status.FEASIBLE, 2)


# ---------------------------------------------------------------------------
# independent set gadget, deletions


def test_is_delete_shape_and_agreement():
    k2 = SimpleGraph.from_edges(2, [(0, 1)])
    out = gadget_is_delete(k2, 1)
    assert (len(out.instance.men), len(out.instance.women)) == (10, 10)
    assert out.budget == 2
    req = SolveRequest(
        out.instance, Goal.EXACT_EX, ActionKind.DELETE, out.budget, out.target_matching
    )
    res = exact_ex_delete_fpt(req)
    assert (res.status, res.cost) == (Status.FEASIBLE, 2)


def test_is_delete_edgeless_is_free():
    out = gadget_is_delete(SimpleGraph(2), 2)
    assert out.budget == 0
    assert is_stable(out.instance, full(out.instance), out.target_matching)


def test_is_delete_triangle_two_infeasible():
    tri = SimpleGraph.from_edges(3, [(0, 1), (0, 2), (1, 2)])
    out = gadget_is_delete(tri, 2)
    res = exact_ex_delete_fpt(
        SolveRequest(
            out.instance, Goal.EXACT_EX, ActionKind.DELETE, out.budget, out.target_matching
        )
    )
    assert res.status is Status.INFEASIBLE_WITHIN_BUDGET


# ---------------------------------------------------------------------------
# hitting set gadgets


def test_hs_reorder_shape_frozen():
    fig8 = SetSystem(3, (frozenset({1, 2, 3}), frozenset({1, 2})))
    out = gadget_hs_reorder(fig8, 2)
    inst = out.instance
    assert (len(inst.men), len(inst.women)) == (7, 7)
    assert inst.prefs["wZ_1"] == ("mZ_1", "mF1_1", "mF1_2")
    assert inst.prefs["wZ_3"] == ("mZ_3", "mF1_1")
    assert inst.prefs["mF1_1"] == ("wF1_1", "wZ_1", "wZ_2", "wZ_3", "wF2_1")
    assert inst.prefs["mF1_2"] == ("wF1_2", "wZ_1", "wZ_2", "wF2_2")
    assert inst.prefs["mF2_1"] == ("wF2_1", "wF1_1")
    assert inst.prefs["wF1_1"] == ("mF2_1", "mF1_1")
    assert inst.prefs["wF2_1"] == ("mF1_1", "mF2_1")
    assert is_stable(inst, full(inst), out.target_matching)
    assert gale_shapley(inst, full(inst)) == out.target_matching


def test_hs_reorder_singleton_agreement():
    z1 = SetSystem(1, (frozenset({1}),))
    out = gadget_hs_reorder(z1, 1)
    req = SolveRequest(
        out.instance, Goal.EXACT_UNI, ActionKind.REORDER, out.budget, out.target_matching
    )
    res = exact_uni_reorder_xp(req)
    assert (res.status, res.cost) == (Status.FEASIBLE, 1)
    res = oracle_min_manipulation(req)
    assert (res.status, res.cost) == (Status.FEASIBLE, 1)


def test_hs_add_singleton_agreement():
    z1 = SetSystem(1, (frozenset({1}),))
    out = gadget_hs_add(z1, 1)
    assert out.instance.addable_women == ("wZ_1",)
    req = SolveRequest(
        out.instance, Goal.EXACT_UNI, ActionKind.ADD, out.budget, out.target_matching
    )
    res = exact_uni_bruteforce(req)
    assert (res.status, res.cost, res.actions) == (Status.FEASIBLE, 1, (Add("wZ_1"),))
    res = exact_uni_bruteforce(
        SolveRequest(out.instance, Goal.EXACT_UNI, ActionKind.ADD, 0, out.target_matching)
    )
    assert (res.status, res.cost) == (Status.INFEASIBLE_WITHIN_BUDGET, 1)


# ---------------------------------------------------------------------------
# dummy blocks


def test_dummy_block_frozen_lists():
    blk1 = gadget_dummy_block(1)
    assert blk1.prefs["mDum_1"] == ("wDum_1",)
    assert blk1.prefs["wDum_1"] == ("mDum_1",)
    blk = gadget_dummy_block(3)
    assert blk.prefs["mDum_1"] == ("wDum_1", "wDum_2", "wDum_3")
    assert blk.prefs["wDum_2"] == ("mDum_2", "mDum_3", "mDum_1")


def test_dummy_block_breaks_under_three_swaps():
    blk = gadget_dummy_block(3)
    plan = (Swap("wDum_1", 0), Swap("wDum_2", 0), Swap("wDum_3", 0))
    inst2, mask2 = apply_actions(blk, full(blk), plan)
    broken = matching_from_pairs(
        [("mDum_2", "wDum_1"), ("mDum_3", "wDum_2"), ("mDum_1", "wDum_3")]
    )
    assert is_stable(inst2, mask2, broken)


def test_dummy_block_survives_single_swaps():
    blk = gadget_dummy_block(3)
    idpairs = {("mDum_1", "wDum_1"), ("mDum_2", "wDum_2"), ("mDum_3", "wDum_3")}
    singles = [Swap(a, p) for a in (*blk.men, *blk.women) for p in (0, 1)]
    for plan in [()] + [(s,) for s in singles]:
        inst2, mask2 = apply_actions(blk, full(blk), plan)
        for m in enumerate_stable(inst2, mask2):
            assert idpairs <= set(m.pairs)
