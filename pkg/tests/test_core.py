"""Data model, action semantics, and file formats."""

from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smbribe.core import (
    AccDelete,
    ActionError,
    Add,
    Delete,
    ParseError,
    PresenceMask,
    Reorder,
    Side,
    Swap,
    UNBOUNDED,
    ValidationError,
    apply_action,
    apply_actions,
    enumeration_cap,
    instance_digest,
    make_instance,
    matching_from_pairs,
    parse_actions,
    parse_instance,
    parse_matching,
    serialize_actions,
    serialize_instance,
    serialize_matching,
)

from conftest import complete_instances, smi_instances


# ---------------------------------------------------------------------------
# construction and validation


def test_make_instance_smallest():
    inst = make_instance(("a",), ("x",), {"a": ("x",), "x": ("a",)})
    assert inst.men == ("a",)
    assert inst.women == ("x",)
    assert inst.rank_of["a"]["x"] == 1


def test_make_instance_rejects_duplicate_names():
    with pytest.raises(ValidationError):
        make_instance(("a", "a"), ("x", "y"), {"a": (), "x": (), "y": ()})


def test_make_instance_rejects_unknown_list_entry():
    with pytest.raises(ValidationError):
        make_instance(("a",), ("x",), {"a": ("nope",), "x": ("a",)})


def test_make_instance_rejects_duplicate_list_entry():
    with pytest.raises(ValidationError):
        make_instance(
            ("a",), ("x", "y"), {"a": ("x", "x"), "x": ("a",), "y": ()}
        )


def test_make_instance_rejects_one_sided_acceptability():
    with pytest.raises(ValidationError):
        make_instance(("a",), ("x",), {"a": ("x",), "x": ()})


def test_make_instance_rejects_undeclared_addable():
    with pytest.raises(ValidationError):
        make_instance(
            ("a",), ("x",), {"a": ("x",), "x": ("a",)}, addable_men=("b",)
        )


def test_side_opposite():
    assert Side.MAN.opposite is Side.WOMAN
    assert Side.WOMAN.opposite is Side.MAN


def test_unbounded_is_infinite():
    assert UNBOUNDED == math.inf


# ---------------------------------------------------------------------------
# matchings


def test_matching_from_pairs_and_partner():
    m = matching_from_pairs([("m1", "w2"), ("m2", "w1")])
    assert m.partner("m1") == "w2"
    assert m.partner("w1") == "m2"
    assert m.partner("m3") is None
    assert m.sorted_pairs() == (("m1", "w2"), ("m2", "w1"))


def test_matching_rejects_reused_agent():
    with pytest.raises(ValidationError):
        matching_from_pairs([("m1", "w1"), ("m1", "w2")])
    with pytest.raises(ValidationError):
        matching_from_pairs([("m1", "w1"), ("m2", "w1")])


# ---------------------------------------------------------------------------
# actions


def test_swap_exchanges_adjacent_stored_entries(ex3):
    inst, mask = apply_action(ex3, PresenceMask.initial(ex3), Swap("m1", 0))
    assert inst.prefs["m1"] == ("w3", "w1", "w2")
    assert mask == PresenceMask.initial(ex3)


def test_swap_position_out_of_range(ex3):
    with pytest.raises(ActionError):
        apply_action(ex3, PresenceMask.initial(ex3), Swap("m1", 2))
    with pytest.raises(ActionError):
        apply_action(ex3, PresenceMask.initial(ex3), Swap("nobody", 0))


def test_reorder_requires_permutation_of_stored_list(ex3):
    inst, _ = apply_action(
        ex3, PresenceMask.initial(ex3), Reorder("m1", ("w2", "w3", "w1"))
    )
    assert inst.prefs["m1"] == ("w2", "w3", "w1")
    with pytest.raises(ActionError):
        apply_action(ex3, PresenceMask.initial(ex3), Reorder("m1", ("w2", "w3")))
    with pytest.raises(ActionError):
        apply_action(
            ex3, PresenceMask.initial(ex3), Reorder("m1", ("w2", "w3", "w3"))
        )


def test_accdelete_is_symmetric(ex3):
    inst, _ = apply_action(ex3, PresenceMask.initial(ex3), AccDelete("m1", "w3"))
    assert "w3" not in inst.prefs["m1"]
    assert "m1" not in inst.prefs["w3"]
    assert inst.rank_of["m1"].get("w3") is None
    assert inst.rank_of["w3"].get("m1") is None


def test_accdelete_rejects_non_acceptable_pair(part):
    with pytest.raises(ActionError):
        apply_action(part, PresenceMask.initial(part), AccDelete("m1", "w2"))


def test_delete_masks_agent_but_keeps_list(ex3):
    inst, mask = apply_action(ex3, PresenceMask.initial(ex3), Delete("m1"))
    assert "m1" not in mask.men
    assert inst.prefs["m1"] == ex3.prefs["m1"]
    with pytest.raises(ActionError):
        apply_action(inst, mask, Delete("m1"))


def test_add_requires_addable_absent_agent(add1):
    mask = PresenceMask.initial(add1)
    assert "w2" not in mask.women
    inst, mask2 = apply_action(add1, mask, Add("w2"))
    assert "w2" in mask2.women
    with pytest.raises(ActionError):
        apply_action(inst, mask2, Add("w2"))
    with pytest.raises(ActionError):
        apply_action(add1, mask, Add("w1"))


def test_list_edits_are_legal_while_absent(add1):
    mask = PresenceMask.initial(add1)
    inst, _ = apply_action(add1, mask, Swap("w2", 0))
    assert inst.prefs["w2"] == ("m2", "m1")


@settings(max_examples=60)
@given(complete_instances(min_n=2, max_n=4), st.data())
def test_double_swap_is_identity(inst, data):
    agent = data.draw(st.sampled_from(inst.men + inst.women))
    pos = data.draw(st.integers(0, len(inst.prefs[agent]) - 2))
    mask = PresenceMask.initial(inst)
    once, _ = apply_action(inst, mask, Swap(agent, pos))
    twice, _ = apply_action(once, mask, Swap(agent, pos))
    assert twice == inst


@settings(max_examples=60)
@given(complete_instances(min_n=1, max_n=4), st.data())
def test_reorder_with_current_list_is_identity(inst, data):
    agent = data.draw(st.sampled_from(inst.men + inst.women))
    out, _ = apply_action(
        inst, PresenceMask.initial(inst), Reorder(agent, inst.prefs[agent])
    )
    assert out == inst


@settings(max_examples=60)
@given(smi_instances(min_n=2, max_n=4), st.data())
def test_random_action_sequences_preserve_invariants(inst, data):
    """Applying any legal sequence yields an instance make_instance accepts."""
    mask = PresenceMask.initial(inst)
    for _ in range(data.draw(st.integers(0, 4))):
        kind = data.draw(st.sampled_from(["swap", "reorder", "accdel", "delete"]))
        if kind == "swap":
            agent = data.draw(st.sampled_from(inst.men + inst.women))
            if len(inst.prefs[agent]) < 2:
                continue
            act = Swap(agent, data.draw(st.integers(0, len(inst.prefs[agent]) - 2)))
        elif kind == "reorder":
            agent = data.draw(st.sampled_from(inst.men + inst.women))
            act = Reorder(agent, tuple(data.draw(st.permutations(inst.prefs[agent]))))
        elif kind == "accdel":
            men_with = [m for m in inst.men if inst.prefs[m]]
            if not men_with:
                continue
            man = data.draw(st.sampled_from(men_with))
            act = AccDelete(man, data.draw(st.sampled_from(inst.prefs[man])))
        else:
            present = [a for a in inst.men + inst.women if a in mask.men or a in mask.women]
            if not present:
                continue
            act = Delete(data.draw(st.sampled_from(present)))
        inst, mask = apply_action(inst, mask, act)
    rebuilt = make_instance(
        inst.men,
        inst.women,
        {a: inst.prefs[a] for a in inst.men + inst.women},
        addable_men=inst.addable_men,
        addable_women=inst.addable_women,
    )
    assert rebuilt == inst


# ---------------------------------------------------------------------------
# text formats


def test_parse_smallest_instance():
    text = "smi 1\nmen: a\nwomen: x\npref a: x\npref x: a\n"
    inst = parse_instance(text)
    assert inst.men == ("a",) and inst.women == ("x",)


def test_parse_preserves_declaration_order_and_ranks(ex5):
    inst = parse_instance(serialize_instance(ex5))
    assert inst == ex5
    assert inst.rank_of["m1"]["w2"] == 2


def test_parse_rejects_duplicate_pref_entry():
    text = "smi 1\nmen: a\nwomen: x y\npref a: x x\npref x: a\npref y:\n"
    with pytest.raises((ParseError, ValidationError)):
        parse_instance(text)


def test_parse_rejects_bad_header():
    with pytest.raises(ParseError):
        parse_instance("smi 2\nmen: a\nwomen: x\n")
    with pytest.raises(ParseError):
        parse_instance("")


def test_parse_rejects_unknown_agent_in_pref():
    text = "smi 1\nmen: a\nwomen: x\npref a: x\npref x: a\npref b: x\n"
    with pytest.raises(ParseError):
        parse_instance(text)


def test_parse_rejects_non_mutual_lists():
    text = "smi 1\nmen: a\nwomen: x\npref a: x\npref x:\n"
    with pytest.raises((ParseError, ValidationError)):
        parse_instance(text)


def test_parse_allows_comments_and_blank_lines():
    text = "# hello\nsmi 1\n\nmen: a # trailing\nwomen: x\npref a: x\npref x: a\n"
    inst = parse_instance(text)
    assert inst.men == ("a",)


def test_parse_addable_sections(add1):
    round_tripped = parse_instance(serialize_instance(add1))
    assert round_tripped.addable_men == ("m2",)
    assert round_tripped.addable_women == ("w2",)


@settings(max_examples=80)
@given(smi_instances(min_n=1, max_n=5))
def test_parse_serialize_round_trip(inst):
    text = serialize_instance(inst)
    again = parse_instance(text)
    assert again == inst
    assert serialize_instance(again) == text


def test_matching_round_trip(ex5_mstar):
    text = serialize_matching(ex5_mstar)
    assert parse_matching(text) == ex5_mstar
    assert text == "smm 1\npair m1 w3\npair m2 w2\npair m3 w1\n"


def test_parse_matching_rejects_double_use():
    with pytest.raises(ParseError):
        parse_matching("smm 1\npair m1 w1\npair m1 w2\n")


def test_actions_round_trip():
    actions = (
        Swap("m1", 2),
        Reorder("w1", ("m2", "m1")),
        AccDelete("m1", "w2"),
        Delete("m3"),
        Add("w9"),
    )
    text = serialize_actions(actions)
    assert parse_actions(text) == actions
    assert "swap m1 2" in text and "reorder w1: m2 m1" in text


def test_parse_actions_rejects_garbage():
    with pytest.raises(ParseError):
        parse_actions("frobnicate m1\n")
    with pytest.raises(ParseError):
        parse_actions("swap m1 -1\n")


# ---------------------------------------------------------------------------
# digests and caps


def test_instance_digest_is_stable_and_distinguishing(ex3, ex5):
    assert instance_digest(ex3) == instance_digest(ex3)
    assert instance_digest(ex3) != instance_digest(ex5)


def test_enumeration_cap_default_and_override(monkeypatch):
    monkeypatch.delenv("SMBRIBE_ORACLE_CAP", raising=False)
    assert enumeration_cap() == 10**7
    monkeypatch.setenv("SMBRIBE_ORACLE_CAP", "123")
    assert enumeration_cap() == 123
    monkeypatch.setenv("SMBRIBE_ORACLE_CAP", "0")
    with pytest.raises(ValidationError):
        enumeration_cap()


def test_apply_actions_order_matters(ex3):
    seq = (Swap("m1", 0), Swap("m1", 1))
    inst, _ = apply_actions(ex3, PresenceMask.initial(ex3), seq)
    assert inst.prefs["m1"] == ("w3", "w2", "w1")
