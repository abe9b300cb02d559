"""Shared fixtures and hypothesis strategies for the test suite.

The named fixtures are small hand-built markets whose solver outcomes are
frozen in the tests; the strategies draw random complete and incomplete
instances for property checks.
"""

from __future__ import annotations

import pytest
from hypothesis import strategies as st

from smbribe.core import Instance, Matching, make_instance, matching_from_pairs


@pytest.fixture
def ex3() -> Instance:
    """3x3 market where deleting m1 lets (m3, w1) into a stable matching."""
    return make_instance(
        ("m1", "m2", "m3"),
        ("w1", "w2", "w3"),
        {
            "m1": ("w1", "w3", "w2"),
            "m2": ("w3", "w1", "w2"),
            "m3": ("w1", "w2", "w3"),
            "w1": ("m1", "m2", "m3"),
            "w2": ("m2", "m1", "m3"),
            "w3": ("m3", "m2", "m1"),
        },
    )


@pytest.fixture
def ex5() -> Instance:
    """3x3 market whose target matching has exactly three blocking pairs."""
    return make_instance(
        ("m1", "m2", "m3"),
        ("w1", "w2", "w3"),
        {
            "m1": ("w1", "w2", "w3"),
            "m2": ("w2", "w3", "w1"),
            "m3": ("w2", "w3", "w1"),
            "w1": ("m1", "m2", "m3"),
            "w2": ("m1", "m3", "m2"),
            "w3": ("m1", "m2", "m3"),
        },
    )


@pytest.fixture
def ex5_mstar() -> Matching:
    return matching_from_pairs([("m1", "w3"), ("m2", "w2"), ("m3", "w1")])


@pytest.fixture
def rot22() -> Instance:
    """2x2 market with two stable matchings (one rotation apart)."""
    return make_instance(
        ("m1", "m2"),
        ("w1", "w2"),
        {
            "m1": ("w1", "w2"),
            "m2": ("w2", "w1"),
            "w1": ("m2", "m1"),
            "w2": ("m1", "m2"),
        },
    )


@pytest.fixture
def rot22_manopt() -> Matching:
    return matching_from_pairs([("m1", "w1"), ("m2", "w2")])


@pytest.fixture
def uniq() -> Instance:
    """2x2 market with a unique stable matching (mutual first choices)."""
    return make_instance(
        ("m1", "m2"),
        ("w1", "w2"),
        {
            "m1": ("w1", "w2"),
            "m2": ("w2", "w1"),
            "w1": ("m1", "m2"),
            "w2": ("m2", "m1"),
        },
    )


@pytest.fixture
def uniq_mstar() -> Matching:
    return matching_from_pairs([("m1", "w1"), ("m2", "w2")])


@pytest.fixture
def mutual() -> Instance:
    """2x2 market where everyone ranks the same partner first."""
    return make_instance(
        ("m1", "m2"),
        ("w1", "w2"),
        {
            "m1": ("w1", "w2"),
            "m2": ("w1", "w2"),
            "w1": ("m1", "m2"),
            "w2": ("m1", "m2"),
        },
    )


@pytest.fixture
def add1() -> Instance:
    """2x2 market with one addable agent per side; adding w2 fixes the target."""
    return make_instance(
        ("m1", "m2"),
        ("w1", "w2"),
        {
            "m1": ("w2", "w1"),
            "m2": ("w1", "w2"),
            "w1": ("m1", "m2"),
            "w2": ("m1", "m2"),
        },
        addable_men=("m2",),
        addable_women=("w2",),
    )


@pytest.fixture
def add_ia() -> Instance:
    """Addable variant where no subset of additions reaches the target."""
    return make_instance(
        ("m1", "m2"),
        ("w1", "w2"),
        {
            "m1": ("w1", "w2"),
            "m2": ("w1", "w2"),
            "w1": ("m1", "m2"),
            "w2": ("m1", "m2"),
        },
        addable_men=("m2",),
        addable_women=("w2",),
    )


@pytest.fixture
def add_mstar() -> Matching:
    return matching_from_pairs([("m1", "w2"), ("m2", "w1")])


@pytest.fixture
def part() -> Instance:
    """Incomplete 2x2 market: (m1, w2) is not mutually acceptable."""
    return make_instance(
        ("m1", "m2"),
        ("w1", "w2"),
        {
            "m1": ("w1",),
            "m2": ("w1", "w2"),
            "w1": ("m1", "m2"),
            "w2": ("m2",),
        },
    )


# ---------------------------------------------------------------------------
# hypothesis strategies


@st.composite
def complete_instances(draw, min_n: int = 1, max_n: int = 5) -> Instance:
    """A complete market: every list ranks the entire other side."""
    n = draw(st.integers(min_n, max_n))
    men = tuple(f"m{i + 1}" for i in range(n))
    women = tuple(f"w{i + 1}" for i in range(n))
    prefs = {}
    for m in men:
        prefs[m] = tuple(draw(st.permutations(women)))
    for w in women:
        prefs[w] = tuple(draw(st.permutations(men)))
    return make_instance(men, women, prefs)


@st.composite
def smi_instances(draw, min_n: int = 1, max_n: int = 5) -> Instance:
    """An incomplete market with mutual acceptability; lists may be empty."""
    n = draw(st.integers(min_n, max_n))
    men = tuple(f"m{i + 1}" for i in range(n))
    women = tuple(f"w{i + 1}" for i in range(n))
    acceptable = {
        (m, w): draw(st.booleans(), label=f"acc {m} {w}")
        for m in men
        for w in women
    }
    prefs = {}
    for m in men:
        ok = [w for w in women if acceptable[(m, w)]]
        prefs[m] = tuple(draw(st.permutations(ok))) if ok else ()
    for w in women:
        ok = [m for m in men if acceptable[(m, w)]]
        prefs[w] = tuple(draw(st.permutations(ok))) if ok else ()
    return make_instance(men, women, prefs)


@st.composite
def perfect_matchings(draw, inst: Instance) -> Matching:
    """A uniform perfect matching of a complete instance."""
    women = draw(st.permutations(inst.women))
    return matching_from_pairs(zip(inst.men, women))
