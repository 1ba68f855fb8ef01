import itertools

from hypothesis import given, strategies as st
import pytest

import kopt as ko
from kopt.patterns import (
    Embedding,
    compose,
    component_slots,
    improving_candidates,
    interaction_graph,
    interactions,
    is_reducible,
    parse_pattern,
    realize,
    reducible_split,
    restrict,
    swap_adjacent,
)

import tests.standard_instances as si

TWO_OPT = ko.ConnectionPattern.from_edges(2, [(0, 2), (1, 3)])
DOUBLE_BRIDGE = ko.ConnectionPattern.from_edges(4, [(0, 5), (3, 6), (1, 4), (2, 7)])
TWO_TWO_OPTS = ko.ConnectionPattern.from_edges(4, [(0, 2), (1, 3), (4, 6), (5, 7)])

feasible = st.integers(min_value=2, max_value=5).flatmap(
    lambda k: st.sampled_from(ko.feasible_patterns(k))
)


@pytest.mark.parametrize("k,expected", [(2, 1), (3, 4), (4, 25), (5, 208)])
def test_feasible_pattern_counts(k, expected):
    assert len(ko.feasible_patterns(k)) == expected


@pytest.mark.parametrize("k,expected", [(2, 2), (3, 8), (4, 48), (5, 384)])
def test_appendix_universe_counts(k, expected):
    patterns = list(ko.enumerate_patterns(k, ko.PatternUniverse.APPENDIX))
    assert len(patterns) == expected
    assert all(ko.is_feasible(p) for p in patterns)


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_appendix_without_null_slots_is_admissible_catalogue(k):
    appendix = {
        p.mate
        for p in ko.enumerate_patterns(k, ko.PatternUniverse.APPENDIX)
        if not p.has_null_slot
    }
    assert appendix == {p.mate for p in ko.feasible_patterns(k)}


def test_admissible_universe_holds_infeasible_patterns():
    patterns = list(ko.enumerate_patterns(3))
    assert len(patterns) == 8
    assert sum(ko.is_feasible(p) for p in patterns) == 4
    assert [p.mate for p in patterns] == sorted(p.mate for p in patterns)


def test_two_opt_is_sequential():
    assert parse_pattern("2; 1-3, 2-4") == TWO_OPT
    assert ko.is_feasible(TWO_OPT)
    assert component_slots(TWO_OPT) == [(0, 1)]


def test_double_bridge_is_irreducible():
    assert ko.is_feasible(DOUBLE_BRIDGE)
    assert component_slots(DOUBLE_BRIDGE) == [(0, 2), (1, 3)]
    assert not is_reducible(DOUBLE_BRIDGE)
    assert interactions(DOUBLE_BRIDGE, (0, 2), (1, 3)) == 3
    assert DOUBLE_BRIDGE in improving_candidates(4)
    assert str(DOUBLE_BRIDGE) == "4; 1-6, 2-5, 3-8, 4-7"


def test_two_separate_two_opts_are_reducible():
    assert ko.is_feasible(TWO_TWO_OPTS)
    assert reducible_split(TWO_TWO_OPTS) == ((0, 1), (2, 3))
    assert TWO_TWO_OPTS not in improving_candidates(4)
    assert [sub.pattern for sub in ko.sequential_decomposition(TWO_TWO_OPTS)] == [
        TWO_OPT,
        TWO_OPT,
    ]


@pytest.mark.parametrize(
    "mate",
    [
        (1, 0, 3, 2),  # re-adds both removed edges
        (2, 3, 0),  # odd size
        (2, 3, 1, 0),  # not an involution
        (0, 3, 2, 1),  # fixed points
    ],
)
def test_rejects_malformed_patterns(mate):
    with pytest.raises(ko.PatternError):
        ko.ConnectionPattern(mate)


@pytest.mark.parametrize("text", ["2 1-3, 2-4", "2; 1-3, 2/4", "2; 1-3"])
def test_parse_pattern_rejects_garbage(text):
    with pytest.raises(ko.PatternError):
        parse_pattern(text)


@pytest.mark.parametrize("k", [0, 11])
def test_enumeration_bounds(k):
    with pytest.raises(ko.PatternError):
        list(ko.enumerate_patterns(k))


def test_embedding_must_increase():
    with pytest.raises(ko.PatternError):
        Embedding((0, 1), (4, 2))


def test_realize_on_k4():
    inst = si.k4_heavy()
    swap = realize(TWO_OPT, (0, 2), inst)
    assert swap.added == {(0, 2), (1, 3)}
    assert swap.gain == 8


def test_realize_needs_graph_edges():
    with pytest.raises(ko.NotAdmissibleError):
        realize(TWO_OPT, (0, 3), si.prism())


@given(feasible)
def test_components_partition_slots(p):
    comps = component_slots(p)
    assert sorted(itertools.chain.from_iterable(comps)) == list(range(p.k))
    assert [c[0] for c in comps] == sorted(c[0] for c in comps)


@given(feasible)
def test_compose_inverts_restrict(p):
    parts = [(slots, restrict(p, slots)) for slots in component_slots(p)]
    assert compose(p.k, parts) == p


@given(feasible)
def test_reducible_split_is_two_feasible_halves(p):
    split = reducible_split(p)
    assert (split is not None) == is_reducible(p)
    if split is not None:
        first, second = split
        assert sorted(first + second) == list(range(p.k))
        assert ko.is_feasible(restrict(p, first))
        assert ko.is_feasible(restrict(p, second))


@given(feasible, st.data())
def test_swap_adjacent_is_an_involution(p, data):
    i = data.draw(st.integers(min_value=0, max_value=p.k - 2))
    assert swap_adjacent(swap_adjacent(p, i), i) == p


@given(feasible)
def test_interaction_closure_has_one_edge_per_slot(p):
    simple, closure = interaction_graph(p)
    assert closure.number_of_edges() == p.k
    assert simple.number_of_nodes() == len(component_slots(p))
