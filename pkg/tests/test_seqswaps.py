import itertools

import pytest

import kopt as ko
from kopt.patterns import component_slots, realize, realized_pairs
from kopt.seqswaps import (
    SequentialIndex,
    canonical_sequential_pattern,
    count_sequential_bound,
    enumerate_sequential_swaps,
    walks,
)

import tests.standard_instances as si


def sequential_by_patterns(inst: ko.TourInstance, length: int) -> set:
    """Every single-component placement with chords only, from the patterns."""
    found = set()
    for edges in itertools.combinations(range(inst.n), length):
        for p in ko.enumerate_patterns(length):
            if len(component_slots(p)) != 1:
                continue
            added = realized_pairs(p.mate, range(length), edges, inst)
            if added is None or not all(inst.is_chord(u, v) for u, v in added):
                continue
            found.add((frozenset(edges), frozenset(added)))
    return found


@pytest.mark.parametrize(
    "inst",
    [si.k4_heavy(), si.prism(), si.cubic(10, seed=1), si.cubic(12, seed=4)],
)
@pytest.mark.parametrize("length", [2, 3])
def test_walks_find_every_sequential_swap_once(inst, length):
    swaps = list(enumerate_sequential_swaps(inst, length))
    keys = [(s.removed, s.added) for s in swaps]
    assert len(keys) == len(set(keys))
    assert set(keys) == sequential_by_patterns(inst, length)
    for s in swaps:
        assert s.gain == ko.Swap.build(inst, s.removed, s.added).gain


@pytest.mark.parametrize("seed", range(4))
@pytest.mark.parametrize("length", [2, 3, 4])
def test_walk_count_respects_bound(seed, length):
    inst = si.cubic(14, seed=seed)
    assert sum(1 for _ in walks(inst, length)) <= count_sequential_bound(inst, length)


@pytest.mark.parametrize("inst", [si.prism(), si.cubic(12, seed=2)])
@pytest.mark.parametrize("length", [2, 3])
def test_canonical_pattern_realizes_the_swap(inst, length):
    for s in enumerate_sequential_swaps(inst, length):
        sub = canonical_sequential_pattern(s, inst)
        assert sub.size == length
        assert len(component_slots(sub.parent)) == 1
        again = realize(sub.parent, sorted(s.removed), inst)
        assert again.added == s.added


def test_index_groups_walks_by_shape():
    two_opt = ko.ConnectionPattern.from_edges(2, [(0, 2), (1, 3)])
    index = SequentialIndex(si.k4_heavy())
    assert index.embeddings(two_opt) == [((0, 2), 8), ((1, 3), 0)]


@pytest.mark.parametrize(
    "removed,added",
    [
        ({0}, {(0, 2)}),
        ({0, 2}, {(0, 2)}),
    ],
)
def test_canonical_pattern_rejects_non_sequential(removed, added):
    inst = si.k4_heavy()
    with pytest.raises(ko.NotSequentialError):
        canonical_sequential_pattern(ko.Swap(frozenset(removed), frozenset(added), 0), inst)


def test_walks_need_two_edges():
    with pytest.raises(ko.PatternError):
        list(walks(si.prism(), 1))
