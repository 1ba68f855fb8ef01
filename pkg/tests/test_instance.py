import pytest

import kopt as ko
from kopt.instance import count_cycles

import tests.standard_instances as si


def test_tour_edges_follow_tour_order():
    inst = si.k4_heavy()
    assert inst.tour_edges == [(0, 1), (1, 2), (2, 3), (3, 0)]
    assert inst.tour_edge(3) == (3, 0)
    assert inst.total_weight == 12
    assert inst.edge_index(3, 0) == 3
    assert inst.edge_index(0, 2) is None
    assert inst.is_chord(0, 2)
    assert not inst.is_chord(0, 1)
    assert inst.chords(0) == [(2, 1)]
    assert inst.max_degree == 3


@pytest.mark.parametrize(
    "tour,edges,degree_bound",
    [
        # too small
        ([0, 1], [(0, 1, 1)], None),
        # self-loop
        ([0, 1, 2], [(0, 1, 1), (1, 2, 1), (0, 2, 1), (1, 1, 1)], None),
        # vertex outside 0..n-1
        ([0, 1, 2], [(0, 1, 1), (1, 2, 1), (0, 2, 1), (2, 7, 1)], None),
        # conflicting weights
        ([0, 1, 2], [(0, 1, 1), (1, 0, 2), (1, 2, 1), (0, 2, 1)], None),
        # consecutive tour vertices without an edge
        ([0, 1, 2, 3], [(0, 1, 1), (1, 2, 1), (2, 3, 1)], None),
        # degree above the bound
        ([0, 1, 2, 3], [(0, 1, 1), (1, 2, 1), (2, 3, 1), (0, 3, 1), (0, 2, 1)], 2),
        # weight outside 64 bits
        ([0, 1, 2], [(0, 1, 2**63), (1, 2, 1), (0, 2, 1)], None),
    ],
)
def test_rejects_invalid_instances(tour, edges, degree_bound):
    with pytest.raises(ko.InvalidInstanceError):
        ko.TourInstance.from_edges(tour, edges, degree_bound=degree_bound)


def test_rejects_tour_that_is_not_a_permutation():
    with pytest.raises(ko.InvalidInstanceError):
        ko.TourInstance(n=3, tour=(0, 1, 1), edges=((0, 1, 1), (1, 2, 1), (0, 2, 1)))


def test_validate_swap_gives_move():
    inst = si.k4_heavy()
    move = ko.validate_swap(inst, ko.Swap.build(inst, [0, 2], [(0, 2), (1, 3)]))
    assert isinstance(move, ko.Move)
    assert move.gain == 8
    assert move.removed_pairs == {(0, 1), (2, 3)}
    assert move.resulting_weight == 4


def test_validate_swap_counts_cycles():
    inst = si.k4_heavy()
    result = ko.validate_swap(inst, ko.Swap.build(inst, [0, 2], [(0, 3), (1, 2)]))
    assert isinstance(result, ko.Infeasible)
    assert result.cycles == 2


@pytest.mark.parametrize(
    "removed,added",
    [
        ([0, 2], [(0, 5), (1, 2)]),
        ([0], [(0, 2), (1, 4)]),
        ([0, 9], [(0, 2), (1, 4)]),
        ([0, 3], [(0, 2), (1, 4)]),
    ],
)
def test_validate_swap_rejects_malformed_swaps(removed, added):
    inst = si.prism()
    swap = ko.Swap(frozenset(removed), frozenset(added), 0)
    with pytest.raises(ko.InvalidSwapError):
        ko.validate_swap(inst, swap)


def test_count_cycles_of_empty_swap():
    assert count_cycles(si.prism(), [], []) == 1


def test_apply_move_rebuilds_tour():
    inst = si.k4_heavy()
    move = ko.validate_swap(inst, ko.Swap.build(inst, [0, 2], [(0, 2), (1, 3)]))
    assert isinstance(move, ko.Move)
    after = ko.apply_move(inst, move)
    assert after.tour == (0, 2, 1, 3)
    assert after.total_weight == ko.tour_weight(after) == 4
    # the graph itself is untouched
    assert after.edges == inst.edges


def test_apply_move_rejects_stale_move():
    inst = si.k4_heavy()
    move = ko.validate_swap(inst, ko.Swap.build(inst, [0, 2], [(0, 2), (1, 3)]))
    assert isinstance(move, ko.Move)
    after = ko.apply_move(inst, move)
    with pytest.raises(ko.StaleMoveError):
        ko.apply_move(after, move)


def test_parse_matches_constructed_instance():
    inst = ko.parse_instance(si.K4_TEXT)
    assert inst == si.k4_heavy()
    assert ko.parse_instance(si.K4_TEXT.encode()) == inst
    assert ko.parse_instance(ko.serialize_instance(inst)) == inst


@pytest.mark.parametrize(
    "text,line,column",
    [
        ("", 1, 1),
        ("# only a comment\n", 1, 1),
        ("4 6\n", 1, 1),
        ("4 6 3\n", 2, 1),
        ("4 6 3\n0 1 2 x\n", 2, 7),
        ("3 3 3\n0 1 2\n0 1 1\n1 2 1\n", 5, 1),
        ("3 3 3\n0 1 2\n0 1 1\n1 2 1\n0 2 z\n", 5, 5),
    ],
)
def test_parse_reports_position(text, line, column):
    with pytest.raises(ko.InstanceFormatError) as info:
        ko.parse_instance(text)
    assert info.value.line == line
    assert info.value.column == column


def test_move_json():
    inst = si.k4_heavy()
    move = ko.validate_swap(inst, ko.Swap.build(inst, [2, 0], [(1, 3), (2, 0)]))
    assert isinstance(move, ko.Move)
    assert ko.move_to_json(move) == '{"gain":8,"remove":[[0,1],[2,3]],"add":[[0,2],[1,3]]}'


def test_sort_key_prefers_gain_then_smaller_edges():
    a = ko.Swap(frozenset({0, 2}), frozenset({(0, 2)}), 3)
    b = ko.Swap(frozenset({1, 2}), frozenset({(0, 2)}), 3)
    c = ko.Swap(frozenset({5, 6}), frozenset({(0, 2)}), 4)
    assert sorted([a, b, c], key=ko.Swap.sort_key) == [c, a, b]


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("n", [6, 11, 40])
def test_random_instance_is_subcubic_and_seeded(n, seed):
    inst = ko.random_instance(n, seed=seed)
    assert inst.tour == tuple(range(n))
    assert inst.max_degree <= 3
    assert all(1 <= w <= 5 for _, _, w in inst.edges)
    assert ko.random_instance(n, seed=seed) == inst


def test_random_instance_rejects_tiny_graphs():
    with pytest.raises(ValueError):
        ko.random_instance(2, seed=0)
