import itertools

import pytest

import kopt as ko
from kopt.hardness import (
    PatternedHost,
    TriangleMode,
    TripartiteGraph,
    gen_subiso_instance,
    gen_triangle_instance,
    k_prime,
    min_hamiltonian_cycle_weight,
    parse_patterned_host,
    parse_tripartite,
    restricted_oracle_9opt,
    witness_cycle,
    witness_move,
)

import tests.standard_instances as si

# ------------------------------------------------------------------------------
# Triangle detection
# ------------------------------------------------------------------------------


def test_triangle_instance_shape():
    ti = gen_triangle_instance(si.small_tripartite())
    assert ti.instance.n == 63
    assert ti.instance.tour == tuple(range(63))
    assert ti.instance.max_degree <= 3
    assert len(ti.catalogue) == 7
    assert sorted(s.arc for s in ti.catalogue) == [
        (1, 3), (2, 4), (3, 5), (3, 6), (4, 5), (5, 1), (6, 2)
    ]
    assert all(s.swap.k == 3 for s in ti.catalogue)


def test_triangle_gives_nine_edge_move():
    ti = gen_triangle_instance(si.small_tripartite())
    move = restricted_oracle_9opt(ti)
    assert move is not None
    assert move.gain == 1
    assert move.k == 9
    after = ko.apply_move(ti.instance, move)
    assert after.total_weight == ti.instance.total_weight - 1


def test_no_triangle_no_move():
    t = si.small_tripartite(drop=(3, 5))
    assert not t.has_triangle()
    ti = gen_triangle_instance(t)
    assert len(ti.catalogue) == 6
    assert restricted_oracle_9opt(ti) is None


def test_single_triangle_scopes():
    ti = gen_triangle_instance(si.single_triangle())
    assert ti.instance.n == 27
    assert ti.vertex("scope1:path:1") == 0
    assert ti.names[8] == "scope1:link:0"
    assert ti.vertex("scope3:link:0") == 26
    with pytest.raises(ko.ReductionError):
        ti.vertex("scope4:path:1")


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_single_triangle_has_no_small_improving_move(k):
    ti = gen_triangle_instance(si.single_triangle())
    assert ko.brute_force_best_move(ti.instance, k) is None


@pytest.mark.slow
def test_single_triangle_has_no_six_move():
    ti = gen_triangle_instance(si.single_triangle())
    assert ko.brute_force_best_move(ti.instance, 6) is None


def test_pruning_drops_vertices_off_every_triangle():
    t = TripartiteGraph.from_edges([1, 9], [2], [3], [(1, 2), (2, 3), (3, 1), (9, 2)])
    assert t.pruned() == si.single_triangle()
    ti = gen_triangle_instance(t)
    assert ti.instance.n == 27
    assert ti.source == t


def test_fully_pruned_graph_gives_bare_tour():
    t = TripartiteGraph.from_edges([1], [2], [3], [(1, 2), (2, 3)])
    ti = gen_triangle_instance(t)
    assert ti.instance.n == 3
    assert ti.catalogue == ()
    assert restricted_oracle_9opt(ti) is None


@pytest.mark.parametrize(
    "a,b,c,edges",
    [
        ([1], [1], [3], [(1, 3)]),
        ([1], [2], [3], [(1, 4)]),
        ([1, 4], [2], [3], [(1, 4)]),
    ],
)
def test_tripartite_validation(a, b, c, edges):
    with pytest.raises(ko.ReductionError):
        TripartiteGraph.from_edges(a, b, c, edges)


def test_edgeless_graph_is_rejected():
    with pytest.raises(ko.ReductionError):
        gen_triangle_instance(TripartiteGraph.from_edges([1], [2], [3], []))


@pytest.mark.parametrize(
    "weights,expected",
    [
        ((-1, -1, -1), 3),
        ((2, -1, -2), 1),
        ((1, 1, -1), None),
        ((0, 0, 0), None),
    ],
)
def test_negative_mode_gain_is_minus_triangle_weight(weights, expected):
    t = si.single_triangle(weights)
    ti = gen_triangle_instance(t, TriangleMode.NEGATIVE)
    move = restricted_oracle_9opt(ti)
    assert (None if move is None else move.gain) == expected
    if move is not None:
        assert move.gain == -t.min_triangle_weight()


def test_unit_mode_ignores_weights():
    ti = gen_triangle_instance(si.single_triangle((5, 5, 5)), "unit")
    move = restricted_oracle_9opt(ti)
    assert move is not None and move.gain == 1


def test_restricted_oracle_rejects_foreign_catalogue():
    ti = gen_triangle_instance(si.single_triangle())
    move = restricted_oracle_9opt(ti)
    assert move is not None
    moved = type(ti)(
        ko.apply_move(ti.instance, move), ti.catalogue, ti.names, ti.mode, ti.source
    )
    with pytest.raises(ko.ReductionError):
        restricted_oracle_9opt(moved)


def test_parse_tripartite():
    assert parse_tripartite(si.TRIPARTITE_TEXT) == si.small_tripartite()
    weighted = parse_tripartite("A 1\nB 2\nC 3\nedge 1 2 -4\nedge 2 3\nedge 3 1 1\n")
    assert weighted.weight(2, 1) == -4
    assert weighted.weight(2, 3) == 0
    assert weighted.min_triangle_weight() == -3


@pytest.mark.parametrize("text", ["D 1\n", "A 1\nedge 1\n", "A 1\nedge 1 2 3 4\n"])
def test_parse_tripartite_errors(text):
    with pytest.raises(ko.InstanceFormatError):
        parse_tripartite(text)


def test_triangle_manifest():
    ti = gen_triangle_instance(si.small_tripartite())
    manifest = ti.manifest()
    assert manifest["reduction"] == "triangle"
    assert manifest["mode"] == "unit"
    assert manifest["n"] == 63 == len(manifest["names"])
    assert len(manifest["catalogue"]) == 7
    assert all(len(s["remove"]) == len(s["add"]) == 3 for s in manifest["catalogue"])


@pytest.mark.slow
def test_triangle_iff_move_on_all_small_graphs():
    a, b, c = [0, 1], [2, 3], [4, 5]
    possible = [
        (u, v) for x, y in ((a, b), (b, c), (c, a)) for u, v in itertools.product(x, y)
    ]
    for mask in range(1, 1 << len(possible)):
        edges = [e for i, e in enumerate(possible) if mask >> i & 1]
        t = TripartiteGraph.from_edges(a, b, c, edges)
        found = restricted_oracle_9opt(gen_triangle_instance(t))
        assert (found is not None) == t.has_triangle(), edges


# ------------------------------------------------------------------------------
# Subgraph isomorphism
# ------------------------------------------------------------------------------


def test_subiso_triangle_host_shape():
    sub = gen_subiso_instance(si.triangle_host())
    assert sub.instance.n == 155
    assert sub.choice_gadgets == 9
    assert sub.beta == 165 == sub.instance.total_weight
    assert sub.k == 3
    assert sub.k_prime == k_prime(3) == 52
    assert sub.instance.max_degree <= 3
    assert sorted(sub.instance.tour) == list(range(155))


def test_subiso_witness_move():
    sub = gen_subiso_instance(si.triangle_host())
    (phi,) = list(sub.source.embeddings())
    assert phi == {1: 10, 2: 20, 3: 30}
    cycle = witness_cycle(sub, phi)
    assert sorted(cycle) == list(range(sub.instance.n))
    move = witness_move(sub, phi)
    assert move.gain == 1
    assert move.k <= sub.k_prime
    assert move.resulting_weight == sub.beta - 1
    assert ko.apply_move(sub.instance, move).total_weight == sub.beta - 1


@pytest.mark.parametrize("phi", [{1: 10, 2: 20, 3: 20}, {1: 10, 2: 20}])
def test_witness_rejects_non_embeddings(phi):
    sub = gen_subiso_instance(si.triangle_host())
    with pytest.raises(ko.ReductionError):
        witness_cycle(sub, phi)


def test_subiso_pruned_host_keeps_starting_tour():
    sub = gen_subiso_instance(si.path_host())
    assert sub.source.host.number_of_nodes() == 0
    assert sub.instance.n == 26
    assert sub.choice_gadgets == 3
    assert sub.beta == 30
    assert min_hamiltonian_cycle_weight(sub.instance) == sub.beta


def test_subiso_hexagon_has_no_embedding():
    ph = si.hexagon_host()
    assert ph.pruned().host.number_of_nodes() == 6
    assert list(ph.embeddings()) == []
    sub = gen_subiso_instance(ph)
    assert sub.instance.n == 284
    assert sub.beta == 300 == sub.instance.total_weight
    assert sub.instance.max_degree <= 3


@pytest.mark.slow
def test_subiso_hexagon_has_no_cheaper_tour():
    sub = gen_subiso_instance(si.hexagon_host())
    assert min_hamiltonian_cycle_weight(sub.instance) == sub.beta


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(20))
def test_subiso_cheaper_tour_iff_embedding(seed):
    ph = si.random_triangle_host(seed)
    assert ph.host.number_of_nodes() <= 9
    sub = gen_subiso_instance(ph)
    embeds = next(ph.embeddings(), None) is not None
    expected = sub.beta - 1 if embeds else sub.beta
    assert min_hamiltonian_cycle_weight(sub.instance) == expected


@pytest.mark.slow
def test_subiso_single_edge_reaches_beta_minus_one():
    ph = PatternedHost.from_edges([(1, 2)], {10: 1, 20: 2}, [(10, 20)])
    sub = gen_subiso_instance(ph)
    assert sub.instance.n == 72
    assert sub.beta == 77
    best = min_hamiltonian_cycle_weight(sub.instance, bound=sub.beta - 1)
    assert best == sub.beta - 1
    assert witness_move(sub, {1: 10, 2: 20}).gain == 1


def test_subiso_gadget_names():
    sub = gen_subiso_instance(si.triangle_host())
    gadgets = sub.gadgets()
    assert len(gadgets["D*"]) == 8
    assert len(gadgets["Fv0"]) == 3
    assert len(gadgets["C1"]) == 6
    assert sub.vertex("D*:x:1") in gadgets["D*"]
    manifest = sub.manifest()
    assert (manifest["beta"], manifest["L"], manifest["k_prime"]) == (165, 9, 52)


@pytest.mark.parametrize(
    "pattern,classes,host",
    [
        ([], {10: 1}, []),
        ([(1, 2)], {10: 1}, [(10, 99)]),
        ([(1, 2)], {10: 7}, []),
    ],
)
def test_patterned_host_validation(pattern, classes, host):
    with pytest.raises(ko.ReductionError):
        PatternedHost.from_edges(pattern, classes, host)


def test_parse_patterned_host():
    ph = parse_patterned_host(si.SUBISO_TEXT)
    assert ph.classes == {10: 1, 20: 2, 30: 3}
    assert {frozenset(e) for e in ph.host.edges} == {
        frozenset(e) for e in [(10, 20), (20, 30), (10, 30)]
    }
    assert ph.k == 3


def test_min_hamiltonian_cycle_weight():
    assert min_hamiltonian_cycle_weight(si.k4_heavy()) == 4
    assert min_hamiltonian_cycle_weight(si.prism()) == 6
    with pytest.raises(ko.BudgetExceededError):
        min_hamiltonian_cycle_weight(si.prism(), settings=ko.Settings(hamiltonian_budget=1))


@pytest.mark.parametrize("seed", range(5))
def test_min_hamiltonian_cycle_weight_matches_enumeration(seed):
    inst = si.cubic(8, seed=seed)
    weights = []
    for rest in itertools.permutations(range(1, inst.n)):
        cycle = (0, *rest, 0)
        if all(inst.has_edge(a, b) for a, b in itertools.pairwise(cycle)):
            weights.append(sum(inst.weight(a, b) for a, b in itertools.pairwise(cycle)))
    assert min_hamiltonian_cycle_weight(inst) == min(weights)


def test_min_hamiltonian_cycle_weight_stops_at_bound():
    assert min_hamiltonian_cycle_weight(si.k4_heavy(), bound=100) in (4, 12)
    assert min_hamiltonian_cycle_weight(si.k4_heavy(), bound=4) == 4
