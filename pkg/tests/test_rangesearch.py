from hypothesis import given, strategies as st
import pytest

from kopt.rangesearch import (
    PrioritizedPoint,
    build_pair_structure,
    build_range_tree,
    pair_query_disjoint,
    pair_query_nested,
    query_max,
    query_max_excluding,
)

coord = st.integers(min_value=0, max_value=6)
interval = st.tuples(coord, coord).map(lambda t: (min(t), max(t)))


def points(dims: int):
    return st.lists(
        st.tuples(st.tuples(*[coord] * dims), st.integers(min_value=-5, max_value=5)),
        max_size=25,
    ).map(lambda raw: [PrioritizedPoint(c, p, i) for i, (c, p) in enumerate(raw)])


def inside(p: PrioritizedPoint, box) -> bool:
    return all(lo <= c <= hi for c, (lo, hi) in zip(p.coords, box))


def linear_best(pts, box, dim=None, forbidden=()):
    found = [
        p for p in pts if inside(p, box) and (dim is None or p.coords[dim] not in forbidden)
    ]
    return min(found, key=lambda p: (-p.priority, p.payload), default=None)


@pytest.mark.parametrize("dims", [1, 2, 3])
@given(data=st.data())
def test_query_max_matches_linear_scan(dims, data):
    pts = data.draw(points(dims))
    box = data.draw(st.tuples(*[interval] * dims))
    tree = build_range_tree(pts, dims)
    assert len(tree) == len(pts)
    assert query_max(tree, box) == linear_best(pts, box)


@pytest.mark.parametrize("dims,dim", [(1, 0), (2, 0), (2, 1), (3, 2)])
@given(data=st.data())
def test_query_max_excluding_matches_linear_scan(dims, dim, data):
    pts = data.draw(points(dims))
    box = data.draw(st.tuples(*[interval] * dims))
    forbidden = data.draw(st.sets(coord, max_size=2))
    tree = build_range_tree(pts, dims, distinct_dim=dim)
    assert query_max_excluding(tree, box, dim, forbidden) == linear_best(
        pts, box, dim, forbidden
    )


def test_ties_go_to_smaller_payload():
    tree = build_range_tree(
        [PrioritizedPoint((1, 1), 3, "b"), PrioritizedPoint((2, 2), 3, "a")], 2
    )
    best = query_max(tree, ((0, 5), (0, 5)))
    assert best is not None and best.payload == "a"
    assert query_max(tree, ((0, 1), (0, 5))) == PrioritizedPoint((1, 1), 3, "b")
    assert query_max(tree, ((3, 5), (0, 5))) is None


def test_excluding_checks_its_tree():
    pts = [PrioritizedPoint((1, 1), 0, 0)]
    with pytest.raises(ValueError):
        query_max_excluding(build_range_tree(pts, 2), ((0, 2), (0, 2)), 0, [1])
    tree = build_range_tree(pts, 2, distinct_dim=0)
    with pytest.raises(ValueError):
        query_max_excluding(tree, ((0, 2), (0, 2)), 1, [1])
    with pytest.raises(ValueError):
        query_max_excluding(tree, ((0, 2), (0, 2)), 0, [1, 2, 3])


@pytest.mark.parametrize(
    "pts,dims",
    [
        ([PrioritizedPoint((1,), 0)], 2),
        ([], 0),
    ],
)
def test_rejects_mismatched_dimensions(pts, dims):
    with pytest.raises(ValueError):
        build_range_tree(pts, dims)


p_points = st.lists(st.tuples(coord, coord, coord), max_size=12)
q_points = st.lists(st.tuples(coord, coord), max_size=12)


@given(p_points, q_points, interval, interval, interval, interval)
def test_pair_query_disjoint(P, Q, rx, ryp, ryq, rz):
    def ok(i, j):
        p, q = P[i], Q[j]
        return inside_p(p, rx, ryp, rz) and inside_q(q, rx, ryq) and p[0] < q[0]

    found = pair_query_disjoint(build_pair_structure(P, Q), rx, ryp, ryq, rz)
    exists = any(ok(i, j) for i in range(len(P)) for j in range(len(Q)))
    assert (found is not None) == exists
    if found is not None:
        assert ok(*found)


@given(p_points, q_points, interval, interval, interval)
def test_pair_query_nested(P, Q, rx, ry, rz):
    def ok(i, j):
        p, q = P[i], Q[j]
        return (
            inside_p(p, rx, ry, rz)
            and inside_q(q, rx, ry)
            and p[0] < q[0]
            and p[1] < q[1]
        )

    found = pair_query_nested(build_pair_structure(P, Q), rx, ry, rz)
    exists = any(ok(i, j) for i in range(len(P)) for j in range(len(Q)))
    assert (found is not None) == exists
    if found is not None:
        assert ok(*found)


def inside_p(p, rx, ry, rz) -> bool:
    return rx[0] <= p[0] <= rx[1] and ry[0] <= p[1] <= ry[1] and rz[0] <= p[2] <= rz[1]


def inside_q(q, rx, ry) -> bool:
    return rx[0] <= q[0] <= rx[1] and ry[0] <= q[1] <= ry[1]
