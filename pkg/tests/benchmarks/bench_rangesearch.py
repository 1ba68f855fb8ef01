import functools
import random

from kopt.rangesearch import PrioritizedPoint, build_range_tree, query_max


def points(n: int, dims: int, seed: int = 0) -> list[PrioritizedPoint]:
    rng = random.Random(seed)
    return [
        PrioritizedPoint(tuple(rng.randrange(n) for _ in range(dims)), rng.randrange(1000), i)
        for i in range(n)
    ]


def boxes(n: int, dims: int, count: int = 500, seed: int = 1) -> list[list[tuple[int, int]]]:
    rng = random.Random(seed)
    return [
        [tuple(sorted((rng.randrange(n), rng.randrange(n)))) for _ in range(dims)]
        for _ in range(count)
    ]


def scan_run(n: int, dims: int):
    pts, queries = points(n, dims), boxes(n, dims)
    for box in queries:
        max(
            (p for p in pts if all(lo <= x <= hi for x, (lo, hi) in zip(p.coords, box))),
            key=lambda p: p.priority,
            default=None,
        )


def tree_run(n: int, dims: int):
    tree = build_range_tree(points(n, dims), dims)
    for box in boxes(n, dims):
        query_max(tree, box)


__benchmarks__ = [
    (
        functools.partial(scan_run, 1000, 2),
        functools.partial(tree_run, 1000, 2),
        "1000 points, 2 dims",
    ),
    (
        functools.partial(scan_run, 4000, 3),
        functools.partial(tree_run, 4000, 3),
        "4000 points, 3 dims",
    ),
]
