"""Seeded random instance generators shared by the test modules."""

from __future__ import annotations

import random

from perigid.colored_graph import ColoredGraph, EdgeSubset
from perigid.sparsity import (
    find_laman_circuit,
    is_11k,
    is_colored_laman,
    is_colored_laman_sparse,
    laman_sparse_subset,
)


def random_graph(
    rng: random.Random,
    nmax: int = 5,
    mmax: int | None = None,
    color_range: int = 2,
    n: int | None = None,
    m: int | None = None,
) -> ColoredGraph:
    if n is None:
        n = rng.randint(1, nmax)
    if m is None:
        m = rng.randint(0, mmax if mmax is not None else 2 * n + 2)
    edges = []
    for _ in range(m):
        u, v = rng.randrange(n), rng.randrange(n)
        edges.append((u, v, (rng.randint(-color_range, color_range), rng.randint(-color_range, color_range))))
    return ColoredGraph.build(n, edges)


def random_laman_graph(rng: random.Random, n: int) -> ColoredGraph:
    """Grow a random colored-Laman graph greedily edge by edge."""
    target = 2 * n + 1
    for _ in range(40):  # independent restarts
        edges: list[tuple[int, int, tuple[int, int]]] = []
        for _ in range(300 + 200 * n):
            u, v = rng.randrange(n), rng.randrange(n)
            c = (rng.randint(-2, 2), rng.randint(-2, 2))
            if u == v and c == (0, 0):
                continue
            candidate = ColoredGraph.build(n, edges + [(u, v, c)])
            if laman_sparse_subset(candidate, candidate.edge_ids()):
                edges.append((u, v, c))
                if len(edges) == target:
                    graph = ColoredGraph.build(n, edges)
                    assert is_colored_laman(graph)
                    return graph
    raise RuntimeError(f"could not grow a colored-Laman graph on {n} vertices")


def random_circuit_graph(rng: random.Random, nmax: int = 4) -> ColoredGraph:
    """A colored-Laman circuit, extracted from a random non-sparse graph."""
    while True:
        g = random_graph(rng, nmax=nmax)
        if g.m and not is_colored_laman_sparse(g):
            report = find_laman_circuit(g)
            sub, _ = g.induced(report.circuit.ids)
            return ColoredGraph.build(
                sub.n, [(e.tail, e.head, tuple(e.color)) for e in sub.edges]
            )


def random_tree_edges(rng: random.Random, n: int, color_range: int = 2):
    edges = []
    for v in range(1, n):
        u = rng.randrange(v)
        edges.append((u, v, (rng.randint(-color_range, color_range), rng.randint(-color_range, color_range))))
    return edges


def random_11k(rng: random.Random, n: int, k: int) -> ColoredGraph:
    """Random (1,1,k)-graph on n vertices (spanning tree plus k extras)."""
    while True:
        edges = random_tree_edges(rng, n)
        for _ in range(k):
            u, v = rng.randrange(n), rng.randrange(n)
            edges.append((u, v, (rng.randint(-2, 2), rng.randint(-2, 2))))
        g = ColoredGraph.build(n, edges)
        ok, kk = is_11k(EdgeSubset.full(g))
        if ok and kk == k:
            return g


def random_non_11k(rng: random.Random, n: int, k: int) -> ColoredGraph:
    """Graph with cycle-image rank k and m = n - 1 + k that is not (1,1,k)."""
    from perigid.colored_graph import scan_subset, image_rank

    while True:
        g = random_graph(rng, n=n, m=n - 1 + k)
        rank = image_rank(scan_subset(EdgeSubset.full(g)).images)
        ok, _ = is_11k(EdgeSubset.full(g))
        if rank == k and not ok:
            return g


def random_reversal(rng: random.Random, g: ColoredGraph) -> ColoredGraph:
    ids = [e.id for e in g.edges if rng.random() < 0.5]
    return g.with_reversed(ids)


def random_potential(rng: random.Random, g: ColoredGraph) -> ColoredGraph:
    mu = [(rng.randint(-2, 2), rng.randint(-2, 2)) for _ in range(g.n)]
    return g.with_potential(mu)


def random_relabel(rng: random.Random, g: ColoredGraph) -> ColoredGraph:
    perm = list(range(g.n))
    rng.shuffle(perm)
    return g.with_relabeled(perm)


TRANSFORMS = (random_reversal, random_potential, random_relabel)


def random_transform(rng: random.Random, g: ColoredGraph) -> ColoredGraph:
    return rng.choice(TRANSFORMS)(rng, g)
