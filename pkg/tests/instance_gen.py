"""Seeded random instance generators shared by the property suites.

Every generator takes a ``random.Random`` so failures replay from the
seed printed by the calling test.
"""

from __future__ import annotations

import random

from arbopack import Arc, DirectedView, Edge, MixedGraph, Orientation, ViewArc


def random_mixed_instance(
    rng: random.Random,
    max_v: int = 7,
    max_e: int = 8,
    max_a: int = 10,
    max_k: int = 3,
) -> tuple[MixedGraph, list[str]]:
    n = rng.randint(1, max_v)
    vs = [f"n{i}" for i in range(n)]
    edges = tuple(
        Edge(f"e{i}", rng.choice(vs), rng.choice(vs))
        for i in range(rng.randint(0, max_e))
    )
    arcs = tuple(
        Arc(f"a{i}", rng.choice(vs), rng.choice(vs))
        for i in range(rng.randint(0, max_a))
    )
    g = MixedGraph(tuple(vs), edges, arcs)
    roots = [rng.choice(vs) for _ in range(rng.randint(1, max_k))]
    return g, roots


def random_digraph_instance(
    rng: random.Random, max_v: int = 6, max_a: int = 10, max_k: int = 3
) -> tuple[MixedGraph, list[str]]:
    n = rng.randint(1, max_v)
    vs = [f"n{i}" for i in range(n)]
    arcs = tuple(
        Arc(f"a{i}", rng.choice(vs), rng.choice(vs))
        for i in range(rng.randint(0, max_a))
    )
    g = MixedGraph(tuple(vs), (), arcs)
    roots = [rng.choice(vs) for _ in range(rng.randint(1, max_k))]
    return g, roots


def random_orientation(rng: random.Random, g: MixedGraph) -> Orientation:
    direction = {}
    for e in g.edges:
        direction[e.id] = (e.u, e.v) if rng.random() < 0.5 else (e.v, e.u)
    return Orientation(direction)


def random_view(rng: random.Random, max_v: int = 6, max_a: int = 12) -> DirectedView:
    n = rng.randint(1, max_v)
    vs = [f"n{i}" for i in range(n)]
    arcs = tuple(
        ViewArc(f"a{i}", rng.choice(vs), rng.choice(vs), "arc")
        for i in range(rng.randint(0, max_a))
    )
    return DirectedView(tuple(vs), arcs)


def repeated_root_all_reachable(
    rng: random.Random, max_v: int = 6, max_e: int = 6, max_a: int = 6, max_k: int = 3
) -> tuple[MixedGraph, str, int]:
    """Mixed graph where one root (repeated k times) reaches everything."""
    from arbopack import mixed_reachable_set

    n = rng.randint(1, max_v)
    vs = [f"n{i}" for i in range(n)]
    edges = [
        Edge(f"e{i}", rng.choice(vs), rng.choice(vs))
        for i in range(rng.randint(0, max_e))
    ]
    arcs = [
        Arc(f"a{i}", rng.choice(vs), rng.choice(vs))
        for i in range(rng.randint(0, max_a))
    ]
    r = rng.choice(vs)
    g = MixedGraph(tuple(vs), tuple(edges), tuple(arcs))
    missing = set(vs) - mixed_reachable_set(g, r)
    for idx, v in enumerate(sorted(missing)):
        edges.append(Edge(f"aug{idx}", r, v))
    g = MixedGraph(tuple(vs), tuple(edges), tuple(arcs))
    k = rng.randint(1, max_k)
    return g, r, k
