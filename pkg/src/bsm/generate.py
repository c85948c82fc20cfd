"""Seeded random instances and graphs for self-tests and experiments."""

from __future__ import annotations

import random

from .hardness import Graph
from .instance import MAN, WOMAN, Instance, Person, make_instance


def random_instance(
    rng: random.Random,
    n_men: int | None = None,
    n_women: int | None = None,
    density: float | None = None,
    max_side: int = 7,
) -> Instance:
    """A random mutual-acceptability instance with list-form preferences.

    ``density`` is the probability that a given man-woman pair find each
    other acceptable; None mixes full lists with sparse ones.
    """
    if n_men is None:
        n_men = rng.randint(1, max_side)
    if n_women is None:
        n_women = rng.randint(1, max_side)
    if density is None:
        density = 1.0 if rng.random() < 0.5 else rng.uniform(0.3, 0.9)
    men = tuple(Person(MAN, f"m{i + 1}") for i in range(n_men))
    women = tuple(Person(WOMAN, f"w{i + 1}") for i in range(n_women))
    accepted = {m: [w for w in women if rng.random() < density] for m in men}
    ranks: dict[Person, dict[Person, int]] = {}
    for m in men:
        order = accepted[m][:]
        rng.shuffle(order)
        ranks[m] = {w: i for i, w in enumerate(order, start=1)}
    for w in women:
        order = [m for m in men if w in accepted[m]]
        rng.shuffle(order)
        ranks[w] = {m: i for i, m in enumerate(order, start=1)}
    return make_instance(men, women, ranks)


def mutual_first_instance(n: int, full: bool = False) -> Instance:
    """Everyone ranks their index partner first; the identity matching is
    the unique stable matching.  ``full`` pads the remaining choices."""
    men = tuple(Person(MAN, f"m{i + 1}") for i in range(n))
    women = tuple(Person(WOMAN, f"w{i + 1}") for i in range(n))
    ranks: dict[Person, dict[Person, int]] = {}
    for i, m in enumerate(men):
        order = [women[i]] + ([w for j, w in enumerate(women) if j != i] if full else [])
        ranks[m] = {w: pos for pos, w in enumerate(order, start=1)}
    for i, w in enumerate(women):
        order = [men[i]] + ([m for j, m in enumerate(men) if j != i] if full else [])
        ranks[w] = {m: pos for pos, m in enumerate(order, start=1)}
    return make_instance(men, women, ranks)


def random_graph(
    rng: random.Random,
    n_vertices: int,
    n_edges: int,
    plant_triangle: bool = False,
) -> Graph:
    """A random simple graph on v1..vn with exactly ``n_edges`` edges when
    that many fit; ``plant_triangle`` forces a triangle on three random
    vertices."""
    vertices = tuple(f"v{i + 1}" for i in range(n_vertices))
    all_pairs = [
        (vertices[i], vertices[j])
        for i in range(n_vertices)
        for j in range(i + 1, n_vertices)
    ]
    chosen: set[tuple[str, str]] = set()
    if plant_triangle:
        a, b, c = sorted(rng.sample(range(n_vertices), 3))
        chosen |= {
            (vertices[a], vertices[b]),
            (vertices[a], vertices[c]),
            (vertices[b], vertices[c]),
        }
    remaining = [p for p in all_pairs if p not in chosen]
    rng.shuffle(remaining)
    while len(chosen) < min(n_edges, len(all_pairs)) and remaining:
        chosen.add(remaining.pop())
    edges = [p for p in all_pairs if p in chosen]
    return Graph.build(vertices, edges)


def random_triangle_free_graph(rng: random.Random, n_vertices: int, n_edges: int) -> Graph:
    """A random bipartite (hence triangle-free) graph."""
    vertices = tuple(f"v{i + 1}" for i in range(n_vertices))
    left = set(rng.sample(range(n_vertices), n_vertices // 2))
    cross = [
        (vertices[i], vertices[j])
        for i in range(n_vertices)
        for j in range(i + 1, n_vertices)
        if (i in left) != (j in left)
    ]
    rng.shuffle(cross)
    picked = set(cross[: min(n_edges, len(cross))])
    edges = [
        (vertices[i], vertices[j])
        for i in range(n_vertices)
        for j in range(i + 1, n_vertices)
        if (vertices[i], vertices[j]) in picked
    ]
    return Graph.build(vertices, edges)
