"""Seeded generators for random test graphs and fibers.

All generators take a :class:`random.Random` so results are reproducible
from a seed. Lengths are rationals with numerator and denominator at most
``max_term``. Loops and parallel edges occur with positive probability.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .admissible import PolarizedMetrizedGraph
from .degeneration import NodalFiberSpec
from .graph import Edge, WeightedMultigraph


def random_length(rng: random.Random, max_term: int = 20) -> Fraction:
    return Fraction(rng.randint(1, max_term), rng.randint(1, max_term))


def random_topology(rng: random.Random, max_vertices: int = 8, max_edges: int = 14) -> tuple[list, list]:
    """A connected multigraph as ``(vertices, [(tail, head), ...])``.

    A random spanning tree is laid first, then extra edges (possibly loops
    or parallel edges) are added up to a random total.
    """
    n = rng.randint(1, max_vertices)
    vertices = [f"v{i}" for i in range(n)]
    pairs = []
    for i in range(1, n):
        pairs.append((vertices[rng.randrange(i)], vertices[i]))
    total = rng.randint(max(n - 1, 1), max(max_edges, n - 1))
    while len(pairs) < total:
        a, b = rng.choice(vertices), rng.choice(vertices)
        pairs.append((a, b))
    rng.shuffle(pairs)
    # random orientation
    pairs = [(b, a) if rng.random() < 0.5 else (a, b) for a, b in pairs]
    return vertices, pairs


def random_graph(rng: random.Random, max_vertices: int = 8, max_edges: int = 14, max_term: int = 20):
    vertices, pairs = random_topology(rng, max_vertices, max_edges)
    edges = tuple(Edge(f"e{k}", a, b, random_length(rng, max_term)) for k, (a, b) in enumerate(pairs))
    return WeightedMultigraph(tuple(vertices), edges)


def random_genera(rng: random.Random, g: WeightedMultigraph, max_genus: int = 2) -> dict:
    """Vertex genera making ``K = v - 2 + 2q`` effective and ``h >= 1``."""
    genera = {}
    for v in g.vertices:
        low = 1 if g.valence(v) < 2 else 0
        genera[v] = rng.randint(low, max(low, max_genus))
    if len(g.edges) - len(g.vertices) + 1 + sum(genera.values()) == 0:
        genera[rng.choice(g.vertices)] += 1
    return genera


def random_polarized_graph(rng: random.Random, max_vertices: int = 8, max_edges: int = 14, max_term: int = 20):
    g = random_graph(rng, max_vertices, max_edges, max_term)
    return PolarizedMetrizedGraph.canonical(g, random_genera(rng, g))


def random_fiber(rng: random.Random, max_components: int = 6, max_nodes: int = 8, max_multiplicity: int = 5) -> NodalFiberSpec:
    """A semistable fiber with up to two sections."""
    vertices, pairs = random_topology(rng, max_components, max_nodes)
    g = WeightedMultigraph(tuple(vertices), tuple(Edge(k, a, b, Fraction(1)) for k, (a, b) in enumerate(pairs)))
    genera = random_genera(rng, g)
    components = tuple((v, genera[v]) for v in vertices)
    nodes = tuple((f"n{k}", a, b, rng.randint(1, max_multiplicity)) for k, (a, b) in enumerate(pairs))
    sections = {"P": rng.choice(vertices), "Q": rng.choice(vertices)}
    return NodalFiberSpec(components, nodes, sections)
