"""Weighted multigraphs, the discrete Laplacian and its pseudo-inverse.

Every scalar is an exact :class:`~fractions.Fraction`. Loops and parallel
edges are allowed; a loop contributes nothing to the Laplacian and parallel
edges add their conductances ``1/length``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Hashable, Iterable, Mapping, Sequence

from . import linalg

VertexId = Hashable
EdgeId = Hashable
VertexDivisor = Mapping[VertexId, Fraction]


class GraphError(ValueError):
    """Base class for invalid graph input."""


class DisconnectedGraph(GraphError):
    pass


class NonPositiveLength(GraphError):
    pass


class DanglingEndpoint(GraphError):
    pass


class DuplicateId(GraphError):
    pass


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings; floats are refused."""
    if isinstance(value, float):
        raise TypeError(f"refusing inexact float {value!r}; pass a Fraction or 'p/q' string")
    if isinstance(value, bool):
        raise TypeError("booleans are not lengths")
    return Fraction(value)


@dataclass(frozen=True)
class Edge:
    id: EdgeId
    tail: VertexId  # e^-
    head: VertexId  # e^+
    length: Fraction

    @property
    def is_loop(self) -> bool:
        return self.tail == self.head

    def other(self, v: VertexId) -> VertexId:
        return self.head if v == self.tail else self.tail


@dataclass(frozen=True, eq=False)
class WeightedMultigraph:
    """A finite connected multigraph with positive rational edge lengths.

    ``vertices`` and ``edges`` keep declaration order; all derived matrices
    index vertices in that order. Instances are immutable, and the Laplacian
    and its pseudo-inverse are computed once per instance on first use.
    """

    vertices: tuple[VertexId, ...]
    edges: tuple[Edge, ...]
    _edge_index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.vertices:
            raise GraphError("a graph needs at least one vertex")
        if len(set(self.vertices)) != len(self.vertices):
            raise DuplicateId("duplicate vertex id")
        vset = set(self.vertices)
        index = {}
        for e in self.edges:
            if e.id in index:
                raise DuplicateId(f"duplicate edge id {e.id!r}")
            if e.tail not in vset or e.head not in vset:
                raise DanglingEndpoint(f"edge {e.id!r} references an undeclared vertex")
            if e.length <= 0:
                raise NonPositiveLength(f"edge {e.id!r} has length {e.length}")
            index[e.id] = e
        object.__setattr__(self, "_edge_index", index)
        if not _is_connected(self.vertices, self.edges):
            raise DisconnectedGraph("graph is not connected")

    # -- basic structure -------------------------------------------------

    def edge(self, eid: EdgeId) -> Edge:
        try:
            return self._edge_index[eid]
        except KeyError:
            raise KeyError(f"unknown edge {eid!r}") from None

    def has_edge(self, eid: EdgeId) -> bool:
        return eid in self._edge_index

    @cached_property
    def vertex_index(self) -> dict[VertexId, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def incident(self) -> dict[VertexId, tuple[Edge, ...]]:
        out: dict[VertexId, list[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            out[e.tail].append(e)
            if not e.is_loop:
                out[e.head].append(e)
        return {v: tuple(es) for v, es in out.items()}

    def valence(self, v: VertexId) -> int:
        """Number of emanating directions at ``v``; a loop counts twice."""
        return sum(2 if e.is_loop else 1 for e in self.incident[v])

    @property
    def volume(self) -> Fraction:
        return sum((e.length for e in self.edges), Fraction(0))

    def scaled(self, factor) -> "WeightedMultigraph":
        factor = as_fraction(factor)
        return WeightedMultigraph(
            self.vertices,
            tuple(Edge(e.id, e.tail, e.head, e.length * factor) for e in self.edges),
        )

    def reversed(self) -> "WeightedMultigraph":
        return WeightedMultigraph(
            self.vertices,
            tuple(Edge(e.id, e.head, e.tail, e.length) for e in self.edges),
        )

    def without_edge(self, eid: EdgeId) -> tuple[tuple[VertexId, ...], tuple[Edge, ...]]:
        """Raw vertex/edge lists with ``eid`` removed (may be disconnected)."""
        return self.vertices, tuple(e for e in self.edges if e.id != eid)

    # -- linear algebra --------------------------------------------------

    @cached_property
    def laplacian(self) -> tuple[tuple[Fraction, ...], ...]:
        n = len(self.vertices)
        idx = self.vertex_index
        mat = [[Fraction(0)] * n for _ in range(n)]
        for e in self.edges:
            if e.is_loop:
                continue
            c = 1 / e.length
            i, j = idx[e.tail], idx[e.head]
            mat[i][i] += c
            mat[j][j] += c
            mat[i][j] -= c
            mat[j][i] -= c
        return tuple(tuple(row) for row in mat)

    @cached_property
    def pseudo_inverse(self) -> tuple[tuple[Fraction, ...], ...]:
        # column x solves L u = delta_x - 1/n, sum(u) = 0; the last Laplacian
        # row is redundant (rows sum to zero) and carries the constraint instead
        n = len(self.vertices)
        a = [list(row) for row in self.laplacian]
        a[-1] = [Fraction(1)] * n
        rhs = []
        for x in range(n):
            b = [Fraction(-1, n)] * n
            b[x] += 1
            b[-1] = Fraction(0)
            rhs.append(b)
        cols = linalg.solve(a, rhs)
        return tuple(tuple(cols[x][y] for x in range(n)) for y in range(n))


def _is_connected(vertices: Sequence[VertexId], edges: Iterable[Edge]) -> bool:
    adj: dict[VertexId, set] = {v: set() for v in vertices}
    for e in edges:
        adj[e.tail].add(e.head)
        adj[e.head].add(e.tail)
    start = vertices[0]
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(vertices)


def build_graph(vertices: Sequence[VertexId], edges: Iterable) -> WeightedMultigraph:
    """Validate raw vertex and edge lists into a :class:`WeightedMultigraph`.

    ``edges`` holds ``(tail, head, length)`` or ``(id, tail, head, length)``
    tuples; edges without an id are numbered by position.
    """
    built = []
    for k, raw in enumerate(edges):
        if isinstance(raw, Edge):
            built.append(Edge(raw.id, raw.tail, raw.head, as_fraction(raw.length)))
            continue
        if len(raw) == 3:
            eid, (tail, head, length) = k, raw
        elif len(raw) == 4:
            eid, tail, head, length = raw
        else:
            raise GraphError(f"cannot read edge {raw!r}")
        length = as_fraction(length)
        if length <= 0:
            raise NonPositiveLength(f"edge {eid!r} has length {length}")
        built.append(Edge(eid, tail, head, length))
    return WeightedMultigraph(tuple(vertices), tuple(built))


def laplacian(g: WeightedMultigraph) -> tuple[tuple[Fraction, ...], ...]:
    return g.laplacian


def green_pseudoinverse(g: WeightedMultigraph, x: VertexId, y: VertexId) -> Fraction:
    idx = g.vertex_index
    return g.pseudo_inverse[idx[x]][idx[y]]


def green_bilinear(g: WeightedMultigraph, d: VertexDivisor, e: VertexDivisor) -> Fraction:
    total = Fraction(0)
    for x, dx in d.items():
        if not dx:
            continue
        for y, ey in e.items():
            if ey:
                total += dx * ey * green_pseudoinverse(g, x, y)
    return total


def effective_resistance_vertices(g: WeightedMultigraph, x: VertexId, y: VertexId) -> Fraction:
    if x == y:
        return Fraction(0)
    pinv = g.pseudo_inverse
    i, j = g.vertex_index[x], g.vertex_index[y]
    return pinv[i][i] - 2 * pinv[i][j] + pinv[j][j]


def betti_number(g: WeightedMultigraph) -> int:
    return len(g.edges) - len(g.vertices) + 1


def weighted_tree_count(g: WeightedMultigraph) -> Fraction:
    """Sum over spanning trees of the product of conductances ``1/length``.

    Computed as the determinant of the Laplacian with its first row and
    column removed (matrix-tree theorem).
    """
    minor = [list(row[1:]) for row in g.laplacian[1:]]
    return linalg.determinant(minor)

