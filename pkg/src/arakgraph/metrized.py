"""Harmonic analysis on the metric realization of a weighted graph.

A weighted graph doubles as its metrized graph: every edge ``e`` is the
segment ``[0, length(e)]`` glued at its endpoints, with the arc-length
coordinate ``s`` measured from the tail ``e^-``. Functions on the metrized
graph are piecewise quadratic in ``s`` (one :class:`~arakgraph.poly.Pieces`
per edge); currents are finite sums of point masses plus piecewise
polynomial densities against ``ds``.
"""

from __future__ import annotations

import math
import weakref
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Union

from . import poly as P
from .graph import (
    Edge,
    EdgeId,
    VertexId,
    WeightedMultigraph,
    _is_connected,
    as_fraction,
    betti_number,
    effective_resistance_vertices,
)
from .poly import Pieces

MetrizedGraph = WeightedMultigraph


# -- points ---------------------------------------------------------------


@dataclass(frozen=True)
class AtVertex:
    vertex: VertexId

    def __str__(self):
        return str(self.vertex)


@dataclass(frozen=True)
class OnEdge:
    """Interior point at distance ``s`` from the tail of ``edge``."""

    edge: EdgeId
    s: Fraction

    def __str__(self):
        return f"edge:{self.edge}@{self.s}"


Point = Union[AtVertex, OnEdge]


class InvalidPoint(ValueError):
    pass


def make_point(g: MetrizedGraph, where, s=None) -> Point:
    """Build a point: a vertex id, or an edge id together with ``s``.

    Positions at an end of the edge are returned as :class:`AtVertex`.
    """
    if s is None:
        if isinstance(where, (AtVertex, OnEdge)):
            return check_point(g, where)
        if where not in g.vertex_index:
            raise InvalidPoint(f"unknown vertex {where!r}")
        return AtVertex(where)
    if not g.has_edge(where):
        raise InvalidPoint(f"unknown edge {where!r}")
    e = g.edge(where)
    s = as_fraction(s)
    if s == 0:
        return AtVertex(e.tail)
    if s == e.length:
        return AtVertex(e.head)
    if not 0 < s < e.length:
        raise InvalidPoint(f"position {s} outside edge {where!r} of length {e.length}")
    return OnEdge(where, s)


def check_point(g: MetrizedGraph, p: Point) -> Point:
    if isinstance(p, AtVertex):
        if p.vertex not in g.vertex_index:
            raise InvalidPoint(f"unknown vertex {p.vertex!r}")
        return p
    return make_point(g, p.edge, p.s)


# -- subdivision ----------------------------------------------------------


@dataclass(frozen=True)
class SubVertex:
    edge: EdgeId
    s: Fraction

    def __str__(self):
        return f"{self.edge}@{self.s}"


@dataclass(frozen=True)
class SubEdge:
    edge: EdgeId
    index: int

    def __str__(self):
        return f"{self.edge}#{self.index}"


@dataclass(frozen=True, eq=False)
class Subdivision:
    """A refinement of ``base`` in which chosen points became vertices."""

    base: MetrizedGraph
    graph: MetrizedGraph
    cuts: Mapping[EdgeId, tuple[Fraction, ...]]
    relabel: Mapping[Point, VertexId] = field(default_factory=dict)

    def point(self, p: Point) -> Point:
        """Image of a base point on the refined graph."""
        if isinstance(p, AtVertex):
            return p
        cuts = self.cuts.get(p.edge, ())
        if not cuts:
            return p
        if p.s in cuts:
            return AtVertex(SubVertex(p.edge, p.s))
        k = sum(1 for c in cuts if c < p.s)
        start = cuts[k - 1] if k else Fraction(0)
        return OnEdge(SubEdge(p.edge, k), p.s - start)

    def fold(self, f: "PiecewiseQuadratic") -> "PiecewiseQuadratic":
        """Express a function on the refined graph on the base graph."""
        edges = {}
        for e in self.base.edges:
            cuts = self.cuts.get(e.id, ())
            if not cuts:
                edges[e.id] = f.edges[e.id]
                continue
            pts = [Fraction(0), *cuts, e.length]
            lengths = [b - a for a, b in zip(pts[:-1], pts[1:])]
            parts = [f.edges[SubEdge(e.id, k)] for k in range(len(lengths))]
            edges[e.id] = P.concatenate(lengths, parts)
        values = {v: f.values[v] for v in self.base.vertices}
        return PiecewiseQuadratic(self.base, values, edges)

    def lift(self, f: "PiecewiseQuadratic") -> "PiecewiseQuadratic":
        """Restrict a base function to the edges of the refined graph."""
        edges = {}
        values = dict(f.values)
        for e in self.base.edges:
            cuts = self.cuts.get(e.id, ())
            pieces = f.edges[e.id]
            if not cuts:
                edges[e.id] = pieces
                continue
            pts = [Fraction(0), *cuts, e.length]
            for k, (a, b) in enumerate(zip(pts[:-1], pts[1:])):
                inner = pieces.refine([a, b])
                sub_cuts = tuple(c - a for c in inner.cuts if a < c < b)
                sub_polys = tuple(
                    P.shift(p, a) for (lo, hi), p in zip(inner.bounds, inner.polys) if a <= lo and hi <= b
                )
                edges[SubEdge(e.id, k)] = Pieces(b - a, sub_cuts, sub_polys)
            for c in cuts:
                values[SubVertex(e.id, c)] = pieces(c)
        return PiecewiseQuadratic(self.graph, values, edges)


def subdivide_at(g: MetrizedGraph, pts: Iterable[Point]) -> Subdivision:
    """Promote the interior points among ``pts`` to vertices.

    The refined graph is isometric to ``g``. Vertices keep their ids; a new
    vertex is a :class:`SubVertex` and the pieces of a cut edge are
    :class:`SubEdge` values, numbered from the tail.
    """
    pts = [check_point(g, p) for p in pts]
    cuts: dict[EdgeId, set] = {}
    for p in pts:
        if isinstance(p, OnEdge):
            cuts.setdefault(p.edge, set()).add(p.s)
    if not cuts:
        return Subdivision(g, g, {}, {p: p.vertex for p in pts})
    vertices = list(g.vertices)
    edges = []
    sorted_cuts = {}
    for e in g.edges:
        cs = tuple(sorted(cuts.get(e.id, ())))
        if not cs:
            edges.append(e)
            continue
        sorted_cuts[e.id] = cs
        chain = [e.tail, *(SubVertex(e.id, c) for c in cs), e.head]
        vertices.extend(chain[1:-1])
        pos = [Fraction(0), *cs, e.length]
        for k in range(len(cs) + 1):
            edges.append(Edge(SubEdge(e.id, k), chain[k], chain[k + 1], pos[k + 1] - pos[k]))
    refined = WeightedMultigraph(tuple(vertices), tuple(edges))
    relabel = {
        p: (p.vertex if isinstance(p, AtVertex) else SubVertex(p.edge, p.s)) for p in pts
    }
    return Subdivision(g, refined, sorted_cuts, relabel)


# -- function space -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PiecewiseQuadratic:
    """A continuous function on the metrized graph, quadratic on each piece.

    ``values`` holds the value at every vertex and ``edges`` the piecewise
    polynomial in ``s`` on every edge. Construction checks continuity at
    both ends of every edge.
    """

    graph: MetrizedGraph
    values: Mapping[VertexId, Fraction]
    edges: Mapping[EdgeId, Pieces]

    def __post_init__(self):
        g = self.graph
        if set(self.values) != set(g.vertices) or set(self.edges) != {e.id for e in g.edges}:
            raise ValueError("function must be given on every vertex and edge")
        for e in g.edges:
            pcs = self.edges[e.id]
            if pcs.length != e.length:
                raise ValueError(f"edge {e.id!r}: wrong interval length")
            if pcs.max_degree() > 2:
                raise ValueError(f"edge {e.id!r}: degree above 2")
            if P.evaluate(pcs.polys[0], 0) != self.values[e.tail]:
                raise ValueError(f"discontinuity at tail of edge {e.id!r}")
            if P.evaluate(pcs.polys[-1], e.length) != self.values[e.head]:
                raise ValueError(f"discontinuity at head of edge {e.id!r}")
            for c, left, right in zip(pcs.cuts, pcs.polys, pcs.polys[1:]):
                if P.evaluate(left, c) != P.evaluate(right, c):
                    raise ValueError(f"discontinuity inside edge {e.id!r} at {c}")

    @classmethod
    def constant(cls, g: MetrizedGraph, c=0) -> "PiecewiseQuadratic":
        c = Fraction(c)
        return cls(
            g,
            {v: c for v in g.vertices},
            {e.id: Pieces.single(e.length, P.poly(c)) for e in g.edges},
        )

    @classmethod
    def from_edge_polys(cls, g: MetrizedGraph, polys: Mapping[EdgeId, tuple], values=None):
        """Build from one polynomial per edge; vertex values are read off."""
        vals = dict(values or {})
        for e in g.edges:
            p = P.poly(*polys[e.id])
            vals.setdefault(e.tail, P.evaluate(p, 0))
            vals.setdefault(e.head, P.evaluate(p, e.length))
        for v in g.vertices:
            vals.setdefault(v, Fraction(0))
        return cls(g, vals, {e.id: Pieces.single(e.length, P.poly(*polys[e.id])) for e in g.edges})

    def __call__(self, p: Point) -> Fraction:
        if isinstance(p, AtVertex):
            return self.values[p.vertex]
        return self.edges[p.edge](p.s)

    def _zip(self, other: "PiecewiseQuadratic", op, vop) -> "PiecewiseQuadratic":
        if other.graph is not self.graph:
            raise ValueError("functions live on different graphs")
        return PiecewiseQuadratic(
            self.graph,
            {v: vop(self.values[v], other.values[v]) for v in self.graph.vertices},
            {k: self.edges[k].combine(other.edges[k], op) for k in self.edges},
        )

    def __add__(self, other):
        if not isinstance(other, PiecewiseQuadratic):
            return self + PiecewiseQuadratic.constant(self.graph, other)
        return self._zip(other, P.add, lambda a, b: a + b)

    __radd__ = __add__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, c):
        c = Fraction(c)
        return PiecewiseQuadratic(
            self.graph,
            {v: c * a for v, a in self.values.items()},
            {k: pcs.map(lambda p: P.scale(p, c)) for k, pcs in self.edges.items()},
        )

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1 / Fraction(c))

    def __eq__(self, other):
        if not isinstance(other, PiecewiseQuadratic) or other.graph is not self.graph:
            return NotImplemented
        return dict(self.values) == dict(other.values) and all(
            self.edges[k].simplified() == other.edges[k].simplified() for k in self.edges
        )

    __hash__ = None

    def outgoing_derivative(self, e: Edge, at_tail: bool) -> Fraction:
        """One-sided derivative at an endpoint of ``e`` pointing into ``e``."""
        pcs = self.edges[e.id]
        if at_tail:
            return P.evaluate(P.derivative(pcs.polys[0]), 0)
        return -P.evaluate(P.derivative(pcs.polys[-1]), e.length)


# -- currents -------------------------------------------------------------


def _clean_atoms(atoms: Mapping[Point, Fraction]) -> dict:
    return {p: Fraction(m) for p, m in atoms.items() if m != 0}


@dataclass(frozen=True, eq=False)
class Current:
    """A linear functional on functions: point masses plus edge densities."""

    graph: MetrizedGraph
    atoms: Mapping[Point, Fraction] = field(default_factory=dict)
    densities: Mapping[EdgeId, Pieces] = field(default_factory=dict)

    def __post_init__(self):
        atoms = {}
        for p, m in self.atoms.items():
            p = check_point(self.graph, p)
            atoms[p] = atoms.get(p, Fraction(0)) + Fraction(m)
        object.__setattr__(self, "atoms", _clean_atoms(atoms))
        dens = {}
        for k, pcs in self.densities.items():
            if pcs.length != self.graph.edge(k).length:
                raise ValueError(f"density on edge {k!r} has the wrong length")
            pcs = pcs.simplified()
            if not pcs.is_zero():
                dens[k] = pcs
        object.__setattr__(self, "densities", dens)

    @classmethod
    def dirac(cls, g: MetrizedGraph, p: Point, mass=1) -> "Current":
        return cls(g, {check_point(g, p): Fraction(mass)})

    @classmethod
    def from_divisor(cls, g: MetrizedGraph, d: Mapping[VertexId, Fraction]) -> "Current":
        return cls(g, {AtVertex(v): Fraction(m) for v, m in d.items()})

    @classmethod
    def zero(cls, g: MetrizedGraph) -> "Current":
        return cls(g)

    def total_mass(self) -> Fraction:
        return sum(self.atoms.values(), Fraction(0)) + sum(
            (pcs.integral() for pcs in self.densities.values()), Fraction(0)
        )

    def __add__(self, other: "Current") -> "Current":
        if other.graph is not self.graph:
            raise ValueError("currents live on different graphs")
        atoms = dict(self.atoms)
        for p, m in other.atoms.items():
            atoms[p] = atoms.get(p, Fraction(0)) + m
        dens = dict(self.densities)
        for k, pcs in other.densities.items():
            dens[k] = dens[k] + pcs if k in dens else pcs
        return Current(self.graph, atoms, dens)

    def __mul__(self, c) -> "Current":
        c = Fraction(c)
        return Current(
            self.graph,
            {p: c * m for p, m in self.atoms.items()},
            {k: pcs.map(lambda q: P.scale(q, c)) for k, pcs in self.densities.items()},
        )

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, Current) or other.graph is not self.graph:
            return NotImplemented
        return self.atoms == other.atoms and self.densities == other.densities

    __hash__ = None

    def vertex_part(self) -> dict[VertexId, Fraction]:
        return {p.vertex: m for p, m in self.atoms.items() if isinstance(p, AtVertex)}


# -- cached per-graph data ------------------------------------------------

_foster_cache: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()
_rfun_cache: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()


def _fosters(g: MetrizedGraph) -> dict[EdgeId, Fraction]:
    try:
        return _foster_cache[g]
    except KeyError:
        pass
    out = {}
    for e in g.edges:
        if e.is_loop:
            out[e.id] = Fraction(1)
        else:
            # r(e-, e+) in the full graph is the parallel combination of
            # length(e) and r(e), so F(e) = 1 - r(e-, e+)/length(e)
            out[e.id] = 1 - effective_resistance_vertices(g, e.tail, e.head) / e.length
    _foster_cache[g] = out
    return out


# -- operations -----------------------------------------------------------


def resistance(g: MetrizedGraph, x: Point, y: Point) -> Fraction:
    """Effective resistance between two points of the metrized graph."""
    x, y = check_point(g, x), check_point(g, y)
    if x == y:
        return Fraction(0)
    sub = subdivide_at(g, [x, y])
    return effective_resistance_vertices(sub.graph, sub.relabel[x], sub.relabel[y])


def bridge_resistance(g: MetrizedGraph, eid: EdgeId) -> Fraction | float:
    """Resistance between the endpoints of ``eid`` once its interior is removed.

    Returns ``math.inf`` when the removal disconnects the graph.
    """
    e = g.edge(eid)
    if e.is_loop:
        return Fraction(0)
    vertices, edges = g.without_edge(eid)
    if not _is_connected(vertices, edges):
        return math.inf
    return effective_resistance_vertices(WeightedMultigraph(vertices, edges), e.tail, e.head)


def foster_coefficient(g: MetrizedGraph, eid: EdgeId) -> Fraction:
    g.edge(eid)
    return _fosters(g)[eid]


def canonical_measure(g: MetrizedGraph) -> Current:
    atoms = {AtVertex(v): Fraction(2 - g.valence(v), 2) for v in g.vertices}
    fosters = _fosters(g)
    dens = {e.id: Pieces.single(e.length, P.poly(fosters[e.id] / e.length)) for e in g.edges}
    return Current(g, atoms, dens)


def foster_measure(g: MetrizedGraph) -> Current:
    """Vertex measure with mass ``sum F(e)`` over emanating directions."""
    fosters = _fosters(g)
    atoms: dict[Point, Fraction] = {}
    for e in g.edges:
        for v in (e.tail, e.head):
            atoms[AtVertex(v)] = atoms.get(AtVertex(v), Fraction(0)) + fosters[e.id]
    return Current(g, atoms)


def _vertex_resistance_function(g: MetrizedGraph, x: VertexId) -> PiecewiseQuadratic:
    fosters = _fosters(g)
    values = {v: effective_resistance_vertices(g, x, v) for v in g.vertices}
    polys = {}
    for e in g.edges:
        lo, hi, ln, f = values[e.tail], values[e.head], e.length, fosters[e.id]
        polys[e.id] = (lo, (hi - lo) / ln + f, -f / ln)
    return PiecewiseQuadratic.from_edge_polys(g, polys, values)


def resistance_function(g: MetrizedGraph, x: Point) -> PiecewiseQuadratic:
    """The function ``y -> r(x, y)``.

    On an edge ``e`` not containing ``x`` in its interior,
    ``r = r(x,e-)(l-s)/l + r(x,e+)s/l + F(e)s(l-s)/l``. For an interior
    ``x`` the graph is refined at ``x`` first and the result folded back,
    so the edge through ``x`` carries two pieces.
    """
    x = check_point(g, x)
    cache = _rfun_cache.setdefault(g, {})
    if x in cache:
        return cache[x]
    if isinstance(x, AtVertex):
        out = _vertex_resistance_function(g, x.vertex)
    else:
        sub = subdivide_at(g, [x])
        out = sub.fold(_vertex_resistance_function(sub.graph, sub.relabel[x]))
    cache[x] = out
    return out


def laplacian_of(f: PiecewiseQuadratic) -> Current:
    """Δf: minus the sum of outgoing slopes at vertices and kinks, and ``-f''``."""
    g = f.graph
    atoms: dict[Point, Fraction] = {AtVertex(v): Fraction(0) for v in g.vertices}
    dens = {}
    for e in g.edges:
        atoms[AtVertex(e.tail)] -= f.outgoing_derivative(e, at_tail=True)
        atoms[AtVertex(e.head)] -= f.outgoing_derivative(e, at_tail=False)
        pcs = f.edges[e.id]
        for c, left, right in zip(pcs.cuts, pcs.polys, pcs.polys[1:]):
            jump = P.evaluate(P.derivative(right), c) - P.evaluate(P.derivative(left), c)
            atoms[OnEdge(e.id, c)] = -jump
        dens[e.id] = pcs.map(lambda p: P.scale(P.derivative(P.derivative(p)), -1))
    return Current(g, atoms, dens)


def integrate(f: PiecewiseQuadratic, m: Current) -> Fraction:
    """Pair a function with a current."""
    if f.graph is not m.graph:
        raise ValueError("function and current live on different graphs")
    total = sum((mass * f(p) for p, mass in m.atoms.items()), Fraction(0))
    for k, pcs in m.densities.items():
        total += f.edges[k].integral_against(pcs)
    return total


def tau_cts(g: MetrizedGraph, x: Point, eid: EdgeId) -> Fraction:
    """Half the integral of ``r(x, .)`` over ``eid`` against the edge part of μ_can."""
    x = check_point(g, x)
    e = g.edge(eid)
    f = _fosters(g)[eid]
    if isinstance(x, OnEdge) and x.edge == eid:
        dens = Current(g, {}, {eid: Pieces.single(e.length, P.poly(f / e.length))})
        return integrate(resistance_function(g, x), dens) / 2
    r = resistance_function(g, x)
    lo, hi = r(AtVertex(e.tail)), r(AtVertex(e.head))
    return f * (lo + hi + f * e.length / 3) / 4


def tau(g: MetrizedGraph, base: Point | None = None) -> Fraction:
    """Half the integral of ``r(x, .)`` against μ_can; independent of ``x``."""
    mu = canonical_measure(g)
    x = base if base is not None else AtVertex(g.vertices[0])
    value = integrate(resistance_function(g, x), mu) / 2
    if __debug__ and base is None and len(g.vertices) > 1:
        other = integrate(resistance_function(g, AtVertex(g.vertices[-1])), mu) / 2
        assert other == value, "tau depends on the base point"
    return value


def eta_edge(g: MetrizedGraph, eid: EdgeId) -> Fraction:
    e = g.edge(eid)
    return _fosters(g)[eid] ** 2 * e.length / 3


def eta(g: MetrizedGraph) -> Fraction:
    return sum((eta_edge(g, e.id) for e in g.edges), Fraction(0))


def foster_sum(g: MetrizedGraph) -> Fraction:
    return sum(_fosters(g).values(), Fraction(0))


def vertex_laplacian(f: PiecewiseQuadratic) -> Current:
    """The vertex measure of the discrete Laplacian applied to ``f`` on vertices."""
    g = f.graph
    vals = [f.values[v] for v in g.vertices]
    atoms = {
        AtVertex(v): sum((a * b for a, b in zip(row, vals)), Fraction(0))
        for v, row in zip(g.vertices, g.laplacian)
    }
    return Current(g, atoms)


__all__ = [
    "AtVertex",
    "Current",
    "InvalidPoint",
    "MetrizedGraph",
    "OnEdge",
    "PiecewiseQuadratic",
    "Point",
    "SubEdge",
    "SubVertex",
    "Subdivision",
    "betti_number",
    "bridge_resistance",
    "canonical_measure",
    "check_point",
    "eta",
    "eta_edge",
    "foster_coefficient",
    "foster_measure",
    "foster_sum",
    "integrate",
    "laplacian_of",
    "make_point",
    "resistance",
    "resistance_function",
    "subdivide_at",
    "tau",
    "tau_cts",
    "vertex_laplacian",
]
