"""From the special fiber of a semistable degeneration to graph invariants.

A fiber is described by its irreducible components (with geometric
genera), its nodes (with the multiplicity ``n`` of the local equation
``xy = t^n``) and the components onto which named sections specialize.
Its dual graph has one vertex per component and one edge of length ``n``
per node, polarized by ``K(x) = v(x) - 2 + 2 q(x)``.

The coefficients reported here are the rational multiples of the boundary
divisor ``[0]`` appearing in the Lear extensions, and the slopes of
``log|t|`` in the leading asymptotics of the Faltings delta-invariant and
of the Arakelov metric and Green's function.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Mapping

from . import admissible as A
from . import metrized as M
from .graph import (
    Edge,
    GraphError,
    WeightedMultigraph,
    betti_number,
    effective_resistance_vertices,
    weighted_tree_count,
)
from .metrized import AtVertex, Current, OnEdge, Point
from .poly import Pieces, poly


class FiberError(GraphError):
    pass


class NonSemistable(FiberError):
    pass


class GenusZero(FiberError):
    pass


class MissingSection(FiberError):
    pass


class CoincidentSections(FiberError):
    pass


@dataclass(frozen=True, eq=False)
class NodalFiberSpec:
    """Components ``(id, genus)``, nodes ``(id, a, b, multiplicity)`` and sections."""

    components: tuple[tuple[Hashable, int], ...]
    nodes: tuple[tuple[Hashable, Hashable, Hashable, int], ...]
    sections: Mapping[str, Hashable] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "components", tuple((c, int(q)) for c, q in self.components))
        object.__setattr__(self, "nodes", tuple((n, a, b, int(m)) for n, a, b, m in self.nodes))
        object.__setattr__(self, "sections", dict(self.sections))
        ids = [c for c, _ in self.components]
        if len(set(ids)) != len(ids):
            raise FiberError("duplicate component id")
        for c, q in self.components:
            if q < 0:
                raise FiberError(f"component {c!r} has negative genus {q}")
        for n, _, _, m in self.nodes:
            if m < 1:
                raise FiberError(f"node {n!r} has non-positive multiplicity {m}")
        for name, c in self.sections.items():
            if c not in set(ids):
                raise FiberError(f"section {name!r} specializes to unknown component {c!r}")
        self.dual_graph  # validates connectivity and endpoints

    def _key(self):
        return self.components, self.nodes, frozenset(self.sections.items())

    def __eq__(self, other):
        if not isinstance(other, NodalFiberSpec):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    @property
    def genera(self) -> dict:
        return dict(self.components)

    @property
    def dual_graph(self) -> WeightedMultigraph:
        try:
            return self.__dict__["_dual"]
        except KeyError:
            pass
        g = WeightedMultigraph(
            tuple(c for c, _ in self.components),
            tuple(Edge(n, a, b, Fraction(m)) for n, a, b, m in self.nodes),
        )
        self.__dict__["_dual"] = g
        return g

    @property
    def genus(self) -> int:
        return betti_number(self.dual_graph) + sum(q for _, q in self.components)

    def section(self, name: str) -> Hashable:
        try:
            return self.sections[name]
        except KeyError:
            raise MissingSection(f"fiber has no section named {name!r}") from None


def polarized_graph_of(fiber: NodalFiberSpec) -> A.PolarizedMetrizedGraph:
    try:
        return fiber.__dict__["_polarized"]
    except KeyError:
        pass
    g = fiber.dual_graph
    genera = fiber.genera
    if fiber.genus < 1:
        raise GenusZero("the fiber has arithmetic genus 0")
    for v in g.vertices:
        if g.valence(v) - 2 + 2 * genera[v] < 0:
            raise NonSemistable(f"component {v!r} is a genus-0 component meeting the rest in one point")
    P = A.PolarizedMetrizedGraph.canonical(g, genera)
    fiber.__dict__["_polarized"] = P
    return P


def _fresh(name: str, taken: set) -> str:
    while name in taken:
        name += "'"
    taken.add(name)
    return name


def desingularize_with_chains(fiber: NodalFiberSpec) -> tuple[NodalFiberSpec, dict]:
    """:func:`desingularize`, also returning each node's chain of new node ids.

    The chain of a node lists the replacing nodes in order from its first
    endpoint; untouched nodes map to ``[node]``.
    """
    taken = {str(c) for c, _ in fiber.components} | {str(n) for n, *_ in fiber.nodes}
    components = list(fiber.components)
    nodes = []
    chains = {}
    for n, a, b, m in fiber.nodes:
        if m == 1:
            nodes.append((n, a, b, 1))
            chains[n] = [n]
            continue
        comps = [a] + [_fresh(f"{n}@{k}", taken) for k in range(1, m)] + [b]
        components.extend((c, 0) for c in comps[1:-1])
        chains[n] = []
        for k in range(m):
            nid = _fresh(f"{n}#{k}", taken)
            chains[n].append(nid)
            nodes.append((nid, comps[k], comps[k + 1], 1))
    return NodalFiberSpec(tuple(components), tuple(nodes), dict(fiber.sections)), chains


def desingularize(fiber: NodalFiberSpec) -> NodalFiberSpec:
    """Replace every node of multiplicity ``n`` by a chain of ``n - 1`` rational curves.

    New components are named ``"{node}@{k}"`` and new nodes ``"{node}#{k}"``,
    counted from the first endpoint of the node.
    """
    return desingularize_with_chains(fiber)[0]


def desingularized_point(smooth: NodalFiberSpec, chains: Mapping, p: Point) -> Point:
    """Image of a point of the original dual graph on the desingularized one."""
    if isinstance(p, AtVertex):
        return p
    chain = chains[p.edge]
    k = int(p.s)  # unit-length pieces
    if p.s == k:
        return AtVertex(smooth.dual_graph.edge(chain[k]).tail)
    return OnEdge(chain[k], p.s - k)


@dataclass(frozen=True)
class LearReport:
    """Boundary coefficients of Lear extensions, as multiples of ``[0]``.

    ``None`` marks a coefficient needing a section that was not supplied.
    """

    omegaOmega: Fraction
    POmega: Fraction | None = None
    QOmega: Fraction | None = None
    PQ: Fraction | None = None
    kappaB: Fraction | None = None
    deltaB: Fraction | None = None
    deltaPBsq: Fraction | None = None
    deltaPBsq_ofLears: Fraction | None = None

    TAGS = {
        "omegaOmega": "Lear extension of <omega,omega>: kappa_1 - eps[0]",
        "POmega": "Lear extension of <O(P),omega>: psi - g_mu(x,x)[0]",
        "QOmega": "Lear extension of <O(Q),omega>: psi - g_mu(y,y)[0]",
        "PQ": "Lear extension of <O(P),O(Q)>: <O(P),O(Q)> + g_mu(x,y)[0]",
        "kappaB": "Lear extension of kappa^*B: -g_mu((2h-2)x-K,(2h-2)x-K)[0]",
        "deltaB": "Lear extension of delta^*B: -r(x,y)[0]",
        "deltaPBsq": "Lear extension of <delta_P^*B,delta_P^*B>: -(4h g_mu(x,x)+eps)[0]",
        "deltaPBsq_ofLears": "pairing of Lear extensions of delta_P^*B: -(4h g_mu(x,x)+eps-eta)[0]",
    }

    def items(self):
        for name in self.TAGS:
            value = getattr(self, name)
            if value is not None:
                yield name, value


def lear_coefficients(fiber: NodalFiberSpec, P: str | None = None, Q: str | None = None) -> LearReport:
    PG = polarized_graph_of(fiber)
    h = PG.h
    eps = A.epsilon(PG)
    out: dict = {"omegaOmega": -eps}
    if P is not None:
        x = AtVertex(fiber.section(P))
        gxx = A.green_admissible(PG, x, x)
        out["POmega"] = -gxx
        E = {v: -Fraction(k) for v, k in PG.K.items()}
        E[x.vertex] += 2 * h - 2
        out["kappaB"] = -A.green_pairing(PG, E, E)
        out["deltaPBsq"] = -(4 * h * gxx + eps)
        smooth = polarized_graph_of(desingularize(fiber))
        out["deltaPBsq_ofLears"] = -(4 * h * gxx + eps - M.eta(smooth.graph))
    if Q is not None:
        if P is None:
            raise MissingSection("Q-coefficients need a section P as well")
        y = AtVertex(fiber.section(Q))
        out["QOmega"] = -A.green_admissible(PG, y, y)
        out["PQ"] = A.green_admissible(PG, x, y)
        out["deltaB"] = -effective_resistance_vertices(PG.graph, x.vertex, y.vertex)
    return LearReport(**out)


@dataclass(frozen=True)
class AsymptoticsReport:
    """Leading behaviour ``δ_F(X_t) ~ -(δ + ε) log|t| - 6 log det Im Ω(t)``."""

    deltaSlope: Fraction
    volume: Fraction
    epsilon: Fraction
    bettiNumber: int
    treeConstant: Fraction
    note: str


def delta_asymptotics(fiber: NodalFiberSpec) -> AsymptoticsReport:
    PG = polarized_graph_of(fiber)
    g = PG.graph
    volume = g.volume
    eps = A.epsilon(PG)
    b1 = betti_number(g)
    if b1 == 0:
        note = "tree: log det Im Omega(t) stays bounded"
    else:
        note = f"non-tree: log det Im Omega(t) = {b1}*log(-log|t|) + O(1)"
    return AsymptoticsReport(volume + eps, volume, eps, b1, weighted_tree_count(g), note)


@dataclass(frozen=True)
class ArakelovSlopes:
    """``log||dz(P)||_Ar ~ metricSlope log|t|`` and ``g_Ar(P,Q) ~ greenSlope log|t|``."""

    metricSlope: Fraction
    greenSlope: Fraction | None = None


def arakelov_asymptotics(fiber: NodalFiberSpec, P: str, Q: str | None = None) -> ArakelovSlopes:
    PG = polarized_graph_of(fiber)
    x = AtVertex(fiber.section(P))
    metric = -A.green_admissible(PG, x, x)
    if Q is None:
        return ArakelovSlopes(metric)
    if Q == P:
        raise CoincidentSections(f"sections {P!r} and {Q!r} coincide")
    y = AtVertex(fiber.section(Q))
    return ArakelovSlopes(metric, A.green_admissible(PG, x, y))


def split_edge_graph(fiber: NodalFiberSpec, node, a, b) -> tuple[WeightedMultigraph, str]:
    """Dual graph with every edge scaled by ``a + b`` and ``node`` split at a new vertex.

    The split node of length ``m`` becomes ``tail -- y -- head`` with lengths
    ``a m`` and ``b m``. Returns the graph and the id of ``y``.
    """
    a, b = Fraction(a), Fraction(b)
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    g = fiber.dual_graph
    e = g.edge(node)
    y = _fresh("y", {str(v) for v in g.vertices})
    edges = []
    for f in g.edges:
        if f.id == node:
            edges.append(Edge((node, "w"), e.tail, y, a * e.length))
            edges.append(Edge((node, "z"), y, e.head, b * e.length))
        else:
            edges.append(Edge(f.id, f.tail, f.head, f.length * (a + b)))
    return WeightedMultigraph(g.vertices + (y,), tuple(edges)), y


def split_edge_resistance(fiber: NodalFiberSpec, node, a, b, x) -> Fraction:
    """Resistance from vertex ``x`` to the splitting vertex, computed on the split graph."""
    g, y = split_edge_graph(fiber, node, a, b)
    return effective_resistance_vertices(g, x, y)


def split_edge_formula(fiber: NodalFiberSpec, node, a, b, x) -> Fraction:
    """``r(x,z) a + r(x,w) b + F(e) m ab/(a+b)`` on the unscaled dual graph.

    ``w`` is the tail and ``z`` the head of the node, ``m`` its multiplicity.
    """
    a, b = Fraction(a), Fraction(b)
    g = fiber.dual_graph
    e = g.edge(node)
    r_w = effective_resistance_vertices(g, x, e.tail)
    r_z = effective_resistance_vertices(g, x, e.head)
    return r_z * a + r_w * b + M.foster_coefficient(g, node) * e.length * a * b / (a + b)


def limit_measure(fiber: NodalFiberSpec) -> Current:
    """``(sum q(x) δ_x + sum F(e) dy_e / length(e)) / h`` on the dual graph."""
    PG = polarized_graph_of(fiber)
    g = PG.graph
    h = PG.h
    atoms = {AtVertex(c): Fraction(q, h) for c, q in fiber.components}
    dens = {
        e.id: Pieces.single(e.length, poly(M.foster_coefficient(g, e.id) / (h * e.length)))
        for e in g.edges
    }
    return Current(g, atoms, dens)
