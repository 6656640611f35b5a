"""Zhang's admissible theory on a polarized metrized graph.

The Green's function is obtained in closed form from resistances::

    g(x, y) = -r(x, y)/2 + phi(x)/2 + phi(y)/2 - I/2

with ``phi(z) = (r(z, K) + 4 tau) / 2h`` the potential of the admissible
measure and ``I = (phi(K) + 4 tau) / 2h`` its energy. Both defining
properties (``Δ_y g = δ_x - μ`` and ``∫ g μ = 0``) are checked by
:func:`verify_identities`.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from . import metrized as M
from .graph import (
    GraphError,
    VertexId,
    betti_number,
    effective_resistance_vertices,
    green_bilinear,
)
from .metrized import AtVertex, Current, MetrizedGraph, OnEdge, PiecewiseQuadratic, Point


class PolarizationError(GraphError):
    pass


class IdentityViolation(AssertionError):
    def __init__(self, name: str, residual):
        super().__init__(f"identity {name} violated (residual {residual})")
        self.name = name
        self.residual = residual


@dataclass(frozen=True, eq=False)
class PolarizedMetrizedGraph:
    """A metrized graph with an integer divisor ``K`` of degree ``2h - 2``."""

    graph: MetrizedGraph
    K: Mapping[VertexId, int]
    h: int
    _cache: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        K = {}
        for v, k in self.K.items():
            if v not in self.graph.vertex_index:
                raise PolarizationError(f"polarization references unknown vertex {v!r}")
            if Fraction(k).denominator != 1:
                raise PolarizationError(f"K({v!r}) = {k} is not an integer")
            K[v] = int(k)
        for v in self.graph.vertices:
            K.setdefault(v, 0)
        object.__setattr__(self, "K", {v: K[v] for v in self.graph.vertices})
        if self.h < 1:
            raise PolarizationError("genus must be at least 1")
        if sum(K.values()) != 2 * self.h - 2:
            raise PolarizationError(f"deg K = {sum(K.values())} but 2h - 2 = {2 * self.h - 2}")

    @classmethod
    def from_divisor(cls, graph: MetrizedGraph, K: Mapping[VertexId, int]) -> "PolarizedMetrizedGraph":
        deg = sum(int(k) for k in K.values())
        if deg % 2:
            raise PolarizationError(f"deg K = {deg} is odd")
        return cls(graph, K, deg // 2 + 1)

    @classmethod
    def canonical(cls, graph: MetrizedGraph, genera: Mapping[VertexId, int] | None = None):
        """Polarization ``K(x) = v(x) - 2 + 2 q(x)`` from vertex genera ``q``."""
        genera = genera or {}
        K = {v: graph.valence(v) - 2 + 2 * int(genera.get(v, 0)) for v in graph.vertices}
        h = betti_number(graph) + sum(int(genera.get(v, 0)) for v in graph.vertices)
        return cls(graph, K, h)

    @property
    def is_point(self) -> bool:
        return not self.graph.edges

    def scaled(self, factor) -> "PolarizedMetrizedGraph":
        return PolarizedMetrizedGraph(self.graph.scaled(factor), self.K, self.h)

    def memo(self, key, compute):
        if key not in self._cache:
            self._cache[key] = compute()
        return self._cache[key]


def _K_current(P: PolarizedMetrizedGraph) -> Current:
    return Current.from_divisor(P.graph, P.K)


def admissible_measure(P: PolarizedMetrizedGraph) -> Current:
    """μ = (δ_K + 2 μ_can) / 2h."""
    return P.memo(
        "mu",
        lambda: (_K_current(P) + M.canonical_measure(P.graph) * 2) * Fraction(1, 2 * P.h),
    )


def _tau(P: PolarizedMetrizedGraph) -> Fraction:
    return P.memo("tau", lambda: M.tau(P.graph))


def resistance_to_K(P: PolarizedMetrizedGraph, x: Point) -> Fraction:
    r = M.resistance_function(P.graph, x)
    return sum((k * r(AtVertex(v)) for v, k in P.K.items() if k), Fraction(0))


def potential(P: PolarizedMetrizedGraph) -> PiecewiseQuadratic:
    """``phi(z) = ∫ r(z, w) μ(w)``, quadratic on every edge."""

    def build():
        g = P.graph
        acc = PiecewiseQuadratic.constant(g, 4 * _tau(P))
        for v, k in P.K.items():
            if k:
                acc = acc + M.resistance_function(g, AtVertex(v)) * k
        return acc / (2 * P.h)

    return P.memo("phi", build)


def energy(P: PolarizedMetrizedGraph) -> Fraction:
    """``∬ r(x, y) μ(x) μ(y)``."""

    def build():
        phi = potential(P)
        phi_K = sum((k * phi.values[v] for v, k in P.K.items()), Fraction(0))
        return (phi_K + 4 * _tau(P)) / (2 * P.h)

    return P.memo("energy", build)


def _phi_at(P: PolarizedMetrizedGraph, x: Point) -> Fraction:
    return potential(P)(M.check_point(P.graph, x))


def green_admissible(P: PolarizedMetrizedGraph, x: Point, y: Point) -> Fraction:
    x, y = M.check_point(P.graph, x), M.check_point(P.graph, y)
    if isinstance(x, OnEdge) and isinstance(y, AtVertex):
        x, y = y, x
    r = M.resistance_function(P.graph, x)(y)
    return (-r + _phi_at(P, x) + _phi_at(P, y) - energy(P)) / 2


def green_function(P: PolarizedMetrizedGraph, x: Point) -> PiecewiseQuadratic:
    """``y -> g_μ(x, y)``."""
    x = M.check_point(P.graph, x)
    r = M.resistance_function(P.graph, x)
    return (potential(P) - r + (_phi_at(P, x) - energy(P))) / 2


def green_divisor(P: PolarizedMetrizedGraph, D: Mapping[VertexId, Fraction], y: Point) -> Fraction:
    return sum((d * green_admissible(P, AtVertex(v), y) for v, d in D.items() if d), Fraction(0))


def green_pairing(P: PolarizedMetrizedGraph, D: Mapping, E: Mapping) -> Fraction:
    """g_μ extended bilinearly to vertex divisors."""
    return sum((d * green_divisor(P, E, AtVertex(v)) for v, d in D.items() if d), Fraction(0))


def green_diagonal(P: PolarizedMetrizedGraph) -> PiecewiseQuadratic:
    """``y -> g_μ(y, y) = phi(y) - I/2``."""
    return potential(P) - energy(P) / 2


def c_constant(P: PolarizedMetrizedGraph, x: Point | None = None) -> Fraction:
    g = P.graph
    first = AtVertex(g.vertices[0]) if x is None else M.check_point(g, x)
    value = -green_admissible(P, first, first) - green_divisor(P, P.K, first)
    if __debug__ and x is None and len(g.vertices) > 1:
        last = AtVertex(g.vertices[-1])
        assert value == -green_admissible(P, last, last) - green_divisor(P, P.K, last)
    return value


def epsilon(P: PolarizedMetrizedGraph, x: Point | None = None) -> Fraction:
    """ε via ``4(h-1)(g(x,x) + g(K,x)) - g(K,K)``."""
    x = AtVertex(P.graph.vertices[0]) if x is None else M.check_point(P.graph, x)
    return 4 * (P.h - 1) * (green_admissible(P, x, x) + green_divisor(P, P.K, x)) - green_pairing(P, P.K, P.K)


def epsilon_integral(P: PolarizedMetrizedGraph) -> Fraction:
    """ε as ``∫ g(y, y) ((2h-2) μ + δ_K)``."""
    weight = admissible_measure(P) * (2 * P.h - 2) + _K_current(P)
    return M.integrate(green_diagonal(P), weight)


def epsilon_resistance(P: PolarizedMetrizedGraph, x: Point | None = None) -> Fraction:
    """ε as ``2h g(x, K) + r(x, K)``."""
    x = AtVertex(P.graph.vertices[0]) if x is None else M.check_point(P.graph, x)
    return 2 * P.h * green_divisor(P, P.K, x) + resistance_to_K(P, x)


def tau(P: PolarizedMetrizedGraph) -> Fraction:
    return _tau(P)


# -- identity suite -------------------------------------------------------


def random_point(g: MetrizedGraph, rng: random.Random) -> Point:
    if not g.edges or rng.random() < 0.4:
        return AtVertex(rng.choice(g.vertices))
    e = rng.choice(g.edges)
    den = rng.randint(2, 9)
    return M.make_point(g, e.id, e.length * Fraction(rng.randint(1, den - 1), den))


def random_degree_zero_divisor(g: MetrizedGraph, rng: random.Random) -> dict:
    D = {v: Fraction(rng.randint(-3, 3)) for v in g.vertices}
    D[g.vertices[0]] -= sum(D.values())
    return D


def tau_eta_residual(g: MetrizedGraph, x: Point) -> Fraction:
    """``4 tau_cts(x) - eta - ∫ r(x, .) nu`` with ``x`` made a vertex first."""
    x = M.check_point(g, x)
    if isinstance(x, OnEdge):
        sub = M.subdivide_at(g, [x])
        g, x = sub.graph, AtVertex(sub.relabel[x])
    tcts = sum((M.tau_cts(g, x, e.id) for e in g.edges), Fraction(0))
    return 4 * tcts - M.eta(g) - M.integrate(M.resistance_function(g, x), M.foster_measure(g))


@dataclass
class IdentityResult:
    name: str
    residual: Fraction

    @property
    def ok(self) -> bool:
        return self.residual == 0


def _current_residual(a: Current, b: Current) -> Fraction:
    """Zero exactly when the currents agree; otherwise a positive size of ``a - b``."""
    d = a - b
    size = sum((abs(m) for m in d.atoms.values()), Fraction(0))
    for pcs in d.densities.values():
        size += sum((abs(c) for p in pcs.polys for c in p), Fraction(0))
    return size


def verify_identities(
    P: PolarizedMetrizedGraph,
    rng: random.Random | None = None,
    points: Iterable[Point] | None = None,
    n_points: int = 3,
    raise_on_failure: bool = False,
) -> list[IdentityResult]:
    """Evaluate the identities of the admissible theory at sample points.

    Every residual is an exact rational that must be zero. With
    ``raise_on_failure`` the first non-zero residual raises
    :class:`IdentityViolation`.
    """
    rng = rng or random.Random(0)
    g = P.graph
    pts = list(points) if points is not None else [random_point(g, rng) for _ in range(n_points)]
    pts = [M.check_point(g, p) for p in pts] or [AtVertex(g.vertices[0])]
    results: list[IdentityResult] = []

    def record(name, residual):
        results.append(IdentityResult(name, Fraction(residual)))
        if raise_on_failure and residual != 0:
            raise IdentityViolation(name, residual)

    mu = admissible_measure(P)
    mu_can = M.canonical_measure(g)
    eps = epsilon(P)
    tau_ = _tau(P)
    c = c_constant(P)
    nu = M.foster_measure(g)

    record("mass mu_can", mu_can.total_mass() - 1)
    record("mass mu", mu.total_mass() - 1)
    record("foster sum", M.foster_sum(g) - betti_number(g))
    record("epsilon routes (defineeps)", eps - epsilon_integral(P))

    for x in pts:
        tag = f"[x={x}]"
        gx = green_function(P, x)
        rx = M.resistance_function(g, x)
        dirac = Current.dirac(g, x)
        record(f"ZhArGr laplacian {tag}", _current_residual(M.laplacian_of(gx), dirac - mu))
        record(f"ZhArGr normalization {tag}", M.integrate(gx, mu))
        record(f"chinburgrumely {tag}", _current_residual(M.laplacian_of(rx / 2), mu_can - dirac))
        gxx = green_admissible(P, x, x)
        gKx = green_divisor(P, P.K, x)
        record(f"defc {tag}", c + gxx + gKx)
        record(f"epsalt {tag}", eps - epsilon(P, x))
        record(f"mori {tag}", eps - epsilon_resistance(P, x))
        record(f"taualternative {tag}", 2 * resistance_to_K(P, x) + 4 * tau_ - 4 * P.h * gxx - eps)
        record(f"tauandeta {tag}", tau_eta_residual(g, x))
        record(f"tau base point {tag}", M.tau(g, x) - tau_)

    for x, y in zip(pts, pts[1:] + pts[:1]):
        tag = f"[x={x}, y={y}]"
        r = M.resistance(g, x, y)
        gxy = green_admissible(P, x, y)
        record(f"gZhandRes {tag}", r - (green_admissible(P, x, x) - 2 * gxy + green_admissible(P, y, y)))
        record(f"green symmetry {tag}", gxy - green_admissible(P, y, x))

    for v in g.vertices:
        rv = M.resistance_function(g, AtVertex(v))
        lhs = M.vertex_laplacian(rv)
        mu_dis = Current(g, {p: m for p, m in mu_can.atoms.items()})
        rhs = (mu_dis - Current.dirac(g, AtVertex(v))) * 2 + nu
        record(f"discretelaplaceresistance [x={v}]", _current_residual(lhs, rhs))

    for _ in range(2):
        D = random_degree_zero_divisor(g, rng)
        E = random_degree_zero_divisor(g, rng)
        r_DE = sum(
            (D[x] * E[y] * effective_resistance_vertices(g, x, y) for x in g.vertices for y in g.vertices),
            Fraction(0),
        )
        gbar = green_bilinear(g, D, E)
        record("nice (pseudo-inverse vs resistance)", gbar + r_DE / 2)
        record("nice (pseudo-inverse vs admissible)", gbar - green_pairing(P, D, E))

    return results
