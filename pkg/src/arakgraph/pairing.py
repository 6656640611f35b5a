"""Compactified divisors and Zhang's admissible pairing on a metrized graph.

A compactified divisor is a vertex divisor ``D`` together with a potential
``f``; two of them pair to ``g(D) + f(E) - ∫ g Δf``. Only the graph-side
coefficient is modelled: the underlying Deligne pairing of line bundles on
the generic fiber is not.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from . import admissible as A
from . import metrized as M
from .graph import VertexId
from .metrized import AtVertex, Current, PiecewiseQuadratic


@dataclass(frozen=True, eq=False)
class CompactifiedDivisor:
    divisor: Mapping[VertexId, Fraction]
    potential: PiecewiseQuadratic

    def __post_init__(self):
        g = self.potential.graph
        for v in self.divisor:
            if v not in g.vertex_index:
                raise ValueError(f"divisor references unknown vertex {v!r}")
        object.__setattr__(
            self, "divisor", {v: Fraction(m) for v, m in self.divisor.items() if m}
        )

    @property
    def graph(self):
        return self.potential.graph

    def __add__(self, other: "CompactifiedDivisor") -> "CompactifiedDivisor":
        d = dict(self.divisor)
        for v, m in other.divisor.items():
            d[v] = d.get(v, Fraction(0)) + m
        return CompactifiedDivisor(d, self.potential + other.potential)

    def __mul__(self, c) -> "CompactifiedDivisor":
        c = Fraction(c)
        return CompactifiedDivisor({v: c * m for v, m in self.divisor.items()}, self.potential * c)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def degree(self) -> Fraction:
        return sum(self.divisor.values(), Fraction(0))


@dataclass(frozen=True, eq=False)
class AdmissibleBundle:
    base: CompactifiedDivisor
    label: str


def compactified(P: A.PolarizedMetrizedGraph, divisor=None, potential=None) -> CompactifiedDivisor:
    g = P.graph
    return CompactifiedDivisor(
        dict(divisor or {}),
        potential if potential is not None else PiecewiseQuadratic.constant(g),
    )


def _evaluate_on_divisor(f: PiecewiseQuadratic, D: Mapping[VertexId, Fraction]) -> Fraction:
    return sum((m * f.values[v] for v, m in D.items()), Fraction(0))


def intersection(P: A.PolarizedMetrizedGraph, a: CompactifiedDivisor, b: CompactifiedDivisor) -> Fraction:
    """``(D + f, E + g) = g(D) + f(E) - ∫ g Δf``."""
    if a.graph is not P.graph or b.graph is not P.graph:
        raise ValueError("compactified divisors must live on the polarized graph")
    f, g = a.potential, b.potential
    return (
        _evaluate_on_divisor(g, a.divisor)
        + _evaluate_on_divisor(f, b.divisor)
        - M.integrate(g, M.laplacian_of(f))
    )


def curvature(P: A.PolarizedMetrizedGraph, a: CompactifiedDivisor) -> Current:
    """``δ_D - Δf``; its total mass is ``deg D``."""
    return Current.from_divisor(P.graph, a.divisor) - M.laplacian_of(a.potential)


def admissible_bundle(P: A.PolarizedMetrizedGraph, divisor: Mapping, c=0, label: str = "L_a") -> AdmissibleBundle:
    """``L + c + g_μ(R(L), .)`` for a line bundle with specialization ``divisor``."""
    g = P.graph
    pot = PiecewiseQuadratic.constant(g, c)
    for v, m in divisor.items():
        if m:
            pot = pot + A.green_function(P, AtVertex(v)) * m
    return AdmissibleBundle(CompactifiedDivisor(dict(divisor), pot), label)


def admissible_of_point(P: A.PolarizedMetrizedGraph, x: VertexId) -> AdmissibleBundle:
    """``O(P)_a``: the divisor ``x`` with potential ``g_μ(x, .)``."""
    return admissible_bundle(P, {x: 1}, 0, f"O({x})_a")


def omega_a(P: A.PolarizedMetrizedGraph) -> AdmissibleBundle:
    """``ω_a``: the divisor ``K`` with potential ``c(Γ, K) + g_μ(K, .)``."""
    return admissible_bundle(P, P.K, A.c_constant(P), "omega_a")


def tensor(*bundles: AdmissibleBundle) -> AdmissibleBundle:
    base = bundles[0].base
    for b in bundles[1:]:
        base = base + b.base
    return AdmissibleBundle(base, "(x)".join(b.label for b in bundles))
