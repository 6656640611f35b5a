import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import samples
from arakgraph import (
    AtVertex,
    Current,
    OnEdge,
    PolarizedMetrizedGraph,
    admissible_measure,
    c_constant,
    epsilon,
    green_admissible,
    green_function,
    integrate,
    laplacian_of,
    resistance,
    verify_identities,
)
from arakgraph import admissible as A
from arakgraph.graph import build_graph
from arakgraph.metrized import make_point

F = Fraction
V = AtVertex


def loop_genus(q, length=1):
    g = samples.unit_loop(length)
    return PolarizedMetrizedGraph.from_divisor(g, {"v": 2 * q})


def bridge_genera(i, j, length=1):
    return PolarizedMetrizedGraph.canonical(samples.bridge(length), {"a": i, "b": j})


# -- polarization ---------------------------------------------------------


def test_polarization_validation():
    g = samples.bridge()
    with pytest.raises(A.PolarizationError):
        PolarizedMetrizedGraph.from_divisor(g, {"a": 1})
    with pytest.raises(A.PolarizationError):
        PolarizedMetrizedGraph.from_divisor(g, {"z": 2})
    with pytest.raises(A.PolarizationError):
        PolarizedMetrizedGraph(g, {"a": 0}, 0)
    with pytest.raises(A.PolarizationError):
        PolarizedMetrizedGraph(g, {"a": 1, "b": 1}, 3)
    P = PolarizedMetrizedGraph.from_divisor(g, {"a": 3, "b": -1})
    assert P.h == 2


# -- admissible measure ---------------------------------------------------


def test_measure_unit_loop_genus_one():
    P = PolarizedMetrizedGraph.from_divisor(samples.unit_loop(), {})
    mu = admissible_measure(P)
    assert mu.atoms == {}
    assert mu.densities[0].simplified().polys == ((1,),)


def test_measure_bridge_genera_one_one():
    mu = admissible_measure(bridge_genera(1, 1))
    assert mu.atoms == {V("a"): F(1, 2), V("b"): F(1, 2)}
    assert mu.densities == {}


@pytest.mark.parametrize("q", [1, 2, 5])
def test_measure_loop_with_vertex_genus(q):
    mu = admissible_measure(loop_genus(q))
    assert mu.atoms == {V("v"): F(q, q + 1)}
    assert mu.densities[0].simplified().polys == ((F(1, q + 1),),)
    assert mu.total_mass() == 1


# -- Green's function -----------------------------------------------------


def test_green_unit_loop():
    P = PolarizedMetrizedGraph.from_divisor(samples.unit_loop(), {})
    assert green_admissible(P, V("v"), V("v")) == F(1, 12)
    for d in (F(1, 5), F(1, 2), F(2, 3)):
        assert green_admissible(P, V("v"), OnEdge(0, d)) == F(1, 12) - d * (1 - d) / 2
    gv = green_function(P, V("v"))
    assert gv.edges[0].simplified().polys == ((F(1, 12), F(-1, 2), F(1, 2)),)


def test_green_translation_invariant_on_circle():
    P = PolarizedMetrizedGraph.from_divisor(samples.unit_loop(3), {})
    x, y = OnEdge(0, F(1, 2)), OnEdge(0, F(2))
    assert green_admissible(P, x, y) == green_admissible(P, V("v"), OnEdge(0, F(3, 2)))


@pytest.mark.parametrize("h", range(2, 8))
def test_green_bridge(h):
    for i in range(1, h):
        P = bridge_genera(i, h - i)
        assert green_admissible(P, V("a"), V("a")) == F((h - i) ** 2, h**2)
        assert green_admissible(P, V("a"), V("b")) == F(-i * (h - i), h**2)


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_green_defining_conditions(data):
    P = data.draw(samples.polarized_graphs())
    g = P.graph
    mu = admissible_measure(P)
    for _ in range(2):
        x = data.draw(samples.points(g))
        gx = green_function(P, x)
        assert laplacian_of(gx) == Current.dirac(g, x) - mu
        assert integrate(gx, mu) == 0


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_green_symmetry_and_resistance(data):
    P = data.draw(samples.polarized_graphs())
    g = P.graph
    x, y = data.draw(samples.points(g)), data.draw(samples.points(g))
    gxy = green_admissible(P, x, y)
    assert gxy == green_admissible(P, y, x)
    assert green_function(P, x)(y) == gxy
    assert resistance(g, x, y) == green_admissible(P, x, x) - 2 * gxy + green_admissible(P, y, y)


# -- c and epsilon --------------------------------------------------------


def test_c_examples():
    P = PolarizedMetrizedGraph.from_divisor(samples.unit_loop(), {})
    assert c_constant(P) == F(-1, 12)
    # bridge with genera (1,1): g(a,a) = 1/4 and g(K,a) = g(a,a) + g(b,a) = 0
    assert c_constant(bridge_genera(1, 1)) == F(-1, 4)


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_c_is_independent_of_the_point(data):
    P = data.draw(samples.polarized_graphs())
    g = P.graph
    c = c_constant(P)
    pts = [V(v) for v in g.vertices] + [data.draw(samples.points(g)) for _ in range(3)]
    for x in pts:
        assert c == c_constant(P, x)
        assert c + green_admissible(P, x, x) + A.green_divisor(P, P.K, x) == 0


@pytest.mark.parametrize("h", range(2, 11))
def test_epsilon_loop(h):
    assert epsilon(loop_genus(h - 1)) == F(h - 1, 3 * h)


def test_epsilon_loop_genus_two():
    assert epsilon(loop_genus(1)) == F(1, 6)


@pytest.mark.parametrize("h", range(2, 11))
def test_epsilon_bridge(h):
    for i in range(1, h):
        assert epsilon(bridge_genera(i, h - i)) == -1 + F(4 * i * (h - i), h)


def test_epsilon_bridge_genus_two():
    assert epsilon(bridge_genera(1, 1)) == 1


def test_epsilon_point_graph():
    P = PolarizedMetrizedGraph.canonical(build_graph(["p"], []), {"p": 3})
    assert P.is_point
    assert epsilon(P) == 0
    assert A.tau(P) == 0
    assert green_admissible(P, V("p"), V("p")) == 0


@settings(max_examples=25, deadline=None)
@given(st.lists(samples.lengths, min_size=1, max_size=6))
def test_epsilon_vanishes_in_genus_one(lengths):
    # with K effective, genus one forces a cycle with K = 0
    n = len(lengths)
    vs = [f"v{i}" for i in range(n)]
    g = build_graph(vs, [(vs[i], vs[(i + 1) % n], ell) for i, ell in enumerate(lengths)])
    P = PolarizedMetrizedGraph.canonical(g, {})
    assert P.h == 1 and set(P.K.values()) == {0}
    assert epsilon(P) == 0


def test_epsilon_vanishes_on_genus_one_point():
    assert epsilon(PolarizedMetrizedGraph.canonical(build_graph(["p"], []), {"p": 1})) == 0


@settings(max_examples=25, deadline=None)
@given(samples.polarized_graphs())
def test_epsilon_routes_agree(P):
    eps = epsilon(P)
    assert eps == A.epsilon_integral(P)
    for v in P.graph.vertices:
        assert eps == epsilon(P, V(v))
        assert eps == A.epsilon_resistance(P, V(v))


@settings(max_examples=25, deadline=None)
@given(samples.polarized_graphs(), st.fractions(min_value=F(1, 10), max_value=10, max_denominator=10))
def test_epsilon_scales_linearly(P, lam):
    if lam <= 0:
        return
    Q = P.scaled(lam)
    assert epsilon(Q) == lam * epsilon(P)
    assert A.epsilon_integral(Q) == lam * A.epsilon_integral(P)
    assert A.epsilon_resistance(Q) == lam * A.epsilon_resistance(P)


@settings(max_examples=40, deadline=None)
@given(samples.polarized_graphs())
def test_epsilon_positivity(P):
    eps = epsilon(P)
    assert eps >= 0
    if P.h >= 2 and not P.is_point:
        assert eps > 0


# -- identity suite -------------------------------------------------------


def _all_ok(results):
    bad = [r for r in results if not r.ok]
    assert not bad, bad[:3]


def test_identities_unit_loop():
    P = PolarizedMetrizedGraph.from_divisor(samples.unit_loop(), {})
    _all_ok(verify_identities(P, rng=random.Random(1), n_points=5))


def test_identities_bridge_genera_two_one():
    P = bridge_genera(2, 1)
    assert P.h == 3
    _all_ok(verify_identities(P, rng=random.Random(2)))
    assert epsilon(P) == F(5, 3)


def test_identities_random_five_by_eight():
    rng = random.Random(58)
    vs = [f"v{i}" for i in range(5)]
    edges = [(vs[i], vs[i + 1], F(rng.randint(1, 20), rng.randint(1, 20))) for i in range(4)]
    edges += [(rng.choice(vs), rng.choice(vs), F(rng.randint(1, 20), rng.randint(1, 20))) for _ in range(4)]
    g = build_graph(vs, edges)
    P = PolarizedMetrizedGraph.canonical(g, {v: rng.randint(0, 2) for v in vs})
    _all_ok(verify_identities(P, rng=rng))


def test_identities_include_interior_points():
    P = PolarizedMetrizedGraph.canonical(samples.triangle_with_tail(), {"d": 1})
    g = P.graph
    pts = [make_point(g, 1, F(1, 3)), make_point(g, 4, F(1, 4)), V("a")]
    _all_ok(verify_identities(P, points=pts))


def test_raise_on_failure_reports_name(monkeypatch):
    P = bridge_genera(1, 1)
    monkeypatch.setattr(A, "c_constant", lambda P, x=None: F(0))
    with pytest.raises(A.IdentityViolation) as info:
        verify_identities(P, raise_on_failure=True)
    assert info.value.name.startswith("defc")
