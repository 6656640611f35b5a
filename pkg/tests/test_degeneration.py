import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import samples
from arakgraph import (
    AtVertex,
    NodalFiberSpec,
    admissible_measure,
    arakelov_asymptotics,
    delta_asymptotics,
    desingularize,
    epsilon,
    eta,
    lear_coefficients,
    limit_measure,
    polarized_graph_of,
    split_edge_resistance,
)
from arakgraph import admissible as A
from arakgraph import degeneration as D
from arakgraph.randomgraphs import random_fiber

F = Fraction
V = AtVertex


# -- dual graph -----------------------------------------------------------


def test_separating_dual_graph():
    P = polarized_graph_of(samples.separating_fiber())
    assert P.h == 2
    assert P.K == {"a": 1, "b": 1}
    assert [e.length for e in P.graph.edges] == [1]


def test_loop_dual_graph():
    P = polarized_graph_of(samples.loop_fiber())
    assert P.h == 2
    assert P.K == {"v": 2}
    assert P.graph.edges[0].is_loop


def test_smooth_dual_graph():
    P = polarized_graph_of(samples.smooth_fiber())
    assert P.is_point and P.h == 1 and P.K == {"c": 0}


def test_fiber_validation():
    with pytest.raises(D.NonSemistable):
        polarized_graph_of(NodalFiberSpec((("a", 0), ("b", 1)), (("n", "a", "b", 1),)))
    with pytest.raises(D.GenusZero):
        polarized_graph_of(NodalFiberSpec((("a", 0),), ()))
    with pytest.raises(D.FiberError):
        NodalFiberSpec((("a", 1),), (("n", "a", "a", 0),))
    with pytest.raises(D.FiberError):
        NodalFiberSpec((("a", 1),), (), {"P": "zz"})
    with pytest.raises(D.MissingSection):
        lear_coefficients(samples.separating_fiber(), "R")
    with pytest.raises(D.MissingSection):
        lear_coefficients(samples.separating_fiber(), None, "Q")
    with pytest.raises(D.CoincidentSections):
        arakelov_asymptotics(samples.separating_fiber(), "P", "P")


# -- desingularization ----------------------------------------------------


def test_desingularize_bridge_of_multiplicity_three():
    smooth = desingularize(samples.separating_fiber(m=3))
    assert smooth.components == (("a", 1), ("b", 1), ("n@1", 0), ("n@2", 0))
    path = [(a, b, m) for _, a, b, m in smooth.nodes]
    assert path == [("a", "n@1", 1), ("n@1", "n@2", 1), ("n@2", "b", 1)]


def test_desingularize_is_idempotent_on_reduced_fibers():
    f = samples.separating_fiber()
    assert desingularize(f) == f


def test_desingularize_double_self_node():
    f = samples.loop_fiber(m=2)
    smooth = desingularize(f)
    assert len(smooth.nodes) == 2
    P0, P1 = polarized_graph_of(f), polarized_graph_of(smooth)
    assert epsilon(P0) == epsilon(P1)
    assert A.tau(P0) == A.tau(P1)
    assert A.green_admissible(P0, V("v"), V("v")) == A.green_admissible(P1, V("v"), V("v"))
    # the model changes eta
    assert eta(P0.graph) == F(2, 3) and eta(P1.graph) == F(1, 6)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_desingularization_invariance(seed):
    rng = random.Random(seed)
    f = random_fiber(rng, max_components=4, max_nodes=5, max_multiplicity=3)
    assert samples.desingularization_mismatches(f, rng, n_points=2) == []


# -- Lear coefficients ----------------------------------------------------


def test_lear_separating_genus_two():
    lr = lear_coefficients(samples.separating_fiber(), "P", "Q")
    assert lr.omegaOmega == -1
    assert lr.POmega == F(-1, 4)
    assert lr.PQ == F(-1, 4)
    assert lr.kappaB == -1
    assert lr.deltaB == -1


def test_lear_smooth_fiber():
    lr = lear_coefficients(samples.smooth_fiber(), "P")
    assert all(v == 0 for _, v in lr.items())


def test_lear_loop_genus_two():
    lr = lear_coefficients(samples.loop_fiber(), "P")
    assert lr.POmega == F(-1, 48)
    assert lr.deltaPBsq == F(-1, 3)
    # the unit loop is already its own smooth model; eta = 1/3
    assert lr.deltaPBsq_ofLears == F(-1, 3) + F(1, 3)


def test_lear_uses_desingularized_eta():
    f = samples.loop_fiber(m=2)
    lr = lear_coefficients(f, "P")
    assert lr.deltaPBsq_ofLears - lr.deltaPBsq == eta(polarized_graph_of(desingularize(f)).graph)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_lear_relations(seed):
    f = random_fiber(random.Random(seed))
    assert all(r == 0 for r in samples.lear_relation_residuals(f))


# -- asymptotics ----------------------------------------------------------


@pytest.mark.parametrize("h", range(2, 11))
def test_delta_slope_separating(h):
    for i in range(1, h):
        ar = delta_asymptotics(samples.separating_fiber(h, i))
        assert ar.deltaSlope == F(4 * i * (h - i), h)
        assert ar.bettiNumber == 0 and "tree" in ar.note


@pytest.mark.parametrize("h", range(2, 11))
def test_delta_slope_nonseparating(h):
    ar = delta_asymptotics(samples.loop_fiber(h))
    assert ar.deltaSlope == F(4 * h - 1, 3 * h)
    assert ar.bettiNumber == 1
    assert "1*log(-log|t|)" in ar.note


def test_delta_slope_smooth():
    ar = delta_asymptotics(samples.smooth_fiber())
    assert ar.deltaSlope == 0 and ar.volume == 0


def test_delta_slope_counts_multiplicity():
    ar = delta_asymptotics(samples.separating_fiber(m=3))
    assert ar.volume == 3 and ar.epsilon == 3 and ar.deltaSlope == 6


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_delta_slope_positive(seed):
    f = random_fiber(random.Random(seed))
    assert delta_asymptotics(f).deltaSlope > 0


def test_arakelov_slopes():
    sep = arakelov_asymptotics(samples.separating_fiber(), "P", "Q")
    assert sep.metricSlope == F(-1, 4)
    assert sep.greenSlope == F(-1, 4)
    assert arakelov_asymptotics(samples.loop_fiber(), "P").metricSlope == F(-1, 48)


# -- split edge -----------------------------------------------------------


def _banana_fiber():
    return NodalFiberSpec((("a", 0), ("b", 0)), (("n1", "a", "b", 1), ("n2", "a", "b", 1)))


def test_split_edge_banana():
    f = _banana_fiber()
    r = split_edge_resistance(f, "n1", 1, 1, "a")
    assert r == D.split_edge_formula(f, "n1", 1, 1, "a")
    # scaled banana of total length 4 with the split point opposite a: 1 * 3 / 4
    assert r == F(3, 4)


def test_split_edge_limits():
    f = samples.separating_fiber(h=3, i=1)
    # bridge: F = 0 and the formula is linear in (a, b)
    assert D.split_edge_formula(f, "n", 2, 3, "a") == 2
    assert split_edge_resistance(f, "n", 2, 3, "a") == 2
    g = _banana_fiber()
    tiny = F(1, 10**6)
    r = split_edge_resistance(g, "n1", 1, tiny, "a")
    # as b -> 0 the value tends to r(x,z) a
    assert abs(r - F(1, 2)) < 10 * tiny


@settings(max_examples=20, deadline=None)
@given(
    st.integers(0, 10**6),
    st.fractions(min_value=F(1, 9), max_value=9, max_denominator=9),
    st.fractions(min_value=F(1, 9), max_value=9, max_denominator=9),
)
def test_split_edge_formula(seed, a, b):
    rng = random.Random(seed)
    f = random_fiber(rng, max_nodes=6)
    node = rng.choice(f.nodes)[0]
    x = rng.choice(f.dual_graph.vertices)
    assert split_edge_resistance(f, node, a, b, x) == D.split_edge_formula(f, node, a, b, x)


# -- limit measure --------------------------------------------------------


def test_limit_measure_examples():
    assert limit_measure(samples.smooth_fiber()).atoms == {V("c"): 1}
    mu = limit_measure(samples.loop_fiber())
    assert mu.atoms == {V("v"): F(1, 2)}
    assert mu.densities["n"].simplified().polys == ((F(1, 2),),)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_limit_measure_is_admissible_measure(seed):
    f = random_fiber(random.Random(seed))
    assert limit_measure(f) == admissible_measure(polarized_graph_of(f))
