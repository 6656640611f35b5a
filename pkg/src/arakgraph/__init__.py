"""Exact invariants of polarized metrized graphs and degenerating curves."""

from .admissible import (
    PolarizedMetrizedGraph,
    admissible_measure,
    c_constant,
    epsilon,
    green_admissible,
    green_function,
    verify_identities,
)
from .degeneration import (
    NodalFiberSpec,
    arakelov_asymptotics,
    delta_asymptotics,
    desingularize,
    lear_coefficients,
    limit_measure,
    polarized_graph_of,
    split_edge_resistance,
)
from .graph import (
    WeightedMultigraph,
    betti_number,
    build_graph,
    effective_resistance_vertices,
    green_bilinear,
    green_pseudoinverse,
    laplacian,
    weighted_tree_count,
)
from .metrized import (
    AtVertex,
    Current,
    OnEdge,
    PiecewiseQuadratic,
    bridge_resistance,
    canonical_measure,
    eta,
    eta_edge,
    foster_coefficient,
    integrate,
    laplacian_of,
    resistance,
    resistance_function,
    subdivide_at,
    tau,
    tau_cts,
)

__version__ = "0.1.0"
