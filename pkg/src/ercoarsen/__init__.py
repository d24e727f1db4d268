"""Spectral hypergraph coarsening by effective-resistance clustering."""

from ercoarsen.hypergraph import Hypergraph, build_hypergraph, node_degrees
from ercoarsen.expansion import BipartiteGraph, star_expand, normalized_adjacency_apply
from ercoarsen.embed import (
    EmbeddingBasis,
    build_krylov_basis,
    embed_nodes,
    random_mean_free_vector,
    select_and_orthogonalize,
    truncate_to_nodes,
)
from ercoarsen.resistance import (
    ResistanceVector,
    estimate_hyperedge_resistances,
    estimate_resistances,
    exact_effective_resistance,
    quadratic_form,
    resistance_ratios,
)
from ercoarsen.coarsen import (
    ClusterMap,
    CoarseningHierarchy,
    CoarsenParams,
    apply_nwp,
    build_coarse_hypergraph,
    cluster_by_resistance,
    hyper_ef,
    project_partition,
    propagate_node_weights,
)
from ercoarsen.metrics import (
    QualityReport,
    average_conductance,
    conductance,
    cut,
    quality_report,
)

__version__ = "0.1.0"

__all__ = [
    "Hypergraph",
    "build_hypergraph",
    "node_degrees",
    "BipartiteGraph",
    "star_expand",
    "normalized_adjacency_apply",
    "EmbeddingBasis",
    "random_mean_free_vector",
    "build_krylov_basis",
    "select_and_orthogonalize",
    "truncate_to_nodes",
    "embed_nodes",
    "ResistanceVector",
    "quadratic_form",
    "resistance_ratios",
    "estimate_resistances",
    "estimate_hyperedge_resistances",
    "exact_effective_resistance",
    "ClusterMap",
    "CoarseningHierarchy",
    "CoarsenParams",
    "cluster_by_resistance",
    "build_coarse_hypergraph",
    "propagate_node_weights",
    "apply_nwp",
    "hyper_ef",
    "project_partition",
    "QualityReport",
    "cut",
    "conductance",
    "average_conductance",
    "quality_report",
]
