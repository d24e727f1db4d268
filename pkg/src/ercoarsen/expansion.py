"""Star expansion of a hypergraph into a weighted bipartite graph."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ercoarsen.hypergraph import Hypergraph, HypergraphError


@dataclass(frozen=True, eq=False)
class BipartiteGraph:
    """Star expansion: vertices ``0..|V|-1`` are original nodes, the rest are
    one star vertex per hyperedge (star ``|V| + i`` stands for hyperedge ``i``).
    """

    num_original_nodes: int
    num_star_nodes: int
    adjacency: sp.csr_matrix
    degree: np.ndarray
    # D^{-1/2} A D^{-1/2}, built once so every apply is a single sparse matvec
    normalized: sp.csr_matrix

    @property
    def num_vertices(self) -> int:
        return self.num_original_nodes + self.num_star_nodes

    @property
    def num_edges(self) -> int:
        return self.adjacency.nnz // 2


def star_expand(H: Hypergraph) -> BipartiteGraph:
    """Connect a star vertex per hyperedge to each of its pins.

    Every spoke of hyperedge ``e`` gets weight ``w_e / |e|`` so that large
    hyperedges are not over-represented.
    """
    if H.num_hyperedges == 0:
        raise HypergraphError("cannot star-expand a hypergraph without hyperedges")
    n, m = H.num_nodes, H.num_hyperedges
    star = n + H.edge_of_pin
    z = (H.weights / H.sizes)[H.edge_of_pin]
    rows = np.concatenate([H.pins, star])
    cols = np.concatenate([star, H.pins])
    vals = np.concatenate([z, z])
    A = sp.csr_matrix((vals, (rows, cols)), shape=(n + m, n + m))
    A.sum_duplicates()
    A.sort_indices()
    degree = np.asarray(A.sum(axis=1)).ravel()
    inv_sqrt = np.zeros_like(degree)
    nz = degree > 0
    inv_sqrt[nz] = 1.0 / np.sqrt(degree[nz])
    Dh = sp.diags(inv_sqrt)
    N = (Dh @ A @ Dh).tocsr()
    N.sort_indices()
    return BipartiteGraph(n, m, A, degree, N)


def normalized_adjacency_apply(G: BipartiteGraph, v) -> np.ndarray:
    """Return ``D^{-1/2} A D^{-1/2} v``; zero-degree coordinates map to zero."""
    v = np.asarray(v, dtype=float)
    if v.shape != (G.num_vertices,):
        raise ValueError(f"vector length {v.shape} does not match {G.num_vertices} vertices")
    return G.normalized @ v
