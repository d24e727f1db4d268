"""Hyperedge effective-resistance estimation and an exact graph oracle."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from ercoarsen.embed import EmbeddingBasis, embed_nodes
from ercoarsen.hypergraph import Hypergraph


@dataclass(frozen=True, eq=False)
class ResistanceVector:
    values: np.ndarray
    m: int
    basis_k: int

    def __len__(self):
        return len(self.values)


def _spreads(H: Hypergraph, chi: np.ndarray) -> np.ndarray:
    """max - min of ``chi`` over the pins of each hyperedge; ``chi`` may be (k, |V|)."""
    vals = chi[..., H.pins]
    starts = H.offsets[:-1]
    hi = np.maximum.reduceat(vals, starts, axis=-1)
    lo = np.minimum.reduceat(vals, starts, axis=-1)
    return hi - lo


def quadratic_form(H: Hypergraph, chi) -> float:
    """Nonlinear hypergraph quadratic form: sum of ``w_e * spread_e(chi)**2``."""
    chi = np.asarray(chi, dtype=float)
    if chi.shape != (H.num_nodes,):
        raise ValueError(f"chi has shape {chi.shape}, expected ({H.num_nodes},)")
    if H.num_hyperedges == 0:
        return 0.0
    return float(H.weights @ _spreads(H, chi) ** 2)


def resistance_ratios(H: Hypergraph, basis) -> np.ndarray:
    """Per-hyperedge resistance ratio for each basis vector, shape ``(|E|, k)``.

    Basis vectors with a zero quadratic form are skipped with a warning.
    """
    vectors = basis.vectors if isinstance(basis, EmbeddingBasis) else np.atleast_2d(
        np.asarray(basis, dtype=float))
    if vectors.shape[1] != H.num_nodes:
        raise ValueError("basis vector length does not match node count")
    spread_sq = _spreads(H, vectors) ** 2  # (k, |E|)
    denom = spread_sq @ H.weights
    ok = denom > 0
    if not ok.all():
        warnings.warn(f"{int((~ok).sum())} basis vector(s) have zero quadratic form; excluded",
                      stacklevel=2)
    if not ok.any():
        raise ValueError("every basis vector has zero quadratic form")
    return (spread_sq[ok] / denom[ok, None]).T


def estimate_resistances(ratios, m: int = 1) -> ResistanceVector:
    """Sum of the ``m`` largest ratios of every hyperedge."""
    ratios = np.atleast_2d(np.asarray(ratios, dtype=float))
    k = ratios.shape[1]
    if m < 1:
        raise ValueError("m must be >= 1")
    if m > k:
        raise ValueError(f"m={m} exceeds the {k} available ratios")
    if m == 1:
        values = ratios.max(axis=1)
    else:
        # stable sort keeps lower vector index first among ties
        order = np.argsort(-ratios, axis=1, kind="stable")[:, :m]
        values = np.take_along_axis(ratios, order, axis=1).sum(axis=1)
    return ResistanceVector(values, m=m, basis_k=k)


def estimate_hyperedge_resistances(H: Hypergraph, rho: int = 200, k: int = 10, m: int = 1,
                                   seed: int = 0, **embed_kwargs) -> ResistanceVector:
    """Star expansion, Krylov embedding, then top-``m`` ratio sums."""
    basis = embed_nodes(H, rho=rho, k=k, seed=seed, **embed_kwargs)
    ratios = resistance_ratios(H, basis)
    return estimate_resistances(ratios, min(m, ratios.shape[1]))


def _laplacian(adjacency):
    A = sp.csr_matrix(adjacency, dtype=float)
    if A.shape[0] != A.shape[1]:
        raise ValueError("adjacency must be square")
    if abs(A - A.T).max() > 1e-12 * max(1.0, abs(A).max()):
        raise ValueError("adjacency must be symmetric")
    n_comp, _ = connected_components(A, directed=False)
    if n_comp > 1:
        raise ValueError(f"graph is disconnected ({n_comp} components)")
    deg = np.asarray(A.sum(axis=1)).ravel()
    return (sp.diags(deg) - A).toarray()


def laplacian_pseudoinverse(adjacency) -> np.ndarray:
    """Dense Moore-Penrose pseudo-inverse of a connected graph Laplacian."""
    L = _laplacian(adjacency)
    n = L.shape[0]
    J = np.full((n, n), 1.0 / n)
    # (L + J/n)^{-1} - J/n equals L^+ when the graph is connected
    return np.linalg.inv(L + J) - J


def exact_effective_resistance(adjacency, p: int, q: int) -> float:
    """``b_pq^T L^+ b_pq`` by dense linear algebra; intended for small graphs."""
    n = adjacency.shape[0]
    if not (0 <= p < n and 0 <= q < n):
        raise ValueError("node index out of range")
    if p == q:
        return 0.0
    L = _laplacian(adjacency)
    b = np.zeros(n)
    b[p], b[q] = 1.0, -1.0
    # ground q to remove the nullspace
    keep = np.arange(n) != q
    y = np.linalg.solve(L[np.ix_(keep, keep)], b[keep])
    return float(b[keep] @ y)


def exact_edge_resistances(adjacency, edges) -> np.ndarray:
    """Exact effective resistance for each ``(p, q)`` pair using one pseudo-inverse."""
    Lp = laplacian_pseudoinverse(adjacency)
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    p, q = e[:, 0], e[:, 1]
    return Lp[p, p] + Lp[q, q] - 2 * Lp[p, q]


def hypergraph_adjacency(H: Hypergraph) -> sp.csr_matrix:
    """Weighted adjacency of a hypergraph whose hyperedges all have two pins."""
    if H.num_hyperedges and not np.all(H.sizes == 2):
        raise ValueError("hypergraph is not a simple graph (hyperedge with more than 2 pins)")
    p = H.pins[0::2]
    q = H.pins[1::2]
    A = sp.coo_matrix((np.concatenate([H.weights, H.weights]),
                       (np.concatenate([p, q]), np.concatenate([q, p]))),
                      shape=(H.num_nodes, H.num_nodes))
    return A.tocsr()
