"""Krylov-subspace node embedding on the star expansion."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ercoarsen.expansion import BipartiteGraph, normalized_adjacency_apply, star_expand
from ercoarsen.hypergraph import Hypergraph

SELECTION_STRATEGIES = ("evenly-spaced", "last-k", "first-k")


class DegenerateKrylovError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class EmbeddingBasis:
    vectors: np.ndarray  # shape (k, |V|)
    rho: int
    seed: int

    @property
    def k(self) -> int:
        return self.vectors.shape[0]

    def __len__(self):
        return self.k

    def __iter__(self):
        return iter(self.vectors)


def random_mean_free_vector(n: int, seed: int) -> np.ndarray:
    """Uniform [-0.5, 0.5] entries, shifted so they sum to zero."""
    if n < 2:
        raise ValueError("need n >= 2 for a nonzero mean-free vector")
    rng = np.random.default_rng(seed)
    x = rng.random(n) - 0.5
    x -= x.mean()
    return x


def build_krylov_basis(G: BipartiteGraph, x, rho: int, keep: Sequence[int] | None = None):
    """Powers ``x, Ax, ..., A^rho x`` of the normalized adjacency.

    With ``keep`` only the listed powers are retained and a dict keyed by power
    is returned; this keeps memory at ``len(keep)`` vectors for large graphs.
    """
    if rho < 1:
        raise ValueError("rho must be >= 1")
    x = np.asarray(x, dtype=float)
    if not np.any(x):
        raise ValueError("Krylov start vector is zero")
    if keep is None:
        out = [x.copy()]
        v = x
        for _ in range(rho):
            v = normalized_adjacency_apply(G, v)
            out.append(v)
        return out
    wanted = set(int(j) for j in keep)
    if any(j < 0 or j > rho for j in wanted):
        raise ValueError(f"requested powers outside [0, {rho}]")
    kept = {}
    v = x
    if 0 in wanted:
        kept[0] = x.copy()
    last = max(wanted)
    for j in range(1, last + 1):
        v = normalized_adjacency_apply(G, v)
        if j in wanted:
            kept[j] = v
    return kept


def selection_indices(rho: int, k: int, strategy: str = "evenly-spaced") -> list[int]:
    """Power indices of the ``k + 1`` Krylov vectors fed to Gram-Schmidt.

    Index 0 (the raw random start) always leads the list.
    """
    if not 1 <= k <= rho:
        raise ValueError(f"need 1 <= k <= rho, got k={k}, rho={rho}")
    if strategy == "evenly-spaced":
        step = rho // k
        return [j * step for j in range(k)] + [rho]
    if strategy == "last-k":
        return [0] + list(range(rho - k + 1, rho + 1))
    if strategy == "first-k":
        return list(range(0, k + 1))
    raise ValueError(f"unknown selection strategy {strategy!r}")


def _gram_schmidt(vectors, drop_tol):
    basis: list[np.ndarray] = []
    kept_from: list[int] = []
    for idx, v in enumerate(vectors):
        w = np.array(v, dtype=float)
        norm0 = np.linalg.norm(w)
        if norm0 == 0:
            continue
        for q in basis:
            w -= (q @ w) * q
        if np.linalg.norm(w) < drop_tol * norm0:
            continue
        # second sweep restores orthogonality lost to cancellation
        for q in basis:
            w -= (q @ w) * q
        basis.append(w / np.linalg.norm(w))
        kept_from.append(idx)
    return basis, kept_from


def select_and_orthogonalize(krylov, k: int, drop_tol: float = 1e-12,
                             strategy: str = "evenly-spaced") -> list[np.ndarray]:
    """Pick ``k + 1`` Krylov powers, orthonormalize them in power order and
    drop the raw start direction.

    ``krylov`` is either the full power sequence or a dict keyed by power. The
    start direction is kept only when nothing else survives.
    """
    if drop_tol <= 0:
        raise ValueError("drop_tol must be positive")
    rho = (max(krylov) if isinstance(krylov, dict) else len(krylov) - 1)
    idx = selection_indices(rho, k, strategy)
    basis, kept_from = _gram_schmidt([krylov[j] for j in idx], drop_tol)
    if not basis:
        raise DegenerateKrylovError("Krylov subspace degenerate")
    if kept_from[0] == 0 and len(basis) > 1:
        basis = basis[1:]
    return basis[:k]


def truncate_to_nodes(vectors, num_original_nodes: int, *, rho: int = 0, seed: int = 0,
                      reorthogonalize: bool = False, scale=None) -> EmbeddingBasis:
    """Restrict vectors to the original-node coordinates.

    ``scale`` optionally multiplies the restricted coordinates elementwise.
    Vectors that become constant (in particular zero) are dropped: they carry no
    information about how nodes separate.
    """
    kept = []
    for v in vectors:
        v = np.asarray(v, dtype=float)
        if v.shape[0] < num_original_nodes:
            raise ValueError("vector shorter than the number of original nodes")
        chi = v[:num_original_nodes].copy()
        if scale is not None:
            chi *= scale
        if num_original_nodes == 0 or np.ptp(chi) == 0:
            continue
        kept.append(chi)
    if reorthogonalize and kept:
        kept, _ = _gram_schmidt(kept, 1e-12)
    if not kept:
        raise DegenerateKrylovError("every embedding vector vanished on the original nodes")
    return EmbeddingBasis(np.vstack(kept), rho=rho, seed=seed)


def embed_nodes(H: Hypergraph, rho: int = 200, k: int = 10, seed: int = 0, *,
                strategy: str = "evenly-spaced", drop_tol: float = 1e-12,
                reorthogonalize: bool = False, node_scaling: str = "degree",
                G: BipartiteGraph | None = None) -> EmbeddingBasis:
    """Star-expand ``H`` and return its Krylov node embedding.

    ``node_scaling="degree"`` divides node coordinates by the square root of
    their star-expansion degree, turning vectors of the symmetric operator
    into random-walk coordinates; ``"none"`` keeps the raw coordinates.
    """
    if node_scaling not in ("degree", "none"):
        raise ValueError(f"unknown node scaling {node_scaling!r}")
    if G is None:
        G = star_expand(H)
    x = random_mean_free_vector(G.num_vertices, seed)
    idx = selection_indices(rho, k, strategy)
    powers = build_krylov_basis(G, x, rho, keep=idx)
    ortho = select_and_orthogonalize(powers, k, drop_tol, strategy)
    scale = None
    if node_scaling == "degree":
        d = G.degree[:H.num_nodes]
        scale = np.zeros_like(d)
        scale[d > 0] = 1.0 / np.sqrt(d[d > 0])
    return truncate_to_nodes(ortho, H.num_nodes, rho=rho, seed=seed,
                             reorthogonalize=reorthogonalize, scale=scale)
