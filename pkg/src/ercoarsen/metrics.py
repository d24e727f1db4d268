"""Cut and conductance of node sets and clusterings."""

from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from ercoarsen.coarsen import ClusterMap, CoarseningHierarchy, project_partition
from ercoarsen.hypergraph import Hypergraph, node_degrees


@dataclass
class QualityReport:
    num_clusters: int
    average_conductance: float
    per_cluster_conductance: list[float] = field(default_factory=list)
    cut_value: float | None = None
    partition_conductance: float | None = None
    node_reduction_ratio: float = 0.0
    hyperedge_reduction_ratio: float = 0.0
    wall_time_seconds: float = 0.0
    name: str = ""
    levels: int = 0
    fine_nodes: int = 0
    fine_hyperedges: int = 0
    coarse_nodes: int = 0
    coarse_hyperedges: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "QualityReport":
        return cls(**d)


def _volumes(H: Hypergraph, use_node_weights: bool) -> np.ndarray:
    vol = node_degrees(H)
    if use_node_weights:
        # cell sizes when the input carried them, otherwise propagated weights
        extra = H.node_sizes if H.node_sizes is not None else H.node_weights
        vol = vol + extra
    return vol


def _as_mask(H: Hypergraph, S) -> np.ndarray:
    S = np.asarray(S)
    if S.dtype == bool:
        if S.shape != (H.num_nodes,):
            raise ValueError("boolean node mask has the wrong length")
        return S
    mask = np.zeros(H.num_nodes, dtype=bool)
    if S.size:
        if S.min() < 0 or S.max() >= H.num_nodes:
            raise ValueError("node index out of range")
        mask[S] = True
    return mask


def _crossing(H: Hypergraph, mask: np.ndarray) -> np.ndarray:
    """Which hyperedges have pins on both sides of ``mask``."""
    if H.num_hyperedges == 0:
        return np.zeros(0, dtype=bool)
    inside = np.add.reduceat(mask[H.pins].astype(np.int64), H.offsets[:-1])
    return (inside > 0) & (inside < H.sizes)


def cut(H: Hypergraph, labels, a=None, b=None) -> float:
    """Weight of hyperedges touching both label ``a`` and label ``b``.

    With ``b`` omitted the cut is taken between ``a`` and everything else; with
    both omitted ``labels`` is read as a node set or boolean mask ``S`` and the
    cut of ``(S, V \\ S)`` is returned.
    """
    if a is None:
        return float(H.weights[_crossing(H, _as_mask(H, labels))].sum())
    labels = np.asarray(labels)
    if labels.shape != (H.num_nodes,):
        raise ValueError("one label per node required")
    if H.num_hyperedges == 0:
        return 0.0
    starts = H.offsets[:-1]
    lab = labels[H.pins]
    has_a = np.maximum.reduceat((lab == a).astype(np.int8), starts) > 0
    if b is None:
        has_b = np.maximum.reduceat((lab != a).astype(np.int8), starts) > 0
    else:
        has_b = np.maximum.reduceat((lab == b).astype(np.int8), starts) > 0
    return float(H.weights[has_a & has_b].sum())


def conductance(H: Hypergraph, S, use_node_weights: bool = False) -> float:
    """``cut(S, S') / min(vol S, vol S')`` for a nonempty proper node set."""
    mask = _as_mask(H, S)
    k = int(mask.sum())
    if k == 0 or k == H.num_nodes:
        raise ValueError("conductance needs a nonempty proper subset of the nodes")
    vol = _volumes(H, use_node_weights)
    # sum both sides directly so S and its complement give bit-identical results
    low = min(vol[mask].sum(), vol[~mask].sum())
    if low <= 0:
        warnings.warn("a side of the cut has zero volume; conductance set to 1", stacklevel=2)
        return 1.0
    # cut <= min volume holds exactly; the clamp only absorbs rounding
    return min(1.0, float(H.weights[_crossing(H, mask)].sum() / low))


def cluster_conductances(H: Hypergraph, assignment, num_clusters: int | None = None,
                         use_node_weights: bool = False) -> np.ndarray:
    """Conductance of every cluster against the rest of the hypergraph."""
    assignment = np.asarray(assignment, dtype=np.int64)
    if assignment.shape != (H.num_nodes,):
        raise ValueError("one cluster index per node required")
    N = int(assignment.max()) + 1 if num_clusters is None else num_clusters
    vol = np.bincount(assignment, weights=_volumes(H, use_node_weights), minlength=N)
    total = vol.sum()
    cut_w = np.zeros(N)
    if H.num_hyperedges:
        # distinct (hyperedge, cluster) incidences
        pair = H.edge_of_pin * N + assignment[H.pins]
        pair = np.unique(pair)
        e, c = pair // N, pair % N
        spans = np.bincount(e, minlength=H.num_hyperedges)
        crossing = spans[e] >= 2
        cut_w = np.bincount(c[crossing], weights=H.weights[e[crossing]], minlength=N)
    low = np.minimum(vol, total - vol)
    out = np.ones(N)
    ok = low > 0
    if not ok.all():
        warnings.warn(f"{int((~ok).sum())} cluster(s) with a zero-volume side; "
                      "conductance set to 1", stacklevel=2)
    out[ok] = np.minimum(1.0, cut_w[ok] / low[ok])
    return out


def average_conductance(H: Hypergraph, cmap, use_node_weights: bool = False) -> float:
    """Mean cluster conductance over a clustering with at least two clusters."""
    if isinstance(cmap, ClusterMap):
        assignment, N = cmap.assignment, cmap.num_clusters
    else:
        assignment = np.asarray(cmap, dtype=np.int64)
        N = int(assignment.max()) + 1
    if N < 2:
        raise ValueError("average conductance needs at least two clusters")
    return float(cluster_conductances(H, assignment, N, use_node_weights).mean())


def quality_report(fine: Hypergraph, hierarchy: CoarseningHierarchy, coarse_labels=None, *,
                   use_node_weights: bool = False, name: str = "") -> QualityReport:
    """Reduction ratios, average cluster conductance and, given a labeling of
    the coarsest nodes, the cut of that partition projected onto ``fine``."""
    coarse = hierarchy.coarsest
    cmap = hierarchy.composed_map()
    if cmap.num_clusters >= 2:
        per = cluster_conductances(fine, cmap.assignment, cmap.num_clusters, use_node_weights)
        avg = float(per.mean())
    else:
        per, avg = np.zeros(0), float("nan")
    rep = QualityReport(
        num_clusters=cmap.num_clusters,
        average_conductance=avg,
        per_cluster_conductance=per.tolist(),
        node_reduction_ratio=1.0 - coarse.num_nodes / fine.num_nodes if fine.num_nodes else 0.0,
        hyperedge_reduction_ratio=(1.0 - coarse.num_hyperedges / fine.num_hyperedges
                                   if fine.num_hyperedges else 0.0),
        wall_time_seconds=hierarchy.seconds,
        name=name,
        levels=len(hierarchy.levels),
        fine_nodes=fine.num_nodes,
        fine_hyperedges=fine.num_hyperedges,
        coarse_nodes=coarse.num_nodes,
        coarse_hyperedges=coarse.num_hyperedges,
    )
    if coarse_labels is not None:
        fine_labels = project_partition(hierarchy, coarse_labels)
        uniq = np.unique(fine_labels)
        if uniq.size == 2:
            rep.cut_value = cut(fine, fine_labels, uniq[0], uniq[1])
            rep.partition_conductance = conductance(fine, fine_labels == uniq[0],
                                                    use_node_weights)
        else:
            dense = np.searchsorted(uniq, fine_labels)
            rep.cut_value = float(fine.weights[hyperedge_spans(fine, dense) >= 2].sum())
            if uniq.size >= 2:
                rep.partition_conductance = average_conductance(fine, dense, use_node_weights)
    return rep


def hyperedge_spans(H: Hypergraph, labels: np.ndarray) -> np.ndarray:
    """Number of distinct labels touched by each hyperedge (labels dense from 0)."""
    if H.num_hyperedges == 0:
        return np.zeros(0, dtype=np.int64)
    N = int(labels.max()) + 1
    pair = np.unique(H.edge_of_pin * N + labels[H.pins])
    return np.bincount(pair // N, minlength=H.num_hyperedges)
