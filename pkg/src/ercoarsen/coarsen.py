"""Effective-resistance clustering and the multilevel coarsening driver."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from ercoarsen.hypergraph import Hypergraph
from ercoarsen.resistance import ResistanceVector, estimate_hyperedge_resistances

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ClusterMap:
    assignment: np.ndarray
    num_clusters: int
    # hyperedge whose contraction created each cluster, -1 for singletons
    seeds: np.ndarray | None = None

    def __post_init__(self):
        a = np.asarray(self.assignment)
        if a.size and (a.min() < 0 or a.max() >= self.num_clusters):
            raise ValueError("cluster index out of range")
        if np.unique(a).size != self.num_clusters:
            raise ValueError("cluster map is not surjective")
        if self.seeds is not None and len(self.seeds) != self.num_clusters:
            raise ValueError("one seed entry per cluster required")

    @classmethod
    def identity(cls, n: int) -> "ClusterMap":
        return cls(np.arange(n, dtype=np.int64), n, np.full(n, -1, dtype=np.int64))

    @property
    def num_nodes(self) -> int:
        return len(self.assignment)

    def members(self) -> list[np.ndarray]:
        order = np.argsort(self.assignment, kind="stable")
        bounds = np.cumsum(np.bincount(self.assignment, minlength=self.num_clusters))
        return np.split(order, bounds[:-1])


def cluster_by_resistance(H: Hypergraph, R, delta: float) -> ClusterMap:
    """Greedy contraction in ascending resistance order.

    A hyperedge with ``R_e < delta`` becomes a cluster when none of its pins is
    taken yet; otherwise its untaken pins form a cluster if there are at least
    two of them. Leftover nodes become singletons.
    """
    values = R.values if isinstance(R, ResistanceVector) else np.asarray(R, dtype=float)
    if len(values) != H.num_hyperedges:
        raise ValueError("one resistance per hyperedge required")
    assignment = np.full(H.num_nodes, -1, dtype=np.int64)
    seeds: list[int] = []
    pins = H.pins.tolist()
    offsets = H.offsets.tolist()
    order = np.argsort(values, kind="stable")
    eligible = order[values[order] < delta].tolist()
    for e in eligible:
        free = [p for p in pins[offsets[e]:offsets[e + 1]] if assignment[p] < 0]
        if len(free) < 2:
            continue
        assignment[free] = len(seeds)
        seeds.append(e)
    rest = np.flatnonzero(assignment < 0)
    assignment[rest] = np.arange(len(seeds), len(seeds) + rest.size)
    seeds.extend([-1] * rest.size)
    return ClusterMap(assignment, len(seeds), np.asarray(seeds, dtype=np.int64))


def propagate_node_weights(H: Hypergraph, cmap: ClusterMap, R, seeds=None) -> np.ndarray:
    """Supernode weight: summed member weights plus the resistance of the
    hyperedge that formed the cluster (nothing is added for singletons)."""
    seeds = cmap.seeds if seeds is None else np.asarray(seeds)
    eta = np.bincount(cmap.assignment, weights=H.node_weights, minlength=cmap.num_clusters)
    if seeds is not None and R is not None:
        values = R.values if isinstance(R, ResistanceVector) else np.asarray(R, dtype=float)
        formed = seeds >= 0
        eta[formed] += values[seeds[formed]]
    return eta


def apply_nwp(H: Hypergraph, R):
    """Add the node weights of every pin to its hyperedge's resistance."""
    values = R.values if isinstance(R, ResistanceVector) else np.asarray(R, dtype=float)
    if len(values) != H.num_hyperedges:
        raise ValueError("one resistance per hyperedge required")
    bump = np.bincount(H.edge_of_pin, weights=H.node_weights[H.pins],
                       minlength=H.num_hyperedges)
    out = values + bump
    if isinstance(R, ResistanceVector):
        return ResistanceVector(out, R.m, R.basis_k)
    return out


def build_coarse_hypergraph(H: Hypergraph, cmap: ClusterMap, R=None) -> Hypergraph:
    """Rewrite hyperedges over clusters.

    Self-loops (a single coarse pin) are dropped and hyperedges with the same
    coarse pin set are merged with summed weight. Coarse node weights come from
    :func:`propagate_node_weights` when ``R`` is given, otherwise members are
    just summed.
    """
    if cmap.num_nodes != H.num_nodes:
        raise ValueError("cluster map does not cover the hypergraph")
    cpins = cmap.assignment[H.pins]
    edge = H.edge_of_pin
    order = np.lexsort((cpins, edge))
    cpins, edge = cpins[order], edge[order]
    keep = np.ones(len(cpins), dtype=bool)
    keep[1:] = (cpins[1:] != cpins[:-1]) | (edge[1:] != edge[:-1])
    cpins, edge = cpins[keep], edge[keep]
    counts = np.bincount(edge, minlength=H.num_hyperedges)
    starts = np.concatenate([[0], np.cumsum(counts)])

    merged: dict[tuple, int] = {}
    new_pins: list[tuple] = []
    new_w: list[float] = []
    cp = cpins.tolist()
    st = starts.tolist()
    w = H.weights.tolist()
    for e in np.flatnonzero(counts >= 2).tolist():
        key = tuple(cp[st[e]:st[e + 1]])
        j = merged.get(key)
        if j is None:
            merged[key] = len(new_pins)
            new_pins.append(key)
            new_w.append(w[e])
        else:
            new_w[j] += w[e]

    offsets = np.zeros(len(new_pins) + 1, dtype=np.int64)
    np.cumsum([len(p) for p in new_pins], out=offsets[1:])
    flat = np.fromiter((p for e in new_pins for p in e), dtype=np.int64, count=int(offsets[-1]))
    if R is not None:
        eta = propagate_node_weights(H, cmap, R)
    else:
        eta = np.bincount(cmap.assignment, weights=H.node_weights, minlength=cmap.num_clusters)
    sizes = None
    if H.node_sizes is not None:
        sizes = np.bincount(cmap.assignment, weights=H.node_sizes, minlength=cmap.num_clusters)
    return Hypergraph(cmap.num_clusters, flat, offsets, np.asarray(new_w, dtype=float),
                      eta, sizes)


def resolve_delta(policy, R: np.ndarray) -> float:
    """Threshold for one level from a policy: ``"max"``, ``"explicit:<v>"``,
    ``"percentile:<p>"`` or a bare number."""
    if isinstance(policy, (int, float)):
        return float(policy)
    kind, _, arg = str(policy).partition(":")
    if kind == "max":
        # strict "R_e < delta" must still admit the largest hyperedge
        top = float(np.max(R)) if len(R) else 0.0
        return np.nextafter(top * (1 + 1e-12), np.inf)
    if kind == "explicit":
        return float(arg)
    if kind == "percentile":
        p = float(arg)
        if not 0 < p <= 100:
            raise ValueError("percentile must be in (0, 100]")
        return np.nextafter(float(np.percentile(R, p)) * (1 + 1e-12), np.inf)
    raise ValueError(f"unknown delta policy {policy!r}")


@dataclass
class CoarsenParams:
    rho: int = 200
    k: int = 10
    m: int = 1
    seed: int = 0
    delta_policy: str = "max"
    nwp: bool = True
    strategy: str = "evenly-spaced"
    node_scaling: str = "degree"
    reorthogonalize: bool = False

    def __post_init__(self):
        if self.rho < 1 or self.k < 1 or self.m < 1:
            raise ValueError("rho, k and m must be >= 1")
        if self.k > self.rho:
            raise ValueError("k must not exceed rho")
        if self.m > self.k:
            raise ValueError("m must not exceed k")
        resolve_delta(self.delta_policy, np.ones(1))


@dataclass(frozen=True, eq=False)
class Level:
    cluster_map: ClusterMap
    hypergraph: Hypergraph
    node_weights: np.ndarray
    resistance: ResistanceVector
    raw_resistance: ResistanceVector
    delta: float
    seconds: float


@dataclass(eq=False)
class CoarseningHierarchy:
    fine: Hypergraph
    levels: list[Level] = field(default_factory=list)
    params: CoarsenParams = field(default_factory=CoarsenParams)
    stopped_early: bool = False
    stop_reason: str = ""

    @property
    def coarsest(self) -> Hypergraph:
        return self.levels[-1].hypergraph if self.levels else self.fine

    @property
    def seconds(self) -> float:
        return sum(lv.seconds for lv in self.levels)

    def fine_to_coarsest(self) -> np.ndarray:
        assign = np.arange(self.fine.num_nodes, dtype=np.int64)
        for lv in self.levels:
            assign = lv.cluster_map.assignment[assign]
        return assign

    def composed_map(self) -> ClusterMap:
        return ClusterMap(self.fine_to_coarsest(), self.coarsest.num_nodes)


def coarsen_level(H: Hypergraph, params: CoarsenParams) -> Level:
    """Estimate resistances on ``H`` and contract it once."""
    t0 = time.perf_counter()
    raw = estimate_hyperedge_resistances(
        H, params.rho, params.k, params.m, params.seed, strategy=params.strategy,
        node_scaling=params.node_scaling, reorthogonalize=params.reorthogonalize)
    R = apply_nwp(H, raw) if params.nwp else raw
    delta = resolve_delta(params.delta_policy, R.values)
    cmap = cluster_by_resistance(H, R, delta)
    coarse = build_coarse_hypergraph(H, cmap, raw)
    return Level(cmap, coarse, coarse.node_weights, R, raw, delta,
                 time.perf_counter() - t0)


def hyper_ef(H: Hypergraph, L: int = 1, params: CoarsenParams | None = None,
             **overrides) -> CoarseningHierarchy:
    """Coarsen ``H`` for up to ``L`` levels.

    Stops early, and says why, when a level contracts nothing or the coarse
    hypergraph has no hyperedges left to estimate resistances on.
    """
    if L < 0:
        raise ValueError("L must be >= 0")
    if params is None:
        params = CoarsenParams(**overrides)
    elif overrides:
        raise TypeError("pass either params or keyword overrides, not both")
    hier = CoarseningHierarchy(H, params=params)
    current = H
    for level in range(1, L + 1):
        if current.num_hyperedges == 0 or current.num_nodes < 2:
            hier.stopped_early = True
            hier.stop_reason = f"level {level}: no hyperedges left"
            break
        lv = coarsen_level(current, params)
        if lv.cluster_map.num_clusters == current.num_nodes:
            hier.stopped_early = True
            hier.stop_reason = f"level {level}: nothing contracted"
            break
        log.info("level %d: %d -> %d nodes, %d -> %d hyperedges (%.2fs)", level,
                 current.num_nodes, lv.hypergraph.num_nodes, current.num_hyperedges,
                 lv.hypergraph.num_hyperedges, lv.seconds)
        hier.levels.append(lv)
        current = lv.hypergraph
    return hier


def project_partition(hierarchy: CoarseningHierarchy, coarse_labels) -> np.ndarray:
    """Give every fine node the label of the coarsest supernode containing it."""
    labels = np.asarray(coarse_labels)
    if labels.shape != (hierarchy.coarsest.num_nodes,):
        raise ValueError(f"expected {hierarchy.coarsest.num_nodes} coarse labels, "
                         f"got {labels.shape[0] if labels.ndim else 0}")
    return labels[hierarchy.fine_to_coarsest()]
