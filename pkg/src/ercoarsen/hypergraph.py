"""Weighted hypergraph container with degree bookkeeping.

Hyperedges are stored in a compressed layout: ``pins`` holds every pin of every
hyperedge back to back and ``offsets[i]:offsets[i + 1]`` delimits hyperedge ``i``.
Pins inside a hyperedge are sorted ascending and distinct.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class HypergraphError(ValueError):
    """Raised when hypergraph input violates a structural invariant."""


@dataclass(frozen=True, eq=False)
class Hypergraph:
    num_nodes: int
    pins: np.ndarray
    offsets: np.ndarray
    weights: np.ndarray
    node_weights: np.ndarray
    # cell areas from fmt 10/11 files; kept apart from the propagated node weights
    node_sizes: np.ndarray | None = None
    _edge_of_pin: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        for name in ("pins", "offsets", "weights", "node_weights", "node_sizes"):
            arr = getattr(self, name)
            if arr is not None:
                arr.setflags(write=False)

    @property
    def num_hyperedges(self) -> int:
        return len(self.offsets) - 1

    @property
    def num_pins(self) -> int:
        return int(self.offsets[-1])

    @property
    def sizes(self) -> np.ndarray:
        """Cardinality of every hyperedge."""
        return np.diff(self.offsets)

    @property
    def edge_of_pin(self) -> np.ndarray:
        """Hyperedge index owning each entry of ``pins``."""
        if self._edge_of_pin is None:
            idx = np.repeat(np.arange(self.num_hyperedges), self.sizes)
            idx.setflags(write=False)
            object.__setattr__(self, "_edge_of_pin", idx)
        return self._edge_of_pin

    @property
    def hyperedges(self) -> list[tuple[int, ...]]:
        p = self.pins.tolist()
        o = self.offsets.tolist()
        return [tuple(p[o[i]:o[i + 1]]) for i in range(self.num_hyperedges)]

    def hyperedge(self, i: int) -> np.ndarray:
        return self.pins[self.offsets[i]:self.offsets[i + 1]]

    def with_node_weights(self, node_weights) -> "Hypergraph":
        eta = np.asarray(node_weights, dtype=float).copy()
        if eta.shape != (self.num_nodes,):
            raise HypergraphError(
                f"expected {self.num_nodes} node weights, got {eta.shape}")
        if np.any(eta < 0) or not np.all(np.isfinite(eta)):
            raise HypergraphError("node weights must be finite and >= 0")
        return Hypergraph(self.num_nodes, self.pins, self.offsets, self.weights,
                          eta, self.node_sizes)

    def with_node_sizes(self, node_sizes) -> "Hypergraph":
        sizes = None if node_sizes is None else np.asarray(node_sizes, dtype=float).copy()
        return Hypergraph(self.num_nodes, self.pins, self.offsets, self.weights,
                          self.node_weights, sizes)

    def __eq__(self, other):
        if not isinstance(other, Hypergraph):
            return NotImplemented
        if (self.node_sizes is None) != (other.node_sizes is None):
            return False
        return (
            self.num_nodes == other.num_nodes
            and np.array_equal(self.pins, other.pins)
            and np.array_equal(self.offsets, other.offsets)
            and np.array_equal(self.weights, other.weights)
            and np.array_equal(self.node_weights, other.node_weights)
            and (self.node_sizes is None or np.array_equal(self.node_sizes, other.node_sizes))
        )

    __hash__ = None

    def __repr__(self):
        return (f"Hypergraph(num_nodes={self.num_nodes}, "
                f"num_hyperedges={self.num_hyperedges}, num_pins={self.num_pins})")


def build_hypergraph(
    pin_lists: Iterable[Sequence[int]],
    weights: Sequence[float] | None = None,
    num_nodes: int | None = None,
    *,
    node_weights: Sequence[float] | None = None,
    node_sizes: Sequence[float] | None = None,
    on_degenerate: str = "drop",
) -> Hypergraph:
    """Build a canonical hypergraph from lists of node indices.

    Duplicate pins are collapsed and pins sorted. Hyperedges left with fewer
    than two distinct pins are dropped with a warning (``on_degenerate="drop"``)
    or rejected (``on_degenerate="error"``).
    """
    if on_degenerate not in ("drop", "error"):
        raise ValueError(f"unknown on_degenerate policy {on_degenerate!r}")
    pin_lists = [list(e) for e in pin_lists]
    if weights is None:
        w_in = np.ones(len(pin_lists))
    else:
        w_in = np.asarray(weights, dtype=float)
        if w_in.shape != (len(pin_lists),):
            raise HypergraphError(
                f"{len(pin_lists)} hyperedges but {w_in.size} weights")
    if num_nodes is None:
        num_nodes = 1 + max((max(e) for e in pin_lists if e), default=-1)
    if num_nodes < 0:
        raise HypergraphError("num_nodes must be non-negative")

    pins: list[int] = []
    offsets = [0]
    kept_weights = []
    dropped = 0
    for i, edge in enumerate(pin_lists):
        for p in edge:
            if not 0 <= p < num_nodes:
                raise HypergraphError(
                    f"hyperedge {i}: pin {p} out of range [0, {num_nodes})")
        canon = sorted(set(int(p) for p in edge))
        if len(canon) < 2:
            if on_degenerate == "error":
                raise HypergraphError(
                    f"hyperedge {i} has {len(canon)} distinct pin(s); need >= 2")
            dropped += 1
            continue
        w = w_in[i]
        if not (w > 0 and np.isfinite(w)):
            raise HypergraphError(f"hyperedge {i}: weight {w} is not positive")
        pins.extend(canon)
        offsets.append(len(pins))
        kept_weights.append(w)
    if dropped:
        warnings.warn(f"dropped {dropped} hyperedge(s) with fewer than 2 distinct pins",
                      stacklevel=2)

    if node_weights is None:
        eta = np.zeros(num_nodes)
    else:
        eta = np.asarray(node_weights, dtype=float).copy()
        if eta.shape != (num_nodes,):
            raise HypergraphError(f"expected {num_nodes} node weights, got {eta.size}")
        if np.any(eta < 0) or not np.all(np.isfinite(eta)):
            raise HypergraphError("node weights must be finite and >= 0")
    sizes = None
    if node_sizes is not None:
        sizes = np.asarray(node_sizes, dtype=float).copy()
        if sizes.shape != (num_nodes,):
            raise HypergraphError(f"expected {num_nodes} node sizes, got {sizes.size}")

    return Hypergraph(
        num_nodes=int(num_nodes),
        pins=np.asarray(pins, dtype=np.int64),
        offsets=np.asarray(offsets, dtype=np.int64),
        weights=np.asarray(kept_weights, dtype=float),
        node_weights=eta,
        node_sizes=sizes,
    )


def node_degrees(H: Hypergraph) -> np.ndarray:
    """Weighted degree of every node: the summed weight of its hyperedges."""
    return np.bincount(H.pins, weights=H.weights[H.edge_of_pin], minlength=H.num_nodes)
