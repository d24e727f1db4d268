"""Random test inputs: placement-local netlists and Erdos-Renyi graphs."""

from __future__ import annotations

import numpy as np

from ercoarsen.hypergraph import Hypergraph, build_hypergraph


def synthetic_netlist(num_cells: int = 12752, num_nets: int = 14111, seed: int = 0, *,
                      size_exponent: float = 2.6, max_net_size: int = 40,
                      global_fraction: float = 0.02) -> Hypergraph:
    """Netlist-like hypergraph with ISPD98-style statistics.

    Cells sit on a square grid; each net picks a driver and draws its other
    pins near it, with the neighbourhood growing with net size. Net sizes
    follow a truncated power law (mostly 2- and 3-pin nets) and a small
    fraction of nets ignore locality. Every cell is guaranteed a net.
    """
    rng = np.random.default_rng(seed)
    side = int(np.ceil(np.sqrt(num_cells)))
    xy = np.stack(np.divmod(np.arange(num_cells), side), axis=1)
    sizes = np.arange(2, max_net_size + 1)
    p = sizes.astype(float) ** -size_exponent
    net_sizes = rng.choice(sizes, size=num_nets, p=p / p.sum())

    covered = np.zeros(num_cells, dtype=bool)
    order = rng.permutation(num_cells)
    cursor = 0
    nets = []
    for s in net_sizes.tolist():
        # walk uncovered cells first so nobody is left isolated
        while cursor < num_cells and covered[order[cursor]]:
            cursor += 1
        driver = int(order[cursor]) if cursor < num_cells else int(rng.integers(num_cells))
        if rng.random() < global_fraction:
            others = rng.choice(num_cells, size=s - 1, replace=False)
        else:
            radius = max(1.0, 0.9 * np.sqrt(s))
            off = np.rint(rng.normal(0.0, radius, size=(s - 1, 2))).astype(np.int64)
            pos = np.clip(xy[driver] + off, 0, side - 1)
            others = pos[:, 0] * side + pos[:, 1]
            others = np.where(others < num_cells, others, rng.integers(num_cells, size=s - 1))
        net = np.unique(np.concatenate([[driver], others]))
        if net.size < 2:
            net = np.array([driver, (driver + 1) % num_cells])
        covered[net] = True
        nets.append(net.tolist())
    left = np.flatnonzero(~covered)
    for c in left.tolist():
        nets.append([c, int((c + 1) % num_cells)])
    return build_hypergraph(nets, num_nodes=num_cells)


def erdos_renyi_hypergraph(n: int, p: float, seed: int = 0, *, connected: bool = True) -> Hypergraph:
    """G(n, p) as a hypergraph of 2-pin hyperedges with unit weights.

    With ``connected`` the graph is restricted to its largest connected
    component and nodes are renumbered.
    """
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    pick = rng.random(iu.size) < p
    edges = np.stack([iu[pick], ju[pick]], axis=1)
    if connected:
        import scipy.sparse as sp
        from scipy.sparse.csgraph import connected_components

        A = sp.coo_matrix((np.ones(len(edges)), (edges[:, 0], edges[:, 1])), shape=(n, n))
        _, comp = connected_components(A, directed=False)
        big = np.argmax(np.bincount(comp))
        keep_nodes = np.flatnonzero(comp == big)
        relabel = np.full(n, -1)
        relabel[keep_nodes] = np.arange(keep_nodes.size)
        edges = relabel[edges[comp[edges[:, 0]] == big]]
        n = keep_nodes.size
    return build_hypergraph(edges.tolist(), num_nodes=n)
