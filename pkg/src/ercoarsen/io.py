"""hMetis ``.hgr`` files, cluster maps, partitions and metric reports.

``.hgr`` layout: a header ``<num_hyperedges> <num_nodes> [fmt]`` followed by
one line of 1-based pins per hyperedge (prefixed by its weight when fmt is 1
or 11) and, when fmt is 10 or 11, one node weight line per node. Lines that
start with ``%`` are comments.
"""

from __future__ import annotations

import csv
import json
import os
import warnings
from pathlib import Path

import numpy as np

from ercoarsen.coarsen import ClusterMap
from ercoarsen.hypergraph import Hypergraph, HypergraphError, build_hypergraph
from ercoarsen.metrics import QualityReport


class HgrParseError(ValueError):
    def __init__(self, msg, lineno=None, path=None):
        where = f"{path}:{lineno}: " if lineno is not None else ""
        super().__init__(where + msg)
        self.lineno = lineno


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        yield lineno, line.split()


def _number(tok, lineno, path, kind=float):
    try:
        return kind(tok)
    except ValueError:
        raise HgrParseError(f"expected a number, got {tok!r}", lineno, path) from None


def read_hgr(path, on_degenerate: str = "drop") -> Hypergraph:
    """Parse an hMetis hypergraph file into 0-based indices."""
    path = Path(path)
    lines = _content_lines(path.read_text())
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise HgrParseError("empty file", None, path) from None
    if len(header) not in (2, 3):
        raise HgrParseError("header must be '<hyperedges> <nodes> [fmt]'", lineno, path)
    num_edges = _number(header[0], lineno, path, int)
    num_nodes = _number(header[1], lineno, path, int)
    fmt = _number(header[2], lineno, path, int) if len(header) == 3 else 0
    if fmt not in (0, 1, 10, 11):
        raise HgrParseError(f"unsupported fmt code {fmt}", lineno, path)
    if num_edges < 0 or num_nodes < 0:
        raise HgrParseError("negative counts in header", lineno, path)
    edge_weights = fmt in (1, 11)
    node_weights = fmt in (10, 11)

    pin_lists, weights = [], []
    for _ in range(num_edges):
        try:
            lineno, toks = next(lines)
        except StopIteration:
            raise HgrParseError(f"expected {num_edges} hyperedge lines, found "
                                f"{len(pin_lists)}", None, path) from None
        if edge_weights:
            weights.append(_number(toks[0], lineno, path))
            toks = toks[1:]
        pins = [_number(t, lineno, path, int) for t in toks]
        for p in pins:
            if not 1 <= p <= num_nodes:
                raise HgrParseError(f"pin {p} outside [1, {num_nodes}]", lineno, path)
        pin_lists.append([p - 1 for p in pins])

    sizes = None
    if node_weights:
        sizes = []
        for _ in range(num_nodes):
            try:
                lineno, toks = next(lines)
            except StopIteration:
                raise HgrParseError(f"expected {num_nodes} node weight lines, found "
                                    f"{len(sizes)}", None, path) from None
            if len(toks) != 1:
                raise HgrParseError("node weight line must hold one value", lineno, path)
            sizes.append(_number(toks[0], lineno, path))
    extra = next(lines, None)
    if extra is not None:
        raise HgrParseError("unexpected content after the last record", extra[0], path)

    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            H = build_hypergraph(pin_lists, weights if edge_weights else None, num_nodes,
                                 node_sizes=sizes, on_degenerate=on_degenerate)
    except HypergraphError as exc:
        raise HgrParseError(str(exc), None, path) from exc
    dropped = num_edges - H.num_hyperedges
    if dropped:
        warnings.warn(f"{path}: dropped {dropped} hyperedge(s) with fewer than 2 distinct pins",
                      stacklevel=2)
    return H


def format_number(x: float) -> str:
    """Shortest text that parses back to ``x``; integral values lose the ``.0``."""
    x = float(x)
    if x.is_integer() and abs(x) < 2**53:
        return str(int(x))
    return repr(x)


def write_hgr(H: Hypergraph, path) -> None:
    """Write ``H`` as fmt 1 (fmt 11 when node sizes are attached)."""
    if H.num_hyperedges == 0:
        raise ValueError("cannot write a hypergraph without hyperedges")
    fmt = 11 if H.node_sizes is not None else 1
    out = [f"{H.num_hyperedges} {H.num_nodes} {fmt}"]
    for w, edge in zip(H.weights.tolist(), H.hyperedges):
        out.append(" ".join([format_number(w)] + [str(p + 1) for p in edge]))
    if H.node_sizes is not None:
        out.extend(format_number(s) for s in H.node_sizes.tolist())
    Path(path).write_text("\n".join(out) + "\n", newline="\n")


def write_cluster_map(cmap: ClusterMap, path) -> None:
    lines = [f"# nodes={cmap.num_nodes} clusters={cmap.num_clusters}"]
    lines.extend(str(c) for c in cmap.assignment.tolist())
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


def read_cluster_map(path) -> ClusterMap:
    path = Path(path)
    rows = path.read_text().splitlines()
    if not rows or not rows[0].startswith("#"):
        raise ValueError(f"{path}: missing '# nodes=<n> clusters=<k>' header")
    try:
        fields = dict(tok.split("=", 1) for tok in rows[0][1:].split())
        n, k = int(fields["nodes"]), int(fields["clusters"])
    except (ValueError, KeyError):
        raise ValueError(f"{path}:1: malformed header {rows[0]!r}") from None
    values = [r.strip() for r in rows[1:] if r.strip()]
    if len(values) != n:
        raise ValueError(f"{path}: header says {n} nodes, found {len(values)} lines")
    assignment = np.array([int(v) for v in values], dtype=np.int64)
    if assignment.size and (assignment.min() < 0 or assignment.max() >= k):
        raise ValueError(f"{path}: cluster index outside [0, {k})")
    if np.unique(assignment).size != k:
        raise ValueError(f"{path}: cluster indices are not contiguous 0..{k - 1}")
    return ClusterMap(assignment, k)


def read_partition(path, num_nodes: int | None = None) -> np.ndarray:
    """hMetis-style partition file: one integer label per node, in node order."""
    path = Path(path)
    labels = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(("%", "#")):
            continue
        try:
            labels.append(int(line))
        except ValueError:
            raise ValueError(f"{path}:{lineno}: expected an integer label, got {line!r}") \
                from None
    if num_nodes is not None and len(labels) != num_nodes:
        raise ValueError(f"{path}: {len(labels)} labels for {num_nodes} nodes")
    return np.asarray(labels, dtype=np.int64)


def write_partition(labels, path) -> None:
    Path(path).write_text("".join(f"{int(x)}\n" for x in labels), newline="\n")


REPORT_CSV_FIELDS = [
    "name", "levels", "num_clusters", "fine_nodes", "fine_hyperedges", "coarse_nodes",
    "coarse_hyperedges", "node_reduction_ratio", "hyperedge_reduction_ratio",
    "average_conductance", "cut_value", "partition_conductance", "wall_time_seconds",
]


def write_report(report: QualityReport, path, format: str = "json") -> None:
    """JSON overwrites ``path``; CSV appends a row and writes the header only
    when the file is new or empty."""
    path = Path(path)
    if format == "json":
        path.write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    elif format == "csv":
        fresh = not path.exists() or os.path.getsize(path) == 0
        row = report.to_dict()
        with path.open("a", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=REPORT_CSV_FIELDS, extrasaction="ignore",
                                    lineterminator="\n")
            if fresh:
                writer.writeheader()
            writer.writerow({k: ("" if row[k] is None else row[k]) for k in REPORT_CSV_FIELDS})
    else:
        raise ValueError(f"unknown report format {format!r}")


def read_report(path) -> QualityReport:
    return QualityReport.from_dict(json.loads(Path(path).read_text()))
