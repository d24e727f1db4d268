"""Command-line entry point: ``ercoarsen {coarsen,evaluate,er-correlate,bench}``.

Exit codes: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import nullcontext
from pathlib import Path

import numpy as np

from ercoarsen import io
from ercoarsen.coarsen import ClusterMap, CoarseningHierarchy, CoarsenParams, hyper_ef
from ercoarsen.embed import SELECTION_STRATEGIES
from ercoarsen.metrics import (QualityReport, cluster_conductances, hyperedge_spans,
                               quality_report)

log = logging.getLogger("ercoarsen")

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2
BENCH_FIELDS = ["name", "level", "n_clusters", "nr", "er", "avg_conductance", "seconds"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _delta_policy(text):
    kind, _, arg = text.partition(":")
    try:
        if kind == "max" and not arg:
            return text
        if kind == "explicit":
            float(arg)
            return text
        if kind == "percentile" and 0 < float(arg) <= 100:
            return text
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(
        f"expected max, explicit:<value> or percentile:<p in (0,100]>, got {text!r}")


def _level_sweep(text):
    levels = set()
    for part in text.split(","):
        lo, sep, hi = part.partition("-")
        try:
            if sep:
                levels.update(range(int(lo), int(hi) + 1))
            else:
                levels.add(int(lo))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad level list {text!r}") from None
    if not levels or min(levels) < 1:
        raise argparse.ArgumentTypeError("levels must be >= 1")
    return sorted(levels)


def _add_run_options(p):
    g = p.add_argument_group("algorithm")
    g.add_argument("--rho", type=_positive_int, default=200,
                   help="Krylov subspace order (default: 200)")
    g.add_argument("-k", "--vectors", dest="k", type=_positive_int, default=10,
                   help="embedding vectors kept from the Krylov subspace (default: 10)")
    g.add_argument("-m", type=_positive_int, default=1,
                   help="top resistance ratios summed per hyperedge (default: 1)")
    g.add_argument("--seed", type=int, default=0, help="random seed (default: 0)")
    g.add_argument("--strategy", choices=SELECTION_STRATEGIES, default="evenly-spaced",
                   help="which Krylov powers to keep (default: evenly-spaced)")
    g.add_argument("--node-scaling", choices=("degree", "none"), default="degree",
                   help="rescale node coordinates by star-expansion degree (default: degree)")
    g.add_argument("--threads", type=_positive_int, default=None,
                   help="upper bound on internal BLAS/worker threads")


def _params(args, **extra) -> CoarsenParams:
    try:
        return CoarsenParams(rho=args.rho, k=args.k, m=args.m, seed=args.seed,
                             strategy=args.strategy, node_scaling=args.node_scaling, **extra)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _thread_limit(n):
    if n is None:
        return nullcontext()
    from threadpoolctl import threadpool_limits
    return threadpool_limits(limits=n)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ercoarsen",
                     description="Spectral hypergraph coarsening by effective-resistance "
                                 "clustering.")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="log progress (-vv for debug output)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("coarsen", help="coarsen an .hgr hypergraph")
    p.add_argument("input", type=Path, help="input hMetis .hgr file")
    p.add_argument("-L", "--levels", type=_positive_int, default=1,
                   help="number of coarsening levels (default: 1)")
    p.add_argument("--delta", type=_delta_policy, default="max",
                   help="resistance threshold policy: max | explicit:<v> | percentile:<p> "
                        "(default: max)")
    p.add_argument("--no-nwp", dest="nwp", action="store_false",
                   help="disable node weight propagation between levels")
    p.add_argument("--use-node-weights", action="store_true",
                   help="add node weights to degrees when computing conductance")
    p.add_argument("-o", "--outdir", type=Path, default=Path("."),
                   help="directory for outputs (default: current directory)")
    p.add_argument("--report-format", choices=("json", "csv"), default="json")
    p.add_argument("--coarse-partition", type=Path,
                   help="labels for the coarsest nodes; report the projected cut")
    _add_run_options(p)
    p.set_defaults(func=cmd_coarsen)

    p = sub.add_parser("evaluate", help="cut and conductance of a clustering or partition")
    p.add_argument("input", type=Path, help="fine hMetis .hgr file")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--map", type=Path, action="append", dest="maps",
                     help="cluster map file; repeat fine-to-coarse for several levels")
    src.add_argument("--partition", type=Path,
                     help="partition file with one label per fine node (e.g. hMetis .part)")
    p.add_argument("--coarse-partition", type=Path,
                   help="with --map: labels of the coarsest nodes, projected to fine nodes")
    p.add_argument("--use-node-weights", action="store_true",
                   help="add node sizes to degrees when computing volumes")
    p.add_argument("--report", type=Path, help="write a report file")
    p.add_argument("--report-format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("er-correlate",
                       help="compare estimated and exact edge resistances on a simple graph")
    p.add_argument("input", type=Path, nargs="?",
                   help=".hgr file whose hyperedges all have two pins")
    p.add_argument("--erdos-renyi", nargs=2, metavar=("N", "P"),
                   help="use a random G(N, P) graph (largest component) instead of a file")
    p.add_argument("--csv", type=Path, help="write edge, estimate, exact rows")
    _add_run_options(p)
    p.set_defaults(func=cmd_er_correlate)

    p = sub.add_parser("bench", help="run a level sweep over a directory of .hgr files")
    p.add_argument("directory", type=Path)
    p.add_argument("--levels", type=_level_sweep, default=[1, 2, 3, 4],
                   help="levels to report, e.g. 1-4 or 1,3 (default: 1-4)")
    p.add_argument("--delta", type=_delta_policy, default="max")
    p.add_argument("--no-nwp", dest="nwp", action="store_false")
    p.add_argument("--use-node-weights", action="store_true")
    p.add_argument("--csv", type=Path, default=Path("bench.csv"),
                   help="output CSV, appended to (default: bench.csv)")
    p.add_argument("--jobs", type=_positive_int, default=1,
                   help="files processed concurrently (default: 1)")
    _add_run_options(p)
    p.set_defaults(func=cmd_bench)
    return parser


def _summary(rep: QualityReport) -> str:
    return (f"{rep.name}: levels={rep.levels} nodes {rep.fine_nodes}->{rep.coarse_nodes} "
            f"NR={rep.node_reduction_ratio:.3f} ER={rep.hyperedge_reduction_ratio:.3f} "
            f"C={rep.average_conductance:.4f} T={rep.wall_time_seconds:.2f}s")


def cmd_coarsen(args) -> int:
    params = _params(args, delta_policy=args.delta, nwp=args.nwp)
    H = io.read_hgr(args.input)
    with _thread_limit(args.threads):
        hier = hyper_ef(H, args.levels, params)
    if hier.stopped_early:
        log.warning("stopped early: %s", hier.stop_reason)
    coarse_labels = None
    if args.coarse_partition:
        coarse_labels = io.read_partition(args.coarse_partition, hier.coarsest.num_nodes)
    rep = quality_report(H, hier, coarse_labels, use_node_weights=args.use_node_weights,
                         name=args.input.stem)

    args.outdir.mkdir(parents=True, exist_ok=True)
    stem = args.input.stem
    if hier.coarsest.num_hyperedges:
        io.write_hgr(hier.coarsest, args.outdir / f"{stem}.coarse.hgr")
    else:
        log.warning("coarsest hypergraph has no hyperedges; no .hgr written")
    for i, lv in enumerate(hier.levels, start=1):
        io.write_cluster_map(lv.cluster_map, args.outdir / f"{stem}.level{i}.map")
    io.write_report(rep, args.outdir / f"{stem}.report.{args.report_format}", args.report_format)
    print(_summary(rep))
    return EXIT_OK


def cmd_evaluate(args) -> int:
    H = io.read_hgr(args.input)
    if args.partition:
        if args.coarse_partition:
            raise UsageError("--coarse-partition needs --map")
        labels = io.read_partition(args.partition, H.num_nodes)
        uniq = np.unique(labels)
        cmap = ClusterMap(np.searchsorted(uniq, labels), uniq.size)
    else:
        maps = [io.read_cluster_map(p) for p in args.maps]
        n = H.num_nodes
        assign = np.arange(n)
        for path, m in zip(args.maps, maps):
            if m.num_nodes != n:
                raise ValueError(f"{path}: map covers {m.num_nodes} nodes, expected {n}")
            assign = m.assignment[assign]
            n = m.num_clusters
        cmap = ClusterMap(assign, n)
        if args.coarse_partition:
            coarse = io.read_partition(args.coarse_partition, n)
            labels = coarse[assign]
        else:
            labels = assign

    if cmap.num_clusters < 2 and not args.coarse_partition:
        raise ValueError("need at least two clusters to evaluate conductance")
    if args.coarse_partition:
        uniq = np.unique(labels)
        evaluated = ClusterMap(np.searchsorted(uniq, labels), uniq.size)
    else:
        evaluated = cmap
    per = cluster_conductances(H, evaluated.assignment, evaluated.num_clusters,
                               args.use_node_weights)
    cut_value = float(H.weights[hyperedge_spans(H, evaluated.assignment) >= 2].sum())
    rep = QualityReport(
        num_clusters=evaluated.num_clusters,
        average_conductance=float(per.mean()),
        per_cluster_conductance=per.tolist(),
        cut_value=cut_value,
        partition_conductance=float(per.mean()),
        node_reduction_ratio=1.0 - cmap.num_clusters / H.num_nodes,
        name=args.input.stem,
        fine_nodes=H.num_nodes,
        fine_hyperedges=H.num_hyperedges,
        coarse_nodes=cmap.num_clusters,
    )
    if evaluated.num_clusters == 2:
        rep.partition_conductance = float(per[0])
    print(f"{rep.name}: clusters={rep.num_clusters} cut={io.format_number(cut_value)} "
          f"avg_conductance={rep.average_conductance:.6f}")
    if args.report:
        io.write_report(rep, args.report, args.report_format)
    return EXIT_OK


def cmd_er_correlate(args) -> int:
    from scipy.stats import spearmanr

    from ercoarsen.generators import erdos_renyi_hypergraph
    from ercoarsen.resistance import (estimate_hyperedge_resistances, exact_edge_resistances,
                                      hypergraph_adjacency)

    if (args.input is None) == (args.erdos_renyi is None):
        raise UsageError("give exactly one of an input file or --erdos-renyi N P")
    if args.erdos_renyi:
        try:
            n, p = int(args.erdos_renyi[0]), float(args.erdos_renyi[1])
        except ValueError:
            raise UsageError("--erdos-renyi expects an integer N and a float P") from None
        H = erdos_renyi_hypergraph(n, p, seed=args.seed)
        name = f"er-{n}-{p}-{args.seed}"
    else:
        H = io.read_hgr(args.input)
        name = args.input.stem
    if not np.all(H.sizes == 2):
        raise ValueError("er-correlate needs a simple graph: every hyperedge must have 2 pins")
    params = _params(args)
    with _thread_limit(args.threads):
        est = estimate_hyperedge_resistances(H, params.rho, params.k, params.m, params.seed,
                                             strategy=params.strategy,
                                             node_scaling=params.node_scaling).values
        exact = exact_edge_resistances(hypergraph_adjacency(H), H.pins.reshape(-1, 2))
    # rank correlation is undefined when either column is constant (e.g. a triangle)
    if len(est) > 1 and np.ptp(est) > 0 and np.ptp(exact) > 0:
        rho = spearmanr(est, exact).statistic
    else:
        rho = float("nan")
    if args.csv:
        with args.csv.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["u", "v", "estimate", "exact"])
            for (u, v), a, b in zip(H.pins.reshape(-1, 2).tolist(), est.tolist(), exact.tolist()):
                w.writerow([u + 1, v + 1, repr(a), repr(b)])
    print(f"{name}: nodes={H.num_nodes} edges={H.num_hyperedges} spearman={rho:.4f}")
    return EXIT_OK


def _bench_one(path: Path, levels, params: CoarsenParams, use_node_weights, threads):
    H = io.read_hgr(path)
    rows = []
    with _thread_limit(threads):
        hier = hyper_ef(H, max(levels), params)
    for L in levels:
        sub = CoarseningHierarchy(H, hier.levels[:L], params)
        if len(sub.levels) < L:
            log.warning("%s: only %d level(s) before early stop", path.name, len(sub.levels))
        rep = quality_report(H, sub, use_node_weights=use_node_weights, name=path.stem)
        rows.append({"name": path.stem, "level": L, "n_clusters": rep.num_clusters,
                     "nr": rep.node_reduction_ratio, "er": rep.hyperedge_reduction_ratio,
                     "avg_conductance": rep.average_conductance,
                     "seconds": rep.wall_time_seconds})
    return rows


def cmd_bench(args) -> int:
    if not args.directory.is_dir():
        raise UsageError(f"{args.directory} is not a directory")
    files = sorted(args.directory.glob("*.hgr"))
    if not files:
        raise ValueError(f"no .hgr files in {args.directory}")
    params = _params(args, delta_policy=args.delta, nwp=args.nwp)
    fresh = not args.csv.exists() or args.csv.stat().st_size == 0
    failed = 0
    with args.csv.open("a", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=BENCH_FIELDS, lineterminator="\n")
        if fresh:
            writer.writeheader()
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                futures = [pool.submit(_bench_one, f, args.levels, params,
                                       args.use_node_weights, args.threads)
                           for f in files]
                results = []
                for f, fut in zip(files, futures):
                    try:
                        results.append(fut.result())
                    except Exception as exc:  # keep going, report at the end
                        log.error("%s: %s", f.name, exc)
                        failed += 1
        else:
            results = []
            for f in files:
                try:
                    results.append(_bench_one(f, args.levels, params, args.use_node_weights,
                                              args.threads))
                except Exception as exc:
                    log.error("%s: %s", f.name, exc)
                    failed += 1
        for rows in results:
            for row in rows:
                writer.writerow(row)
                print(f"{row['name']} L={row['level']} clusters={row['n_clusters']} "
                      f"NR={row['nr']:.3f} C={row['avg_conductance']:.4f} "
                      f"T={row['seconds']:.2f}s")
    return EXIT_RUNTIME if failed else EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=(logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)],
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"ercoarsen: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"ercoarsen: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
