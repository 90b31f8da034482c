"""Command-line front end.

Subcommands: diagnose, cluster, graph, paths, trace, cover, synth.
Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import sys
from datetime import date
from pathlib import Path

from . import figures, reports
from .combinat import k_heaviest_paths, stock_cover, trace_stock
from .config import RunConfig, config_hash, load_config_file, resolve_config
from .errors import DataError, UsageError
from .ingest import write_panel_csv
from .pipeline import (
    diagnose_panel,
    graph_from_run,
    load_or_build_graph,
    run_clustering,
)
from .synth import synthetic_prices, write_price_csvs
from .tgc import strip_isolated, tgc_to_dot, tgc_to_json_dict


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with 2; we reserve 2 for data
        raise UsageError(message)


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="declarative JSON config file")
    p.add_argument("--data", dest="data_dir", help="directory of per-ticker OHLC CSVs")
    p.add_argument("--tickers", help="comma-separated ticker filter")
    p.add_argument("--from", dest="start", help="window start date (YYYY-MM-DD)")
    p.add_argument("--to", dest="end", help="window end date (YYYY-MM-DD)")
    p.add_argument("--segment", help="bimonthly | days:N | file:PATH")
    p.add_argument("--alpha", type=float, help="significance level (default 0.05)")
    p.add_argument("--delta", type=float, help="explicit group threshold override")
    p.add_argument("--negative", action="store_true", default=None,
                   help="cluster on negative correlations")
    p.add_argument("--linkage", choices=["complete", "average", "single"])
    p.add_argument("--cut-height", dest="cut_height", type=float,
                   help="explicit dendrogram cut height (default: half the max merge)")
    p.add_argument("--lag", type=int, help="Ljung-Box lag override")
    p.add_argument("--returns", dest="return_mode", choices=["simple", "log"])
    p.add_argument("--k", type=int, help="number of heaviest paths")
    p.add_argument("--stock", help="ticker for the trace query")
    p.add_argument("--include-outliers", dest="include_outliers",
                   action="store_true", default=None,
                   help="append never-clustered tickers to the cover")
    p.add_argument("--out", dest="out_dir", help="output directory")
    p.add_argument("--seed", type=int, help="seed for synthetic generation")


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    file_values = load_config_file(args.config) if args.config else None
    overrides = {
        "data_dir": args.data_dir,
        "tickers": args.tickers,
        "start": args.start,
        "end": args.end,
        "segment": args.segment,
        "alpha": args.alpha,
        "delta": args.delta,
        "sign": "negative" if args.negative else None,
        "linkage": args.linkage,
        "cut_height": args.cut_height,
        "lag": args.lag,
        "return_mode": args.return_mode,
        "k": args.k,
        "stock": args.stock,
        "include_outliers": args.include_outliers,
        "out_dir": args.out_dir,
        "seed": args.seed,
    }
    return resolve_config(file_values, overrides)


def _out_dirs(cfg: RunConfig) -> tuple[Path, Path]:
    out = Path(cfg.out_dir)
    fig_dir = out / "figures"
    fig_dir.mkdir(parents=True, exist_ok=True)
    return out, fig_dir


def cmd_diagnose(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    chash = config_hash(cfg)
    cfg, panel, rows = diagnose_panel(cfg)
    out, fig_dir = _out_dirs(cfg)
    path = out / "diagnose.csv"
    reports.write_text(path, reports.diagnose_csv(rows, chash))
    figures.save_pvalue_bars(
        rows, fig_dir / "diagnose_pvalues.png",
        f"Ljung-Box p-values, {cfg.start} .. {cfg.end}", chash,
    )
    flagged = sum(1 for r in rows if r.p_value < 0.05)
    print(f"wrote {path} ({len(rows)} tickers, {flagged} with p < 0.05)")
    return 0


def cmd_cluster(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    run = run_clustering(cfg)
    out, fig_dir = _out_dirs(run.config)
    write_panel_csv(run.panel, out / "panel.csv", run.hash)
    for a in run.segments:
        stem = f"seg{a.index:02d}"
        reports.write_json(
            out / f"clustering_{stem}.json", reports.clustering_json_dict(a, run.hash)
        )
        reports.write_text(
            out / f"dendrogram_{stem}.csv", reports.dendrogram_csv(a, run.hash)
        )
        figures.save_correlation_heatmap(
            a.corr, fig_dir / f"corr_{stem}.png",
            f"correlations {a.start} .. {a.end}", run.hash,
        )
        figures.save_dendrogram(
            a.dendrogram, a.cut_height, fig_dir / f"dendrogram_{stem}.png",
            f"clustering {a.start} .. {a.end}", run.hash,
        )
    reports.write_text(
        out / "clustering_summary.csv",
        reports.clustering_summary_csv(run.segments, run.hash),
    )
    for a in run.segments:
        sizes = [len(c) for c in a.clustering.clusters]
        print(
            f"segment {a.index} [{a.start}..{a.end}]: "
            f"{len(sizes)} clusters {sizes}, {len(a.clustering.outliers)} outliers"
        )
    print(f"wrote {run.spec.m} clustering files to {out}")
    return 0


def cmd_graph(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    run = run_clustering(cfg)
    graph = graph_from_run(run)
    out, fig_dir = _out_dirs(run.config)
    periods = run.periods()
    write_panel_csv(run.panel, out / "panel.csv", run.hash)
    reports.write_json(out / "tgc.json", tgc_to_json_dict(graph, periods, run.hash))
    reports.write_text(out / "tgc.dot", tgc_to_dot(graph, periods, run.hash))
    figures.save_temporal_graph(graph, fig_dir / "tgc.png", periods, run.hash)
    n_clusters = len(graph.cluster_vertices())
    print(
        f"wrote {out / 'tgc.json'}: {graph.segments} segments, "
        f"{n_clusters} cluster vertices, {len(graph.edges)} edges"
    )
    return 0


def cmd_paths(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    graph, periods, chash = load_or_build_graph(cfg)
    stripped = strip_isolated(graph)
    paths = k_heaviest_paths(stripped, cfg.k)
    out, fig_dir = _out_dirs(cfg)
    reports.write_text(out / "paths.txt", reports.paths_text(stripped, paths, chash))
    reports.write_json(out / "paths.json", reports.paths_json_dict(stripped, paths, chash))
    highlight = {
        (u, v) for p in paths for u, v in zip(p.vertices, p.vertices[1:])
    }
    figures.save_temporal_graph(
        graph, fig_dir / "paths.png", periods, chash, highlight_edges=highlight
    )
    sys.stdout.write(reports.paths_text(stripped, paths, chash))
    return 0


def cmd_trace(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    if not cfg.stock:
        raise UsageError("trace needs --stock TICKER")
    graph, periods, chash = load_or_build_graph(cfg)
    trace = trace_stock(graph, cfg.stock)
    out, _ = _out_dirs(cfg)
    csv_path = out / f"trace_{cfg.stock}.csv"
    reports.write_text(csv_path, reports.trace_csv(graph, trace, periods, chash))
    reports.write_json(
        out / f"trace_{cfg.stock}.json",
        reports.trace_json_dict(graph, trace, periods, chash),
    )
    print(f"wrote {csv_path} ({len(trace.runs)} cluster runs)")
    return 0


def cmd_cover(args: argparse.Namespace) -> int:
    cfg = _config_from_args(args)
    graph, _, chash = load_or_build_graph(cfg)
    result = stock_cover(graph, graph.all_tickers(), cfg.include_outliers)
    out, _ = _out_dirs(cfg)
    reports.write_text(out / "cover.txt", reports.cover_text(result, chash))
    reports.write_json(out / "cover.json", reports.cover_json_dict(result, chash))
    sys.stdout.write(reports.cover_text(result, chash))
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    start = date.fromisoformat(args.start) if args.start else date(2008, 6, 2)
    sizes = [args.group_size] * args.groups
    series = synthetic_prices(
        group_sizes=sizes,
        days=args.days,
        rho=args.rho,
        seed=args.seed,
        start=start,
        vol=args.vol,
    )
    paths = write_price_csvs(series, args.out_dir)
    print(f"wrote {len(paths)} price files to {args.out_dir} (seed {args.seed})")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="tgclust", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    for name, func, help_text in (
        ("diagnose", cmd_diagnose, "Ljung-Box serial-correlation screen"),
        ("cluster", cmd_cluster, "per-segment correlation clustering"),
        ("graph", cmd_graph, "build and serialize the temporal cluster graph"),
        ("paths", cmd_paths, "k heaviest paths through the graph"),
        ("trace", cmd_trace, "per-segment location of one stock"),
        ("cover", cmd_cover, "greedy stock cover of all clusters"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_common_flags(p)
        p.set_defaults(func=func)

    p = sub.add_parser("synth", help="generate a seeded synthetic price panel")
    p.add_argument("--out", dest="out_dir", required=True, help="target data directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--groups", type=int, default=3, help="number of planted groups")
    p.add_argument("--group-size", dest="group_size", type=int, default=4)
    p.add_argument("--days", type=int, default=281, help="price rows per ticker")
    p.add_argument("--rho", type=float, default=0.8,
                   help="target within-group pairwise correlation")
    p.add_argument("--start", help="first price date (YYYY-MM-DD)")
    p.add_argument("--vol", type=float, default=0.02, help="daily return volatility")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
