"""End-to-end orchestration: files -> returns -> aligned panel -> per-segment
clusterings -> temporal graph. Pure functions over a RunConfig; all outputs
are deterministic for a fixed config and data directory.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import date
from pathlib import Path

from . import cluster as cl
from . import stats
from .config import RunConfig, config_hash, make_segment_spec, with_window
from .errors import DataError
from .ingest import (
    AlignedPanel,
    SegmentSpec,
    align_panel,
    compute_returns,
    load_price_dir,
    restrict_panel,
    segment_panel,
)
from .tgc import TemporalGraph, build_tgc, tgc_from_json_dict


@dataclass(frozen=True)
class SegmentAnalysis:
    """Everything derived for one time segment."""

    index: int
    start: date
    end: date
    n_dates: int
    thresholds: stats.SignificanceThresholds
    corr: stats.CorrelationMatrix
    excluded: tuple[str, ...]
    dendrogram: cl.Dendrogram
    cut_height: float
    clustering: cl.Clustering


@dataclass(frozen=True)
class ClusteringRun:
    config: RunConfig
    hash: str  # over the pre-windowing config, so cached and inline runs agree
    panel: AlignedPanel
    spec: SegmentSpec
    segments: tuple[SegmentAnalysis, ...]

    def periods(self) -> list[dict[str, object]]:
        return [
            {"segment": a.index, "start": a.start.isoformat(), "end": a.end.isoformat()}
            for a in self.segments
        ]


def build_panel(cfg: RunConfig, allow_single: bool = False) -> tuple[RunConfig, AlignedPanel]:
    """Load, compute returns, align on common dates and restrict to the window.

    Diagnostics work on a lone ticker (allow_single); clustering needs >= 2.
    """
    prices = load_price_dir(cfg.data_dir, cfg.tickers)
    series = [compute_returns(p, cfg.return_mode) for p in prices]
    if allow_single and len(series) == 1:
        only = series[0]
        panel = AlignedPanel(dates=only.dates, columns={only.ticker: only.values})
    else:
        panel = align_panel(series)
    cfg = with_window(cfg, panel.dates)
    return cfg, restrict_panel(panel, cfg.start, cfg.end)


def analyze_segment(
    sub: AlignedPanel, index: int, start: date, end: date, cfg: RunConfig
) -> SegmentAnalysis:
    """Cluster one segment: thresholds from its own sample size, correlation
    groups, Jaccard dissimilarity, agglomerative clustering, mid-level cut."""
    thresholds = stats.significance_thresholds(
        n=len(sub.dates), alpha=cfg.alpha, sign=cfg.sign, delta_override=cfg.delta
    )
    corr = stats.correlation_matrix(sub)
    excluded = tuple(t for t in sub.tickers if t not in set(corr.tickers))
    groups = cl.correlation_groups(corr, thresholds.delta, thresholds.sign)
    dissim = cl.dissimilarity_matrix(groups)
    dendrogram = cl.hierarchical_cluster(dissim, cfg.linkage)
    cut = cfg.cut_height if cfg.cut_height is not None else dendrogram.max_height / 2.0
    partition = cl.cut_mid_level(dendrogram, cut)
    clustering = cl.pool_outliers(partition, index, extra_outliers=excluded)
    return SegmentAnalysis(
        index=index,
        start=start,
        end=end,
        n_dates=len(sub.dates),
        thresholds=thresholds,
        corr=corr,
        excluded=excluded,
        dendrogram=dendrogram,
        cut_height=cut,
        clustering=clustering,
    )


def run_clustering(cfg: RunConfig) -> ClusteringRun:
    """The full per-segment analysis for a config."""
    chash = config_hash(cfg)
    cfg, panel = build_panel(cfg)
    spec = make_segment_spec(cfg, panel.dates)
    subs = segment_panel(panel, spec)
    segments = tuple(
        analyze_segment(sub, i, start, end, cfg)
        for i, (sub, (start, end)) in enumerate(zip(subs, spec.boundaries), start=1)
    )
    return ClusteringRun(config=cfg, hash=chash, panel=panel, spec=spec, segments=segments)


def graph_from_run(run: ClusteringRun) -> TemporalGraph:
    return build_tgc([a.clustering for a in run.segments])


def load_or_build_graph(
    cfg: RunConfig,
) -> tuple[TemporalGraph, list[dict[str, object]], str]:
    """Use a cached tgc.json from the output directory when present, otherwise
    run the pipeline inline; both routes yield the same graph."""
    cache = Path(cfg.out_dir) / "tgc.json"
    if cache.is_file():
        try:
            doc = json.loads(cache.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise DataError(f"cached graph {cache} is not valid JSON: {exc}") from None
        graph = tgc_from_json_dict(doc)
        periods = list(doc.get("periods", []))
        return graph, periods, config_hash(cfg)
    run = run_clustering(cfg)
    return graph_from_run(run), run.periods(), run.hash


@dataclass(frozen=True)
class DiagnosticRow:
    ticker: str
    statistic: float
    lag: int
    p_value: float


def diagnose_panel(cfg: RunConfig) -> tuple[RunConfig, AlignedPanel, list[DiagnosticRow]]:
    """Serial-correlation screen over the configured window, one row per ticker."""
    cfg, panel = build_panel(cfg, allow_single=True)
    n = len(panel.dates)
    lag = cfg.lag if cfg.lag is not None else stats.default_ljung_box_lag(n)
    if not 1 <= lag < n:
        raise DataError(f"lag {lag} invalid for a window of {n} returns")
    rows = []
    for ticker in panel.tickers:
        res = stats.ljung_box(panel.columns[ticker], lag)
        rows.append(
            DiagnosticRow(
                ticker=ticker, statistic=res.statistic, lag=res.lag, p_value=res.p_value
            )
        )
    return cfg, panel, rows
