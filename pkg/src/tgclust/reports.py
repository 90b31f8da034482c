"""Report serializers: clustering JSON, dendrogram merge tables, arrow-notation
path listings, cover and trace reports. Every file carries the config hash
that produced it.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Mapping, Sequence

from .combinat import CoverResult, TraceResult, WeightedPath
from .pipeline import DiagnosticRow, SegmentAnalysis
from .tgc import OUTLIER_POOL, TemporalGraph


def write_json(path: str | Path, doc: Mapping) -> None:
    Path(path).write_text(
        json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def write_text(path: str | Path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


# -- diagnostics -----------------------------------------------------------------

def diagnose_csv(rows: Sequence[DiagnosticRow], config_hash: str) -> str:
    """Ljung-Box screen, one ticker per row; p-values below 0.05 are flagged."""
    lines = [f"# config={config_hash}", "ticker,lb_statistic,lag,p_value,flag"]
    for row in sorted(rows, key=lambda r: r.ticker):
        flag = "*" if row.p_value < 0.05 else ""
        lines.append(
            f"{row.ticker},{row.statistic:.6f},{row.lag},{row.p_value:.6f},{flag}"
        )
    return "\n".join(lines) + "\n"


# -- clustering ------------------------------------------------------------------

def clustering_json_dict(analysis: SegmentAnalysis, config_hash: str) -> dict:
    return {
        "segment": analysis.index,
        "start": analysis.start.isoformat(),
        "end": analysis.end.isoformat(),
        "clusters": [list(c) for c in analysis.clustering.clusters],
        "outliers": list(analysis.clustering.outliers),
        "n_dates": analysis.n_dates,
        "thresholds": {
            "alpha": analysis.thresholds.alpha,
            "critical_point": analysis.thresholds.c_alpha,
            "delta": analysis.thresholds.delta,
            "sign": analysis.thresholds.sign,
        },
        "cut_height": analysis.cut_height,
        "config_hash": config_hash,
    }


def dendrogram_csv(analysis: SegmentAnalysis, config_hash: str) -> str:
    """Merge table: leaf i is node i, merge step t creates node n_leaves + t."""
    lines = [
        f"# config={config_hash}",
        f"# leaves={' '.join(analysis.dendrogram.leaves)}",
        "step,left,right,height",
    ]
    for step, (left, right, height) in enumerate(analysis.dendrogram.merges):
        lines.append(f"{step},{left},{right},{height!r}")
    return "\n".join(lines) + "\n"


def clustering_summary_csv(
    segments: Sequence[SegmentAnalysis], config_hash: str
) -> str:
    lines = [
        f"# config={config_hash}",
        "segment,start,end,n_dates,n_clusters,cluster_sizes,n_outliers",
    ]
    for a in segments:
        sizes = " ".join(str(len(c)) for c in a.clustering.clusters)
        lines.append(
            f"{a.index},{a.start.isoformat()},{a.end.isoformat()},"
            f"{a.n_dates},{len(a.clustering.clusters)},{sizes},"
            f"{len(a.clustering.outliers)}"
        )
    return "\n".join(lines) + "\n"


# -- paths -----------------------------------------------------------------------

def _edge_weights(g: TemporalGraph, path: WeightedPath) -> list[int]:
    weights = []
    for u, v in zip(path.vertices, path.vertices[1:]):
        weight = next(w for dst, w in g.successors(u) if dst == v)
        weights.append(weight)
    return weights


def paths_text(g: TemporalGraph, paths: Sequence[WeightedPath], config_hash: str) -> str:
    """Arrow notation, heaviest first: ``1.4 --5--> 2.1 ... (total=27)``."""
    lines = [f"# config={config_hash}"]
    if not paths:
        lines.append("no clusters")
    for p in paths:
        weights = _edge_weights(g, p)
        parts = [str(p.vertices[0])]
        for w, v in zip(weights, p.vertices[1:]):
            parts.append(f"--{w}--> {v}")
        lines.append(" ".join(parts) + f"  (total={p.weight})")
    return "\n".join(lines) + "\n"


def paths_json_dict(
    g: TemporalGraph, paths: Sequence[WeightedPath], config_hash: str
) -> dict:
    out = []
    for p in paths:
        out.append(
            {
                "vertices": [
                    {"id": str(v), "members": sorted(g.members_of(v))}
                    for v in p.vertices
                ],
                "edge_weights": _edge_weights(g, p),
                "weight": p.weight,
            }
        )
    return {"paths": out, "config_hash": config_hash}


# -- trace -----------------------------------------------------------------------

def _location_label(location) -> str:
    if location is None:
        return "absent"
    if location.kind == OUTLIER_POOL:
        return "outliers"
    return str(location)


def trace_csv(
    g: TemporalGraph,
    trace: TraceResult,
    periods: Sequence[Mapping[str, object]],
    config_hash: str,
) -> str:
    bounds = {int(p["segment"]): (p["start"], p["end"]) for p in periods}
    lines = [f"# config={config_hash}", "segment,start,end,location,members"]
    for segment, location in trace.statuses:
        start, end = bounds.get(segment, ("", ""))
        members = ""
        if location is not None:
            members = " ".join(sorted(g.members_of(location)))
        lines.append(f"{segment},{start},{end},{_location_label(location)},{members}")
    return "\n".join(lines) + "\n"


def trace_json_dict(
    g: TemporalGraph,
    trace: TraceResult,
    periods: Sequence[Mapping[str, object]],
    config_hash: str,
) -> dict:
    bounds = {int(p["segment"]): (p["start"], p["end"]) for p in periods}
    statuses = []
    for segment, location in trace.statuses:
        start, end = bounds.get(segment, (None, None))
        statuses.append(
            {
                "segment": segment,
                "start": start,
                "end": end,
                "location": _location_label(location),
                "members": sorted(g.members_of(location)) if location is not None else [],
            }
        )
    return {
        "ticker": trace.ticker,
        "statuses": statuses,
        "runs": [[str(v) for v in run] for run in trace.runs],
        "config_hash": config_hash,
    }


# -- cover -----------------------------------------------------------------------

def cover_text(result: CoverResult, config_hash: str) -> str:
    lines = [f"# config={config_hash}"]
    if not result.covered:
        lines.append("no clusters")
    else:
        lines.append("cover: " + " ".join(result.cover))
        for ticker in result.cover:
            if ticker in result.covered:
                ids = " ".join(str(v) for v in result.covered[ticker])
                lines.append(f"  {ticker}: {ids}")
            else:
                lines.append(f"  {ticker}: (in no cluster; appended outlier)")
    lines.append(
        f"greedy size {result.greedy_size} of {result.universe_size} tickers "
        f"(ratio {result.ratio:.4f})"
    )
    if result.bound_violated:
        lines.append("warning: ratio exceeds the 1/2 worst-case bound")
    if result.uncovered_outliers is not None:
        lines.append(
            "outliers appended: "
            + (" ".join(sorted(result.uncovered_outliers)) or "(none)")
        )
    return "\n".join(lines) + "\n"


def cover_json_dict(result: CoverResult, config_hash: str) -> dict:
    return {
        "cover": list(result.cover),
        "covered": {t: [str(v) for v in ids] for t, ids in result.covered.items()},
        "greedy_size": result.greedy_size,
        "universe_size": result.universe_size,
        "ratio": result.ratio,
        "bound_violated": result.bound_violated,
        "uncovered_outliers": (
            sorted(result.uncovered_outliers)
            if result.uncovered_outliers is not None
            else None
        ),
        "config_hash": config_hash,
    }
