"""Matplotlib renderings written next to the delimited reports: the per-segment
correlation heatmap, the per-segment dendrogram with its cut line, and the
layered temporal graph.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .cluster import Dendrogram
from .stats import CorrelationMatrix
from .tgc import CLUSTER, OUTLIER_POOL, TemporalGraph


def _finish(fig, path: str | Path, config_hash: str) -> None:
    if config_hash:
        fig.text(0.99, 0.01, f"config={config_hash}", ha="right", va="bottom",
                 fontsize=6, color="gray")
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_correlation_heatmap(
    corr: CorrelationMatrix, path: str | Path, title: str, config_hash: str = ""
) -> None:
    n = len(corr.tickers)
    side = max(4.0, 0.3 * n + 1.5)
    fig, ax = plt.subplots(figsize=(side + 1.2, side))
    im = ax.imshow(corr.values, vmin=-1.0, vmax=1.0, cmap="RdBu_r")
    ax.set_xticks(range(n))
    ax.set_yticks(range(n))
    ax.set_xticklabels(corr.tickers, rotation=90, fontsize=7)
    ax.set_yticklabels(corr.tickers, fontsize=7)
    ax.set_title(title)
    fig.colorbar(im, ax=ax, fraction=0.046, pad=0.04)
    fig.tight_layout()
    _finish(fig, path, config_hash)


def _leaf_order(dend: Dendrogram) -> list[int]:
    # in-order traversal from the root so brackets never cross
    n = len(dend.leaves)
    children = {n + t: (left, right) for t, (left, right, _) in enumerate(dend.merges)}
    order: list[int] = []
    stack = [n + len(dend.merges) - 1 if dend.merges else 0]
    while stack:
        node = stack.pop()
        if node in children:
            left, right = children[node]
            stack.append(right)
            stack.append(left)
        else:
            order.append(node)
    return order


def save_dendrogram(
    dend: Dendrogram,
    cut_height: float,
    path: str | Path,
    title: str,
    config_hash: str = "",
) -> None:
    n = len(dend.leaves)
    order = _leaf_order(dend)
    x = {leaf: float(pos) for pos, leaf in enumerate(order)}
    y = {leaf: 0.0 for leaf in range(n)}

    fig, ax = plt.subplots(figsize=(max(5.0, 0.4 * n + 1.0), 4.5))
    for t, (left, right, height) in enumerate(dend.merges):
        xl, xr = x[left], x[right]
        ax.plot([xl, xl, xr, xr], [y[left], height, height, y[right]],
                color="tab:blue", linewidth=1.2)
        node = n + t
        x[node] = 0.5 * (xl + xr)
        y[node] = height
    ax.axhline(cut_height, color="tab:red", linestyle="--", linewidth=1.0,
               label=f"cut at {cut_height:.3f}")
    ax.set_xticks(range(n))
    ax.set_xticklabels([dend.leaves[i] for i in order], rotation=90, fontsize=7)
    ax.set_ylabel("merge height")
    ax.set_title(title)
    ax.legend(loc="upper right", fontsize=7)
    fig.tight_layout()
    _finish(fig, path, config_hash)


def save_temporal_graph(
    g: TemporalGraph,
    path: str | Path,
    periods: Sequence[Mapping[str, object]] | None = None,
    config_hash: str = "",
    highlight_edges: set | None = None,
) -> None:
    """Segments as columns; clusters stacked above the outlier pool, edges
    annotated with their intersection weights. ``highlight_edges`` is a set of
    (src, dst) vertex-id pairs drawn emphasized (used for path reports)."""
    bounds = {}
    if periods:
        bounds = {int(p["segment"]): (p["start"], p["end"]) for p in periods}
    highlight_edges = highlight_edges or set()

    positions: dict = {}
    max_rows = 1
    for v in g.vertices:
        row = v.id.index if v.id.kind == CLUSTER else 0
        positions[v.id] = (float(v.id.segment), float(row))
        max_rows = max(max_rows, row + 1)

    fig, ax = plt.subplots(
        figsize=(max(6.0, 1.8 * g.segments + 1.0), max(4.0, 0.9 * max_rows + 1.5))
    )
    for e in g.edges:
        x1, y1 = positions[e.src]
        x2, y2 = positions[e.dst]
        hot = (e.src, e.dst) in highlight_edges
        ax.plot([x1, x2], [y1, y2],
                color="tab:red" if hot else "gray",
                linewidth=2.0 if hot else 0.8, zorder=1)
        ax.text(0.5 * (x1 + x2), 0.5 * (y1 + y2), str(e.weight),
                fontsize=7, ha="center", va="bottom", color="dimgray", zorder=3)
    for v in g.vertices:
        xpos, ypos = positions[v.id]
        is_pool = v.id.kind == OUTLIER_POOL
        label = ("Q%d" % v.id.segment if is_pool else str(v.id))
        members = "\n".join(v.members) if v.members else "-"
        ax.text(
            xpos, ypos, f"{label}\n{members}",
            fontsize=6, ha="center", va="center", zorder=2,
            bbox=dict(
                boxstyle="round,pad=0.3",
                facecolor="mistyrose" if is_pool else "lightblue",
                edgecolor="gray",
                linestyle="--" if is_pool else "-",
            ),
        )
    for segment in range(1, g.segments + 1):
        start, end = bounds.get(segment, ("", ""))
        caption = f"{start}\n{end}" if start else f"segment {segment}"
        ax.text(segment, -0.9, caption, fontsize=6, ha="center", va="top",
                bbox=dict(boxstyle="round,pad=0.3", facecolor="palegreen",
                          edgecolor="gray"))
    ax.set_xlim(0.3, g.segments + 0.7)
    ax.set_ylim(-1.8, max_rows + 0.5)
    ax.axis("off")
    ax.set_title("temporal graph of clusters")
    fig.tight_layout()
    _finish(fig, path, config_hash)


def save_pvalue_bars(
    rows, path: str | Path, title: str, config_hash: str = ""
) -> None:
    """Ljung-Box p-values per ticker with the 0.05 significance line."""
    rows = sorted(rows, key=lambda r: r.ticker)
    fig, ax = plt.subplots(figsize=(max(5.0, 0.35 * len(rows) + 1.0), 4.0))
    colors = ["tab:red" if r.p_value < 0.05 else "tab:blue" for r in rows]
    ax.bar(range(len(rows)), [r.p_value for r in rows], color=colors)
    ax.axhline(0.05, color="black", linestyle="--", linewidth=0.8)
    ax.set_xticks(range(len(rows)))
    ax.set_xticklabels([r.ticker for r in rows], rotation=90, fontsize=7)
    ax.set_ylabel("p-value")
    ax.set_title(title)
    fig.tight_layout()
    _finish(fig, path, config_hash)
