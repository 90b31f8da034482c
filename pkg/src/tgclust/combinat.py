"""Graph queries over the temporal cluster graph: the k heaviest paths, the
trace of one stock across segments, and a greedy stock cover of all clusters.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import DataError
from .tgc import CLUSTER, OUTLIER_POOL, TemporalGraph, VertexId, strip_isolated


@dataclass(frozen=True)
class WeightedPath:
    """A chain of cluster vertices; weight is the sum of its edge weights."""

    vertices: tuple[VertexId, ...]
    weight: int


def _path_key(weight: int, path: tuple[VertexId, ...]) -> tuple:
    # heavier first, then lexicographically smallest vertex-id sequence
    return (-weight, tuple(v.sort_key for v in path))


def k_heaviest_paths(g: TemporalGraph, k: int) -> list[WeightedPath]:
    """The k heaviest maximal paths, found by per-vertex top-k dynamic
    programming over the segments.

    A path starts at any cluster with no incoming edge and runs until a
    cluster with no outgoing edge (conceptually extended to a shared sink by
    a weight-1 edge, which is removed again from the reported paths, so the
    ranking is unaffected). Ties are broken by the vertex-id sequence.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    g = strip_isolated(g)
    order = sorted((v.id for v in g.vertices), key=lambda vid: vid.sort_key)
    if not order:
        return []

    # best[v]: top-k (weight, path ending at v), path starting at an
    # in-degree-zero vertex
    best: dict[VertexId, list[tuple[int, tuple[VertexId, ...]]]] = {}
    for vid in order:
        incoming = g.predecessors(vid)
        if not incoming:
            best[vid] = [(0, (vid,))]
            continue
        candidates = []
        for src, weight in incoming:
            for w, path in best[src]:
                candidates.append((w + weight, path + (vid,)))
        candidates.sort(key=lambda c: _path_key(*c))
        best[vid] = candidates[:k]

    # attach the sink: weight-1 edges from every vertex with no outgoing edge
    final = []
    for vid in order:
        if not g.successors(vid):
            final.extend((w + 1, path) for w, path in best[vid])
    final.sort(key=lambda c: _path_key(*c))
    return [WeightedPath(vertices=path, weight=w - 1) for w, path in final[:k]]


@dataclass(frozen=True)
class TraceResult:
    """Where one ticker sits in every segment, plus its maximal cluster runs."""

    ticker: str
    statuses: tuple[tuple[int, VertexId | None], ...]
    runs: tuple[tuple[VertexId, ...], ...]


def trace_stock(g: TemporalGraph, ticker: str) -> TraceResult:
    """Locate the ticker per segment: its (unique) cluster, the outlier pool,
    or absent; runs are the maximal consecutive cluster stretches."""
    known = g.all_tickers()
    if ticker not in known:
        raise DataError(
            f"unknown ticker {ticker!r}; known tickers: {', '.join(sorted(known))}"
        )
    statuses: list[tuple[int, VertexId | None]] = []
    for segment in range(1, g.segments + 1):
        location: VertexId | None = None
        for v in g.vertices:
            if v.id.segment == segment and ticker in v.members:
                if v.id.kind == CLUSTER:
                    location = v.id
                    break
                if v.id.kind == OUTLIER_POOL and location is None:
                    location = v.id
        statuses.append((segment, location))

    runs: list[tuple[VertexId, ...]] = []
    current: list[VertexId] = []
    for _, location in statuses:
        if location is not None and location.kind == CLUSTER:
            current.append(location)
        elif current:
            runs.append(tuple(current))
            current = []
    if current:
        runs.append(tuple(current))
    return TraceResult(ticker=ticker, statuses=tuple(statuses), runs=tuple(runs))


@dataclass(frozen=True)
class CoverResult:
    """Greedy hitting set over the cluster vertices.

    ``cover`` lists tickers in selection order; ``covered`` maps each greedy
    pick to the clusters it retired. When outliers are included, tickers that
    appear in no cluster are appended after the greedy picks and recorded in
    ``uncovered_outliers``.
    """

    cover: tuple[str, ...]
    covered: dict[str, tuple[VertexId, ...]]
    universe_size: int
    uncovered_outliers: frozenset[str] | None = None

    @property
    def greedy_size(self) -> int:
        return len(self.covered)

    @property
    def ratio(self) -> float:
        """Greedy cover size over universe size, monitored against the 1/2
        bound claimed for the worst case (which repeated stocks can break)."""
        return self.greedy_size / self.universe_size if self.universe_size else 0.0

    @property
    def bound_violated(self) -> bool:
        return self.ratio > 0.5


def stock_cover(
    g: TemporalGraph, tickers: Iterable[str], include_outliers: bool = False
) -> CoverResult:
    """Greedily pick the ticker hitting the most still-uncovered clusters
    (ties to the lexicographically smallest ticker) until all are covered."""
    universe = sorted(set(tickers))
    g = strip_isolated(g)
    clusters = {v.id: frozenset(v.members) for v in g.cluster_vertices()}
    in_any = set().union(*clusters.values()) if clusters else set()
    missing = in_any - set(universe)
    if missing:
        raise DataError(
            f"cluster members missing from the ticker universe: {', '.join(sorted(missing))}"
        )

    uncovered = set(clusters)
    cover: list[str] = []
    covered: dict[str, tuple[VertexId, ...]] = {}
    while uncovered:
        counts: dict[str, int] = {}
        for vid in uncovered:
            for ticker in clusters[vid]:
                counts[ticker] = counts.get(ticker, 0) + 1
        pick = min(counts, key=lambda t: (-counts[t], t))
        hits = tuple(
            sorted((vid for vid in uncovered if pick in clusters[vid]),
                   key=lambda vid: vid.sort_key)
        )
        cover.append(pick)
        covered[pick] = hits
        uncovered.difference_update(hits)

    outliers: frozenset[str] | None = None
    if include_outliers:
        outliers = frozenset(t for t in universe if t not in in_any)
        cover.extend(sorted(outliers))
    return CoverResult(
        cover=tuple(cover),
        covered=covered,
        universe_size=len(universe),
        uncovered_outliers=outliers,
    )
