"""Per-segment clustering: correlation groups, Jaccard dissimilarity,
agglomerative clustering with a mid-level dendrogram cut, and the outlier pool.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Literal, Mapping

import numpy as np

from .stats import CorrelationMatrix, Sign

Linkage = Literal["complete", "average", "single"]

LINKAGES: tuple[str, ...] = ("complete", "average", "single")


@dataclass(frozen=True)
class CorrelationGroup:
    """All stocks whose returns correlate with the anchor beyond the threshold.

    The anchor always belongs to its own group, so a stock correlated with a
    single partner still overlaps that partner's group.
    """

    anchor: str
    members: frozenset[str]

    def __post_init__(self) -> None:
        if self.anchor not in self.members:
            raise ValueError(f"anchor {self.anchor} missing from its own group")


def correlation_groups(
    corr: CorrelationMatrix, delta: float, sign: Sign = "positive"
) -> dict[str, CorrelationGroup]:
    """Group, per anchor stock, every stock correlated beyond the threshold."""
    if delta == 0.0:
        raise ValueError("threshold must be non-zero")
    if sign not in ("positive", "negative"):
        raise ValueError(f"unknown sign {sign!r}")
    groups = {}
    for i, anchor in enumerate(corr.tickers):
        members = {anchor}
        for j, other in enumerate(corr.tickers):
            if i == j:
                continue
            r = corr.values[i, j]
            if (sign == "positive" and r > delta) or (sign == "negative" and r < delta):
                members.add(other)
        groups[anchor] = CorrelationGroup(anchor=anchor, members=frozenset(members))
    return groups


def jaccard_distance(g1: Iterable[str], g2: Iterable[str]) -> float:
    """1 - |intersection| / |union|; two empty sets are at distance 0."""
    s1, s2 = set(g1), set(g2)
    union = len(s1 | s2)
    if union == 0:
        return 0.0
    return 1.0 - len(s1 & s2) / union


@dataclass(frozen=True)
class DissimilarityMatrix:
    """Square matrix of Jaccard distances between correlation groups."""

    tickers: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        n = len(self.tickers)
        if self.values.shape != (n, n):
            raise ValueError("matrix shape does not match ticker count")


def dissimilarity_matrix(groups: Mapping[str, CorrelationGroup]) -> DissimilarityMatrix:
    """Jaccard distance between every pair of correlation groups."""
    tickers = tuple(sorted(groups))
    if len(tickers) < 2:
        raise ValueError("need at least 2 tickers")
    n = len(tickers)
    values = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d = jaccard_distance(groups[tickers[i]].members, groups[tickers[j]].members)
            values[i, j] = values[j, i] = d
    return DissimilarityMatrix(tickers=tickers, values=values)


@dataclass(frozen=True)
class Dendrogram:
    """Agglomerative merge sequence.

    Nodes are numbered scipy-style: leaf i is position i in ``leaves``, the
    node created by merge step t is ``len(leaves) + t``. Heights never
    decrease for the supported linkages.
    """

    leaves: tuple[str, ...]
    merges: tuple[tuple[int, int, float], ...]

    def __post_init__(self) -> None:
        if len(self.merges) != max(0, len(self.leaves) - 1):
            raise ValueError("a full agglomeration has |leaves| - 1 merges")
        heights = [h for _, _, h in self.merges]
        if any(b < a - 1e-12 for a, b in zip(heights, heights[1:])):
            raise ValueError("merge heights must be non-decreasing")

    @property
    def max_height(self) -> float:
        return self.merges[-1][2] if self.merges else 0.0

    def node_leaf_sets(self) -> dict[int, frozenset[int]]:
        """Leaf-index set under every node id."""
        n = len(self.leaves)
        sets = {i: frozenset([i]) for i in range(n)}
        for t, (left, right, _) in enumerate(self.merges):
            sets[n + t] = sets[left] | sets[right]
        return sets


def _linkage_distance(values: np.ndarray, ia: list[int], ib: list[int], linkage: str) -> float:
    block = values[np.ix_(ia, ib)]
    if linkage == "complete":
        return float(block.max())
    if linkage == "average":
        return float(block.mean())
    return float(block.min())


def hierarchical_cluster(m: DissimilarityMatrix, linkage: Linkage = "complete") -> Dendrogram:
    """Agglomerative clustering over a dissimilarity matrix.

    Each step merges the pair of current clusters at minimum linkage distance;
    ties are broken by the lexicographically smallest pair of sorted member
    labels, which makes the merge sequence fully deterministic.
    """
    if linkage not in LINKAGES:
        raise ValueError(f"unknown linkage {linkage!r}; choose from {LINKAGES}")
    n = len(m.tickers)
    if n < 2:
        raise ValueError("need at least 2 leaves")

    leaf_lists: dict[int, list[int]] = {i: [i] for i in range(n)}
    labels: dict[int, tuple[str, ...]] = {i: (m.tickers[i],) for i in range(n)}
    merges = []
    for step in range(n - 1):
        best = None
        for a, b in combinations(sorted(leaf_lists), 2):
            d = _linkage_distance(m.values, leaf_lists[a], leaf_lists[b], linkage)
            pair = (labels[a], labels[b]) if labels[a] <= labels[b] else (labels[b], labels[a])
            key = (d, pair)
            if best is None or key < best[0]:
                left, right = (a, b) if labels[a] <= labels[b] else (b, a)
                best = (key, left, right, d)
        _, left, right, d = best
        new_id = n + step
        leaf_lists[new_id] = leaf_lists.pop(left) + leaf_lists.pop(right)
        labels[new_id] = tuple(sorted(labels.pop(left) + labels.pop(right)))
        merges.append((left, right, d))
    return Dendrogram(leaves=m.tickers, merges=tuple(merges))


def cut_mid_level(
    dend: Dendrogram, cut_height: float | None = None
) -> tuple[tuple[str, ...], ...]:
    """Flat partition from cutting the tree at half its maximum merge height.

    Clusters are the maximal subtrees whose internal merges all sit at or
    below the cut; an explicit ``cut_height`` overrides the mid-level rule.
    Returned clusters are sorted by descending size, then by members.
    """
    n = len(dend.leaves)
    if n == 0:
        return ()
    h = dend.max_height / 2.0 if cut_height is None else cut_height
    parts: dict[int, list[int]] = {i: [i] for i in range(n)}
    for t, (left, right, height) in enumerate(dend.merges):
        if height <= h:
            parts[n + t] = parts.pop(left) + parts.pop(right)
    clusters = [tuple(sorted(dend.leaves[i] for i in leaf_ids)) for leaf_ids in parts.values()]
    clusters.sort(key=lambda c: (-len(c), c))
    return tuple(clusters)


@dataclass(frozen=True)
class Clustering:
    """One segment's multi-member clusters plus its outlier pool."""

    segment_index: int
    clusters: tuple[tuple[str, ...], ...]
    outliers: tuple[str, ...]

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for cluster in self.clusters:
            if len(cluster) < 2:
                raise ValueError("clusters must have at least 2 members")
            if seen & set(cluster):
                raise ValueError("clusters must be pairwise disjoint")
            seen |= set(cluster)
        if seen & set(self.outliers):
            raise ValueError("outliers must not appear in any cluster")

    @property
    def tickers(self) -> frozenset[str]:
        out = set(self.outliers)
        for cluster in self.clusters:
            out |= set(cluster)
        return frozenset(out)


def pool_outliers(
    partition: Iterable[Iterable[str]],
    segment_index: int,
    extra_outliers: Iterable[str] = (),
) -> Clustering:
    """Move singleton clusters (and any explicitly excluded tickers) into the
    outlier pool, keeping only clusters with two or more members."""
    clusters = []
    outliers = set(extra_outliers)
    for group in partition:
        group = tuple(sorted(group))
        if len(group) >= 2:
            clusters.append(group)
        else:
            outliers.update(group)
    clusters.sort(key=lambda c: (-len(c), c))
    return Clustering(
        segment_index=segment_index,
        clusters=tuple(clusters),
        outliers=tuple(sorted(outliers)),
    )
