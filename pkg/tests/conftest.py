from __future__ import annotations

from datetime import date, timedelta

import numpy as np
import pytest

from tgclust.cluster import Clustering
from tgclust.ingest import AlignedPanel
from tgclust.tgc import CLUSTER, Edge, TemporalGraph, Vertex, VertexId, build_tgc


def make_panel(columns: dict[str, list[float]], start=date(2020, 1, 1)) -> AlignedPanel:
    """Panel over consecutive calendar days, one column per ticker."""
    n = len(next(iter(columns.values())))
    dates = tuple(start + timedelta(days=i) for i in range(n))
    return AlignedPanel(
        dates=dates, columns={t: np.asarray(v, dtype=float) for t, v in columns.items()}
    )


def make_graph(
    layer_members: list[list[tuple[str, ...]]],
    edges: list[tuple[int, int, int, int, int]] | None = None,
) -> TemporalGraph:
    """Hand-built graph: layer_members[i][j] is the member tuple of cluster
    (i+1).(j+1); edges as (seg_u, idx_u, seg_v, idx_v, weight). When edges is
    None they are derived from member intersections via build_tgc."""
    if edges is None:
        clusterings = [
            Clustering(segment_index=i + 1, clusters=tuple(layer), outliers=())
            for i, layer in enumerate(layer_members)
        ]
        return build_tgc(clusterings)
    vertices = [
        Vertex(id=VertexId(i + 1, j + 1, CLUSTER), members=members)
        for i, layer in enumerate(layer_members)
        for j, members in enumerate(layer)
    ]
    edge_objs = tuple(
        Edge(
            src=VertexId(su, iu, CLUSTER),
            dst=VertexId(sv, iv, CLUSTER),
            weight=w,
        )
        for su, iu, sv, iv, w in edges
    )
    return TemporalGraph(
        segments=len(layer_members), vertices=tuple(vertices), edges=edge_objs
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
