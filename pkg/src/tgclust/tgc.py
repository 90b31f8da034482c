"""The temporal graph of clusters: one vertex per segment cluster (plus one
outlier pool per segment), edges between consecutive segments weighted by the
number of shared tickers. Includes the JSON and DOT serializations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .cluster import Clustering
from .errors import DataError

CLUSTER = "cluster"
OUTLIER_POOL = "outlier_pool"
SINK = "sink"


@dataclass(frozen=True)
class VertexId:
    """Position of a vertex: segment number and index within the segment.

    Outlier pools use index 0; cluster indices start at 1 and are assigned by
    descending cluster size (ties by smallest member) for stable labels.
    """

    segment: int
    index: int
    kind: str = CLUSTER

    def __str__(self) -> str:
        return f"{self.segment}.{self.index}"

    @property
    def sort_key(self) -> tuple[int, int]:
        return (self.segment, self.index)


@dataclass(frozen=True)
class Vertex:
    id: VertexId
    members: tuple[str, ...]


@dataclass(frozen=True)
class Edge:
    src: VertexId
    dst: VertexId
    weight: int


@dataclass(eq=True)
class TemporalGraph:
    """Layered DAG of clusters across segments.

    Edges are kept both as a flat tuple and as per-vertex adjacency maps;
    the flat tuple is what gets serialized.
    """

    segments: int
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    _members: dict = field(init=False, repr=False, compare=False)
    _succ: dict = field(init=False, repr=False, compare=False)
    _pred: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        members: dict[VertexId, frozenset[str]] = {}
        per_segment_clusters: dict[int, set[str]] = {}
        for v in self.vertices:
            if v.id in members:
                raise DataError(f"duplicate vertex id {v.id}")
            members[v.id] = frozenset(v.members)
            if v.id.kind == CLUSTER:
                if len(v.members) < 2:
                    raise DataError(f"cluster vertex {v.id} has fewer than 2 members")
                seen = per_segment_clusters.setdefault(v.id.segment, set())
                if seen & set(v.members):
                    raise DataError(
                        f"segment {v.id.segment}: cluster members are not disjoint"
                    )
                seen |= set(v.members)
        succ: dict[VertexId, list[tuple[VertexId, int]]] = {}
        pred: dict[VertexId, list[tuple[VertexId, int]]] = {}
        for e in self.edges:
            if e.src not in members or e.dst not in members:
                raise DataError(f"edge {e.src}->{e.dst} references unknown vertex")
            if e.src.kind != CLUSTER or e.dst.kind != CLUSTER:
                raise DataError("edges may only join cluster vertices")
            if e.dst.segment != e.src.segment + 1:
                raise DataError(
                    f"edge {e.src}->{e.dst} must join consecutive segments"
                )
            if e.weight < 1:
                raise DataError(f"edge {e.src}->{e.dst} has non-positive weight")
            succ.setdefault(e.src, []).append((e.dst, e.weight))
            pred.setdefault(e.dst, []).append((e.src, e.weight))
        object.__setattr__(self, "_members", members)
        object.__setattr__(self, "_succ", succ)
        object.__setattr__(self, "_pred", pred)

    def members_of(self, vid: VertexId) -> frozenset[str]:
        return self._members[vid]

    def successors(self, vid: VertexId) -> tuple[tuple[VertexId, int], ...]:
        return tuple(self._succ.get(vid, ()))

    def predecessors(self, vid: VertexId) -> tuple[tuple[VertexId, int], ...]:
        return tuple(self._pred.get(vid, ()))

    def cluster_vertices(self) -> tuple[Vertex, ...]:
        return tuple(v for v in self.vertices if v.id.kind == CLUSTER)

    def all_tickers(self) -> frozenset[str]:
        out: set[str] = set()
        for v in self.vertices:
            out |= set(v.members)
        return frozenset(out)


def build_tgc(clusterings: Sequence[Clustering]) -> TemporalGraph:
    """Assemble the temporal graph from per-segment clusterings.

    Every multi-member cluster becomes a vertex; each segment also gets one
    outlier-pool vertex (kept even when empty, for reporting). Clusters in
    consecutive segments are linked whenever they share tickers, with the
    intersection size as the edge weight.
    """
    if not clusterings:
        raise DataError("no clusterings given")
    indices = [c.segment_index for c in clusterings]
    if indices != list(range(1, len(clusterings) + 1)):
        raise DataError(f"segment indices must be 1..m in order, got {indices}")

    vertices: list[Vertex] = []
    by_segment: dict[int, list[Vertex]] = {}
    for c in clusterings:
        segment_vertices = []
        pool = Vertex(
            id=VertexId(c.segment_index, 0, OUTLIER_POOL),
            members=tuple(sorted(c.outliers)),
        )
        vertices.append(pool)
        # index j by descending cluster size, ties by smallest member
        ordered = sorted(c.clusters, key=lambda cl: (-len(cl), cl))
        for j, cluster in enumerate(ordered, start=1):
            v = Vertex(id=VertexId(c.segment_index, j, CLUSTER), members=cluster)
            vertices.append(v)
            segment_vertices.append(v)
        by_segment[c.segment_index] = segment_vertices

    edges: list[Edge] = []
    for i in range(1, len(clusterings)):
        for u in by_segment[i]:
            u_members = set(u.members)
            for v in by_segment[i + 1]:
                weight = len(u_members & set(v.members))
                if weight >= 1:
                    edges.append(Edge(src=u.id, dst=v.id, weight=weight))
    return TemporalGraph(
        segments=len(clusterings), vertices=tuple(vertices), edges=tuple(edges)
    )


def strip_isolated(g: TemporalGraph) -> TemporalGraph:
    """Drop the outlier-pool vertices; clusters and edges are untouched."""
    kept = tuple(v for v in g.vertices if v.id.kind != OUTLIER_POOL)
    return TemporalGraph(segments=g.segments, vertices=kept, edges=g.edges)


# -- serialization ---------------------------------------------------------------

def tgc_to_json_dict(
    g: TemporalGraph,
    periods: Sequence[Mapping[str, str]] | None = None,
    config_hash: str = "",
) -> dict:
    """JSON-ready dict: m, vertices (id/kind/members) and edges (from/to/weight)."""
    doc: dict = {
        "m": g.segments,
        "vertices": [
            {"id": str(v.id), "kind": v.id.kind, "members": list(v.members)}
            for v in sorted(g.vertices, key=lambda v: v.id.sort_key)
        ],
        "edges": [
            {"from": str(e.src), "to": str(e.dst), "weight": e.weight}
            for e in sorted(g.edges, key=lambda e: (e.src.sort_key, e.dst.sort_key))
        ],
    }
    if periods is not None:
        doc["periods"] = list(periods)
    if config_hash:
        doc["config_hash"] = config_hash
    return doc


def _parse_vertex_id(raw: str, kind: str) -> VertexId:
    try:
        segment, index = raw.split(".")
        return VertexId(int(segment), int(index), kind)
    except (ValueError, TypeError):
        raise DataError(f"bad vertex id {raw!r}") from None


def tgc_from_json_dict(doc: Mapping) -> TemporalGraph:
    """Rebuild a TemporalGraph from its JSON dict."""
    try:
        m = int(doc["m"])
        raw_vertices = doc["vertices"]
        raw_edges = doc["edges"]
    except (KeyError, TypeError, ValueError):
        raise DataError("graph JSON must contain m, vertices and edges") from None
    vertices = []
    kinds: dict[str, str] = {}
    for rv in raw_vertices:
        vid = _parse_vertex_id(rv["id"], rv.get("kind", CLUSTER))
        kinds[rv["id"]] = vid.kind
        vertices.append(Vertex(id=vid, members=tuple(rv["members"])))
    edges = []
    for re_ in raw_edges:
        src = _parse_vertex_id(re_["from"], kinds.get(re_["from"], CLUSTER))
        dst = _parse_vertex_id(re_["to"], kinds.get(re_["to"], CLUSTER))
        edges.append(Edge(src=src, dst=dst, weight=int(re_["weight"])))
    return TemporalGraph(segments=m, vertices=tuple(vertices), edges=tuple(edges))


def _dot_node_name(vid: VertexId) -> str:
    prefix = {CLUSTER: "c", OUTLIER_POOL: "q", SINK: "t"}[vid.kind]
    return f"{prefix}{vid.segment}_{vid.index}"


def tgc_to_dot(
    g: TemporalGraph,
    periods: Sequence[Mapping[str, str]] | None = None,
    config_hash: str = "",
) -> str:
    """DOT rendering: one rank per segment, dashed boxes for outlier pools,
    edge labels carrying the intersection weights."""
    lines = ["digraph temporal_clusters {"]
    if config_hash:
        lines.insert(0, f"// config={config_hash}")
    lines.append("  rankdir=LR;")
    lines.append('  node [shape=box, fontname="Helvetica"];')
    period_label = {}
    if periods is not None:
        for p in periods:
            period_label[int(p["segment"])] = f'{p["start"]} .. {p["end"]}'

    by_segment: dict[int, list[Vertex]] = {}
    for v in g.vertices:
        by_segment.setdefault(v.id.segment, []).append(v)
    for segment in sorted(by_segment):
        lines.append("  { rank=same;")
        label = period_label.get(segment, f"segment {segment}")
        lines.append(
            f'    p{segment} [label="{label}", shape=box, '
            'style=filled, fillcolor=palegreen];'
        )
        for v in sorted(by_segment[segment], key=lambda v: v.id.sort_key):
            members = " ".join(v.members) if v.members else "(empty)"
            if v.id.kind == OUTLIER_POOL:
                lines.append(
                    f'    {_dot_node_name(v.id)} [label="Q{segment}\\n{members}", '
                    "style=dashed];"
                )
            else:
                lines.append(
                    f'    {_dot_node_name(v.id)} [label="{v.id}\\n{members}", '
                    "style=filled, fillcolor=lightblue];"
                )
        lines.append("  }")
    ordered_segments = sorted(by_segment)
    for a, b in zip(ordered_segments, ordered_segments[1:]):
        lines.append(f"  p{a} -> p{b} [style=invis];")
    for e in sorted(g.edges, key=lambda e: (e.src.sort_key, e.dst.sort_key)):
        lines.append(
            f'  {_dot_node_name(e.src)} -> {_dot_node_name(e.dst)} '
            f'[label="{e.weight}"];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
