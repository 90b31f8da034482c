"""Per-segment clustering of stock returns and queries over the resulting
temporal graph of clusters."""

from .cluster import (
    Clustering,
    CorrelationGroup,
    Dendrogram,
    DissimilarityMatrix,
    correlation_groups,
    cut_mid_level,
    dissimilarity_matrix,
    hierarchical_cluster,
    jaccard_distance,
    pool_outliers,
)
from .combinat import (
    CoverResult,
    TraceResult,
    WeightedPath,
    k_heaviest_paths,
    stock_cover,
    trace_stock,
)
from .errors import DataError, UsageError
from .ingest import (
    AlignedPanel,
    PriceSeries,
    ReturnSeries,
    SegmentSpec,
    align_panel,
    compute_returns,
    parse_ohlc,
    segment_panel,
)
from .stats import (
    CorrelationMatrix,
    LjungBoxResult,
    SignificanceThresholds,
    chi_square_upper_tail,
    correlation_critical_point,
    correlation_matrix,
    delta_threshold,
    ljung_box,
    pearson,
    sample_acf,
    t_upper_quantile,
)
from .tgc import TemporalGraph, Vertex, VertexId, build_tgc, strip_isolated

__version__ = "0.1.0"

__all__ = [
    "AlignedPanel",
    "Clustering",
    "CorrelationGroup",
    "CorrelationMatrix",
    "CoverResult",
    "DataError",
    "Dendrogram",
    "DissimilarityMatrix",
    "LjungBoxResult",
    "PriceSeries",
    "ReturnSeries",
    "SegmentSpec",
    "SignificanceThresholds",
    "TemporalGraph",
    "TraceResult",
    "UsageError",
    "Vertex",
    "VertexId",
    "WeightedPath",
    "align_panel",
    "build_tgc",
    "chi_square_upper_tail",
    "compute_returns",
    "correlation_critical_point",
    "correlation_groups",
    "correlation_matrix",
    "cut_mid_level",
    "delta_threshold",
    "dissimilarity_matrix",
    "hierarchical_cluster",
    "jaccard_distance",
    "k_heaviest_paths",
    "ljung_box",
    "parse_ohlc",
    "pearson",
    "pool_outliers",
    "sample_acf",
    "segment_panel",
    "stock_cover",
    "strip_isolated",
    "t_upper_quantile",
    "trace_stock",
]
