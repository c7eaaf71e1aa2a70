"""Fast sorted-aggregation clustering in the Manhattan and Tanimoto metrics.

Points are sorted by a scalar score (Manhattan norm, or pop-count for binary
fingerprints), greedily aggregated into groups around starting points with a
provably sound score-window search cutoff, and the groups are merged into
clusters by starting-point proximity. Every decision is recorded in an
explain graph that can answer why two points ended up together or apart.
"""

from sortclust.aggregation import (
    AggregationResult,
    AggregationStats,
    aggregate,
    candidate_window_norm,
    candidate_window_tanimoto,
)
from sortclust.data import (
    DenseDataset,
    FingerprintSet,
    ScoredOrder,
    orthant_shift,
    pack_rows,
    score_and_sort,
    unpack_rows,
)
from sortclust.efficiency import (
    EfficiencyPoint,
    EfficiencyQuery,
    EfficiencyResult,
    SimulationResult,
    binomial_pmf,
    evaluate_grid,
    manhattan_pruning_efficiency,
    score_pmf,
    search_efficiency,
    similarity_probability,
    simulate_efficiency,
    window_probability,
)
from sortclust.errors import (
    DataFormatError,
    InternalInvariantError,
    InvalidInputError,
    InvalidSpecError,
    SortclustError,
    UndefinedDistanceError,
)
from sortclust.evaluation import ContingencyTable, adjusted_rand_index
from sortclust.explain import ExplainGraph, Explanation, build_explain_graph, explain_pair
from sortclust.io import (
    load_dense_csv,
    load_fingerprints,
    load_labels,
    save_fingerprints,
    save_labels,
)
from sortclust.merging import (
    DEFAULT_SCALE,
    MergeResult,
    MinPtsResult,
    Reassignment,
    apply_min_pts,
    merge_groups,
)
from sortclust.metrics import (
    DistanceKind,
    batch_manhattan,
    batch_tanimoto,
    manhattan_distance,
    tanimoto_distance,
    tanimoto_from_dot,
)
from sortclust.pipeline import (
    ClusterModel,
    PhaseTimings,
    cluster_data,
    cluster_dense,
    cluster_fingerprints,
)
from sortclust.synth import SynthSpec, flip_mask, generate

__version__ = "0.1.0"

__all__ = [
    "AggregationResult",
    "AggregationStats",
    "ClusterModel",
    "ContingencyTable",
    "DEFAULT_SCALE",
    "DataFormatError",
    "DenseDataset",
    "DistanceKind",
    "EfficiencyPoint",
    "EfficiencyQuery",
    "EfficiencyResult",
    "ExplainGraph",
    "Explanation",
    "FingerprintSet",
    "InternalInvariantError",
    "InvalidInputError",
    "InvalidSpecError",
    "MergeResult",
    "MinPtsResult",
    "PhaseTimings",
    "Reassignment",
    "ScoredOrder",
    "SimulationResult",
    "SortclustError",
    "SynthSpec",
    "UndefinedDistanceError",
    "adjusted_rand_index",
    "aggregate",
    "apply_min_pts",
    "batch_manhattan",
    "batch_tanimoto",
    "binomial_pmf",
    "build_explain_graph",
    "candidate_window_norm",
    "candidate_window_tanimoto",
    "cluster_data",
    "cluster_dense",
    "cluster_fingerprints",
    "evaluate_grid",
    "explain_pair",
    "flip_mask",
    "generate",
    "load_dense_csv",
    "load_fingerprints",
    "load_labels",
    "manhattan_distance",
    "manhattan_pruning_efficiency",
    "merge_groups",
    "orthant_shift",
    "pack_rows",
    "save_fingerprints",
    "save_labels",
    "score_and_sort",
    "score_pmf",
    "search_efficiency",
    "similarity_probability",
    "simulate_efficiency",
    "tanimoto_distance",
    "tanimoto_from_dot",
    "unpack_rows",
    "window_probability",
]
