"""Correlation-distance hierarchies and convergence diagnostics for panels of
annual macroeconomic growth rates."""

from .errors import DegenerateDataError, InputError, InsufficientDataError, MacroClusterError, ParseError
from .factorgraph import FactorGraph, VariableCluster, build_factor_graph, entropy, enumerate_clusters
from .hierarchy import (
    HierarchyTree,
    build_chain,
    build_lmst,
    build_mst,
    export_dot,
    subdominant_ultrametric,
    threshold_clusters,
)
from .mamlp import (
    MlpTable,
    augment_average,
    cluster_partition,
    mlp_distances,
    mlp_table,
    movement_correlations,
    sensitivity,
    strong_links,
)
from .metrics import (
    CorrelationMatrix,
    DistanceMatrix,
    MatrixMoments,
    correlation_matrix,
    distance_matrix,
    matrix_moments,
    minkowski_distance,
    pearson,
    statistical_distance,
)
from .panel import GrowthPanel, PanelWindow, load_panel, to_growth_rates, windows
from .robustness import (
    double_shuffle,
    mlp_shuffle_report,
    randomization_summary,
    shuffle_distance_stack,
    shuffle_mlp_table,
)
from .trendstats import (
    ExpFit,
    TrendSeries,
    bootstrap_ci,
    fit_exp_decay,
    moments_series,
    moving_average,
    sigma_convergence,
    trend_series,
)

__all__ = [
    "CorrelationMatrix",
    "DegenerateDataError",
    "DistanceMatrix",
    "ExpFit",
    "FactorGraph",
    "GrowthPanel",
    "HierarchyTree",
    "InputError",
    "InsufficientDataError",
    "MacroClusterError",
    "MatrixMoments",
    "MlpTable",
    "PanelWindow",
    "ParseError",
    "TrendSeries",
    "VariableCluster",
    "augment_average",
    "bootstrap_ci",
    "build_chain",
    "build_factor_graph",
    "build_lmst",
    "build_mst",
    "cluster_partition",
    "correlation_matrix",
    "distance_matrix",
    "double_shuffle",
    "entropy",
    "enumerate_clusters",
    "export_dot",
    "fit_exp_decay",
    "load_panel",
    "matrix_moments",
    "minkowski_distance",
    "mlp_distances",
    "mlp_shuffle_report",
    "mlp_table",
    "moments_series",
    "movement_correlations",
    "moving_average",
    "pearson",
    "randomization_summary",
    "sensitivity",
    "shuffle_distance_stack",
    "shuffle_mlp_table",
    "sigma_convergence",
    "statistical_distance",
    "strong_links",
    "subdominant_ultrametric",
    "threshold_clusters",
    "to_growth_rates",
    "trend_series",
    "windows",
]

__version__ = "0.1.0"
