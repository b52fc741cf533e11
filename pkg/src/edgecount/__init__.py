"""Graph-based nonparametric two-sample testing on sparse-to-dense graphs.

Core pieces: similarity-graph construction (K-MST, K-NNG), the four
edge-count test statistics with asymptotic and permutation p-values,
closed-form null moments with enumeration oracles, graph-condition
diagnostics, a Stein-bound Monte Carlo estimator, and experiment runners
for size/power/validity studies.
"""

__version__ = "0.1.0"

from .construct import (
    DistanceMatrix,
    PointCloud,
    euclidean_distances,
    gen_rule,
    kmst,
    knng,
    truncate_to_size,
)
from .graph import (
    ConditionReport,
    DegreeStats,
    Graph,
    common_neighbors,
    condition_report,
    count_squares,
    count_squares_induced,
    crosspair_sum,
    degree_stats,
    edge_neighborhood_sizes,
    second_neighborhood_size,
)
from .nulldist import (
    BootNullMoments,
    PermNullMoments,
    SampleSizes,
    boot_moments,
    brute_force_boot_oracle,
    brute_force_perm_oracle,
    perm_moments,
)
from .stein import SteinBoundEstimate, mc_stein_bound, stein_coefficients, var_b_w
from .twosample import (
    EdgeCounts,
    Labels,
    TestResult,
    asymptotic_p,
    count_edges,
    permutation_p,
    permutation_pvalues,
    run_test,
    statistics,
)

__all__ = [
    "__version__",
    "BootNullMoments",
    "ConditionReport",
    "DegreeStats",
    "DistanceMatrix",
    "EdgeCounts",
    "Graph",
    "Labels",
    "PermNullMoments",
    "PointCloud",
    "SampleSizes",
    "SteinBoundEstimate",
    "TestResult",
    "asymptotic_p",
    "boot_moments",
    "brute_force_boot_oracle",
    "brute_force_perm_oracle",
    "common_neighbors",
    "condition_report",
    "count_edges",
    "count_squares",
    "count_squares_induced",
    "crosspair_sum",
    "degree_stats",
    "edge_neighborhood_sizes",
    "euclidean_distances",
    "gen_rule",
    "kmst",
    "knng",
    "mc_stein_bound",
    "perm_moments",
    "permutation_p",
    "permutation_pvalues",
    "run_test",
    "second_neighborhood_size",
    "statistics",
    "stein_coefficients",
    "truncate_to_size",
    "var_b_w",
]
