"""Coalescent forests on random graphs.

Simulators for the merge process on a fixed graph and on G(n,p), the lazy
edge-reveal coupling and its verified-non-edge walk, recursive-forest
structure samplers, an exact small-n tree-count oracle, and the statistical
suites that check them against each other.
"""

from .edge_reveal import (
    ErpState,
    WalkTrace,
    conditioned_state,
    erp_step,
    fast_walk,
    fast_walk_tree_counts,
    run_erp,
    walk_excess_decay_curve,
    walk_trace_to_json,
)
from .forest import (
    InvalidMergeError,
    PlainRootedForest,
    RootedLabeledForest,
    enumerate_increasing_forests,
    enumerate_labeled_forests,
    forest_from_json,
    forest_to_json,
    height,
    increasing_forest_count,
    is_increasing_forest,
    labeled_forest_count,
    merge,
    tree_sizes,
    validate_labeled_forest,
)
from .graph import (
    Graph,
    add_edge,
    degree,
    graph_from_json,
    graph_to_json,
    num_pairs,
    pair_from_index,
    pair_index,
    sample_gnp,
)
from .kingman import CoalescentRun, count_trees, run_kingman
from .oracle import (
    ExactDistribution,
    distribution_to_json,
    edge_addition_report,
    exact_c_distribution,
    exact_cnp_distribution,
    exact_mean_c,
)
from .rngdist import (
    BoundParams,
    BoundValues,
    CapacityError,
    RngStream,
    eval_bounds,
    sample_bernoulli,
    sample_dirichlet_uniform,
    sample_geometric,
    sample_hypergeometric,
    sample_negative_binomial,
    sample_truncated_geometric,
)
from .stats import (
    TestReport,
    chi_square_test,
    chi_square_two_sample,
    dominance_check,
    ks_test,
    ks_two_sample,
    mean_ci,
    report_to_json,
)
from .suites import SUITE_NAMES, SuiteResult, run_suite
from .urrf import (
    UrnState,
    UrrfSample,
    delete_root_block_edges,
    phi,
    phi_fiber_sample,
    polya_urn,
    sample_kingman_forest_structure,
    sample_urrf,
    sample_urrt,
)

__version__ = "0.1.0"

__all__ = [
    "BoundParams",
    "BoundValues",
    "CapacityError",
    "CoalescentRun",
    "ErpState",
    "ExactDistribution",
    "Graph",
    "InvalidMergeError",
    "PlainRootedForest",
    "RngStream",
    "RootedLabeledForest",
    "SUITE_NAMES",
    "SuiteResult",
    "TestReport",
    "UrnState",
    "UrrfSample",
    "WalkTrace",
    "add_edge",
    "chi_square_test",
    "chi_square_two_sample",
    "conditioned_state",
    "count_trees",
    "degree",
    "delete_root_block_edges",
    "distribution_to_json",
    "dominance_check",
    "edge_addition_report",
    "enumerate_increasing_forests",
    "enumerate_labeled_forests",
    "erp_step",
    "eval_bounds",
    "exact_c_distribution",
    "exact_cnp_distribution",
    "exact_mean_c",
    "fast_walk",
    "fast_walk_tree_counts",
    "forest_from_json",
    "forest_to_json",
    "graph_from_json",
    "graph_to_json",
    "height",
    "increasing_forest_count",
    "is_increasing_forest",
    "ks_test",
    "ks_two_sample",
    "labeled_forest_count",
    "mean_ci",
    "merge",
    "num_pairs",
    "pair_from_index",
    "pair_index",
    "phi",
    "phi_fiber_sample",
    "polya_urn",
    "report_to_json",
    "run_erp",
    "run_kingman",
    "run_suite",
    "sample_bernoulli",
    "sample_dirichlet_uniform",
    "sample_geometric",
    "sample_gnp",
    "sample_hypergeometric",
    "sample_kingman_forest_structure",
    "sample_negative_binomial",
    "sample_truncated_geometric",
    "sample_urrf",
    "sample_urrt",
    "tree_sizes",
    "validate_labeled_forest",
    "walk_excess_decay_curve",
    "walk_trace_to_json",
]
