"""Multiview graph learning with a consensus graph.

Jointly learns the topologies of N related graphs and a consensus graph
capturing their shared structure from smooth graph signals, with a
simulation and evaluation harness for synthetic benchmarks.
"""

from .datagen import (
    BarabasiAlbert,
    ErdosRenyi,
    GroundTruth,
    SimulationConfig,
    add_noise,
    gen_consensus,
    perturb_view,
    simulate,
    smooth_signals,
    write_dataset,
)
from .errors import (
    DimensionMismatch,
    EmptyGraph,
    InvalidConfig,
    InvalidData,
    InvalidHyperparameter,
    InvalidMatrix,
    MvglError,
)
from .evaluation import (
    Metrics,
    TuneResult,
    binarize,
    compute_metrics,
    f1,
    grid_search_alpha,
    learn_graphs,
    pairwise_correlation,
    tune_beta,
)
from .graph_core import (
    EdgeIndexMap,
    apply_S,
    apply_S_transpose,
    apply_StS_shifted,
    edge_count,
    laplacian_from_edges,
    project_feasible,
    project_hyperplane,
    read_edge_list_tsv,
    solve_M,
    upper,
    write_edge_list_tsv,
)
from .mvgl import (
    ConvergenceReport,
    Hyperparameters,
    MultiviewSolution,
    SolverOptions,
    SolverState,
    ViewDataset,
    admm_solve,
    objective,
    precompute_statistics,
)
from .prox_penalties import PenaltyModel, penalty_value, prox_cv, prox_rv
from .svgl import solve_single

__version__ = "0.1.0"

__all__ = [
    "BarabasiAlbert",
    "ConvergenceReport",
    "DimensionMismatch",
    "EdgeIndexMap",
    "EmptyGraph",
    "ErdosRenyi",
    "GroundTruth",
    "Hyperparameters",
    "InvalidConfig",
    "InvalidData",
    "InvalidHyperparameter",
    "InvalidMatrix",
    "Metrics",
    "MultiviewSolution",
    "MvglError",
    "PenaltyModel",
    "SimulationConfig",
    "SolverOptions",
    "SolverState",
    "TuneResult",
    "ViewDataset",
    "add_noise",
    "admm_solve",
    "apply_S",
    "apply_S_transpose",
    "apply_StS_shifted",
    "binarize",
    "compute_metrics",
    "edge_count",
    "f1",
    "gen_consensus",
    "grid_search_alpha",
    "laplacian_from_edges",
    "learn_graphs",
    "objective",
    "pairwise_correlation",
    "penalty_value",
    "perturb_view",
    "precompute_statistics",
    "project_feasible",
    "project_hyperplane",
    "prox_cv",
    "prox_rv",
    "read_edge_list_tsv",
    "simulate",
    "smooth_signals",
    "solve_M",
    "solve_single",
    "tune_beta",
    "upper",
    "write_dataset",
    "write_edge_list_tsv",
]
