"""Opinion equilibria and budgeted opinion maximization on signed trust networks.

The package models a trust network as a signed weighted digraph, computes
the Nash-equilibrium expressed opinions of a per-node-confidence consensus
game, and allocates an L1 budget over internal opinions to move the
overall opinion — exactly (greedy over contribution indices), via ADMM on
the penalized relaxation, or with baseline heuristics. A compiled kernel
core accelerates the hot loops when built; see `opinionet.kernels`.
"""

from .admm import (AdmmState, admm_solve, calibrate_lambda, coordinate_oracle,
                   objective_value, soft_threshold)
from .allocate import (AllocationPlan, baseline_allocate, benefit,
                       greedy_allocate, rank_nodes)
from .confidence import (ConfidenceVector, confidence_adjusted, confidence_fixed,
                         confidence_from_spec, mean_evaluation, pagerank)
from .dynamics import (EquilibriumResult, OpinionSystem, contribution_index,
                       equilibrium_direct, equilibrium_iterative,
                       friedkin_johnsen_fixed_point, node_cost,
                       omstn_fixed_point, overall_opinion)
from .errors import (ConfigError, ConvergenceError, GraphBuildError,
                     OpinionetError, ParseError)
from .experiment import (ExperimentConfig, ExperimentReport, ExperimentRow,
                         SyntheticSpec, compare_models, config_fingerprint,
                         load_config, run_experiment, sweep_budget)
from .graph import (GraphDiagnostics, LaplacianView, SignedDigraph, build_graph,
                    in_trust_sum, laplacian, out_strength, validate)
from .ingest import (EdgeListFormat, EdgeRecord, InitScheme, ParseResult,
                     dedupe_edges, gen_synthetic, init_opinions,
                     load_graph_file, normalize_weights, parse_edge_list,
                     write_edge_list)
from .kernels import available_backends, backend_name

__version__ = "0.1.0"

__all__ = [
    "AdmmState", "AllocationPlan", "ConfidenceVector", "ConfigError",
    "ConvergenceError", "EdgeListFormat", "EdgeRecord", "EquilibriumResult",
    "ExperimentConfig", "ExperimentReport", "ExperimentRow", "GraphBuildError",
    "GraphDiagnostics", "InitScheme", "LaplacianView", "OpinionSystem",
    "OpinionetError", "ParseError", "ParseResult", "SignedDigraph",
    "SyntheticSpec", "admm_solve", "available_backends", "backend_name",
    "baseline_allocate", "benefit", "build_graph", "calibrate_lambda",
    "compare_models", "config_fingerprint", "confidence_adjusted",
    "confidence_fixed", "confidence_from_spec", "contribution_index",
    "coordinate_oracle", "dedupe_edges", "equilibrium_direct",
    "equilibrium_iterative", "friedkin_johnsen_fixed_point", "gen_synthetic",
    "greedy_allocate", "in_trust_sum", "init_opinions", "laplacian",
    "load_config", "load_graph_file", "mean_evaluation", "node_cost",
    "normalize_weights", "objective_value", "omstn_fixed_point",
    "out_strength", "overall_opinion", "pagerank", "parse_edge_list",
    "rank_nodes", "run_experiment", "soft_threshold", "sweep_budget",
    "validate", "write_edge_list",
]
