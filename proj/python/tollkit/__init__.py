from _tollkit import (
    Arc,
    ArcHeights,
    BetaNodeInfo,
    ConfigError,
    Experiment,
    IterationRecord,
    Network,
    RunConfig,
    RunTrace,
    SolverError,
    SolverOptions,
    StructuralError,
    ValidationReport,
    arc_height,
    conservation_residual,
    cost_to_go,
    entropy_term,
    find_beta_node,
    load_experiment,
    mte_solve,
    optimal_toll,
    parse_experiment,
    perturbed_latency,
    run,
    social_optimum,
    topological_order,
    validate,
)

__all__ = [
    "Arc",
    "ArcHeights",
    "BetaNodeInfo",
    "ConfigError",
    "Experiment",
    "IterationRecord",
    "Network",
    "RunConfig",
    "RunTrace",
    "SolverError",
    "SolverOptions",
    "StructuralError",
    "ValidationReport",
    "arc_height",
    "conservation_residual",
    "cost_to_go",
    "entropy_term",
    "find_beta_node",
    "load_experiment",
    "mte_solve",
    "optimal_toll",
    "parse_experiment",
    "perturbed_latency",
    "run",
    "social_optimum",
    "topological_order",
    "validate",
]
