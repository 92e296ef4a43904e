"""Learning-path planning: minimal study-unit selection plus staged ordering."""

from .cover import (
    CoverConfig,
    CoverMode,
    ExactTooLarge,
    GapReport,
    Infeasible,
    IterationRecord,
    NoCover,
    SolutionTrace,
    TooLarge,
    backward_resolve,
    global_optimal_plan,
    minimal_cover,
    prerequisite_gap,
    total_weight,
)
from .generate import Flavor, GenSpec, SpecInvalid, generate
from .model import (
    Finding,
    KFSet,
    LQCloud,
    LQDictionary,
    LQPlanError,
    LearnerProfile,
    LearnerQuantum,
    MinimalityMetric,
    ParseError,
    SchemaError,
    UnknownCloud,
    UnknownLQ,
    closure_over,
    effective_targets,
    kf_closure,
    kfset,
    load_dictionary,
    parse_dictionary,
    parse_profile,
    serialize_dictionary,
    serialize_profile,
    validate_dictionary,
)
from .sequence import (
    CycleDetected,
    Plan,
    PrereqDigraph,
    SimulationVerdict,
    build_digraph,
    digraph_to_dot,
    simulate_plan,
    topo_schedule,
)

__all__ = [
    "CoverConfig",
    "CoverMode",
    "CycleDetected",
    "ExactTooLarge",
    "Finding",
    "Flavor",
    "GapReport",
    "GenSpec",
    "Infeasible",
    "IterationRecord",
    "KFSet",
    "LQCloud",
    "LQDictionary",
    "LQPlanError",
    "LearnerProfile",
    "LearnerQuantum",
    "MinimalityMetric",
    "NoCover",
    "ParseError",
    "Plan",
    "PrereqDigraph",
    "SchemaError",
    "SimulationVerdict",
    "SolutionTrace",
    "SpecInvalid",
    "TooLarge",
    "UnknownCloud",
    "UnknownLQ",
    "backward_resolve",
    "build_digraph",
    "closure_over",
    "digraph_to_dot",
    "effective_targets",
    "generate",
    "global_optimal_plan",
    "kf_closure",
    "kfset",
    "load_dictionary",
    "minimal_cover",
    "parse_dictionary",
    "parse_profile",
    "prerequisite_gap",
    "serialize_dictionary",
    "serialize_profile",
    "simulate_plan",
    "topo_schedule",
    "total_weight",
    "validate_dictionary",
]

__version__ = "0.1.0"
