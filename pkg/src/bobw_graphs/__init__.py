"""Best-of-both-worlds FTRL policies for online learning with directed feedback graphs."""

from .environments import (
    AlternatingBlocks,
    CorruptedEnvironment,
    LinearDrift,
    ScriptedLosses,
    StochasticEnvironment,
    environment_from_json,
    ground_truth,
)
from .feedback import RoundObservation, estimate_losses, observation_probabilities, reveal
from .graph import (
    DominationDefinition,
    FeedbackGraph,
    GraphAnalysis,
    Observability,
    analyze_graph,
    classify_observability,
    independence_number,
    load_graph,
    parse_graph_spec,
    weakly_dominating_set_exact,
    weakly_dominating_set_greedy,
)
from .policies import StrongPolicy, WeakAltPolicy, WeakPolicy, recommended_c1, recommended_weak_params
from .solver import RegularizerSpec, RootPair, ShannonFull, ShannonPair, solve_separable, solve_shannon

__version__ = "0.1.0"
