"""Episode runner, regret metrics, baselines and sweeps."""

from .baselines import Exp3GPolicy, UniformPolicy, baseline_exp3g, exp3g_rates
from .episode import ArmSampler, Trace, run_episode
from .metrics import (
    EntropyCheck,
    RegretCurve,
    best_fixed_arm,
    empirical_regret,
    entropy_checks,
    entropy_round_bound,
    loglog_slope,
    pseudo_regret,
    pseudo_regret_curve,
    q_quantity,
    realized_regret,
    realized_regret_curve,
    regret_curve,
    replayed_cumulative_loss,
)
from .sweep import SweepResult, summarize_trace, sweep

__all__ = [
    "ArmSampler",
    "EntropyCheck",
    "Exp3GPolicy",
    "RegretCurve",
    "SweepResult",
    "Trace",
    "UniformPolicy",
    "baseline_exp3g",
    "best_fixed_arm",
    "empirical_regret",
    "entropy_checks",
    "entropy_round_bound",
    "exp3g_rates",
    "loglog_slope",
    "pseudo_regret",
    "pseudo_regret_curve",
    "q_quantity",
    "realized_regret",
    "realized_regret_curve",
    "regret_curve",
    "replayed_cumulative_loss",
    "run_episode",
    "summarize_trace",
    "sweep",
]
