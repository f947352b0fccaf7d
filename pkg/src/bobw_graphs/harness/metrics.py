"""Regret, Q(i*) and the entropy-sum checks on recorded traces."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..environments import Environment
from ..errors import MissingTraceFieldError, NoGroundTruthError


def pseudo_regret_curve(trace, env: Environment) -> np.ndarray:
    """Partial sums of ``Delta(I_t)``."""
    truth = env.ground_truth()
    if truth is None:
        raise NoGroundTruthError(f"{type(env).__name__} has no gap vector; use realized_regret")
    return np.cumsum(truth.gaps[trace.arms - 1])


def pseudo_regret(trace, env: Environment) -> float:
    truth = env.ground_truth()
    if truth is None:
        raise NoGroundTruthError(f"{type(env).__name__} has no gap vector; use realized_regret")
    return math.fsum(truth.gaps[trace.arms - 1])


def realized_regret_curve(trace, env: Environment) -> np.ndarray:
    """``sum_s loss_s(I_s) - min_i sum_s loss_s(i)`` on the replayed loss sequence, per prefix."""
    matrix = env.stream(trace.seed).matrix(trace.horizon)
    return np.cumsum(trace.losses) - np.cumsum(matrix, axis=0).min(axis=1)


def realized_regret(trace, env: Environment) -> float:
    matrix = env.stream(trace.seed).matrix(trace.horizon)
    return math.fsum(trace.losses) - float(np.min([math.fsum(col) for col in matrix.T]))


def best_fixed_arm(trace, env: Environment) -> int:
    """1-indexed arm with the smallest realized cumulative loss (lowest index on ties)."""
    matrix = env.stream(trace.seed).matrix(trace.horizon)
    return int(np.argmin(matrix.sum(axis=0))) + 1


def replayed_cumulative_loss(trace, env: Environment) -> float:
    """``sum_t loss_t(I_t)`` recomputed from a fresh replay of the environment."""
    matrix = env.stream(trace.seed).matrix(trace.horizon)
    return math.fsum(matrix[np.arange(trace.horizon), trace.arms - 1])


def regret_curve(trace, env: Environment) -> np.ndarray:
    """Pseudo-regret when the environment has gaps, realized regret otherwise."""
    if env.ground_truth() is not None:
        return pseudo_regret_curve(trace, env)
    return realized_regret_curve(trace, env)


@dataclass(frozen=True)
class RegretCurve:
    mean: np.ndarray
    stderr: np.ndarray
    n: int


def empirical_regret(traces, env: Environment) -> RegretCurve:
    """Per-round regret averaged over seeds with its standard error."""
    curves = np.vstack([regret_curve(tr, env) for tr in traces])
    n = curves.shape[0]
    stderr = curves.std(axis=0, ddof=1) / math.sqrt(n) if n > 1 else np.zeros(curves.shape[1])
    return RegretCurve(curves.mean(axis=0), stderr, n)


def q_quantity(trace, i_star: int) -> tuple:
    """``Q(i*) = sum_t (1 - q_t(i*))`` and its per-round terms."""
    q = getattr(trace, "q", None)
    if q is None:
        raise MissingTraceFieldError("the trace did not record q_t")
    if not 1 <= i_star <= q.shape[1]:
        raise MissingTraceFieldError(f"arm {i_star} is not in the trace")
    terms = 1.0 - q[:, i_star - 1]
    return math.fsum(terms), terms


def entropy_round_bound(q_star, num_arms: int) -> np.ndarray:
    """Per-round cap ``(1 - q*) (ln((K - 1) / (1 - q*)) + 1)`` on ``H(q_t)``, zero at ``q* = 1``."""
    rest = 1.0 - np.asarray(q_star, dtype=np.float64)
    out = np.zeros_like(rest)
    pos = rest > 0
    out[pos] = rest[pos] * (np.log((num_arms - 1) / rest[pos]) + 1.0)
    return out


def sum_bound(q_total: float, num_arms: int, horizon: int) -> float:
    """``Q ln(e K T / Q)``, zero at ``Q = 0``."""
    if q_total <= 0.0:
        return 0.0
    return q_total * math.log(math.e * num_arms * horizon / q_total)


@dataclass(frozen=True)
class EntropyCheck:
    """Outcome of the entropy-sum checks on one trace."""

    q_total: float
    entropy_sum: float
    entropy_sum_bound: float
    round_violations: int
    a_sum: float = math.nan
    a_sum_bound: float = math.nan
    b_sum: float = math.nan
    b_sum_bound: float = math.nan

    @property
    def ok(self) -> bool:
        checks = [self.round_violations == 0, self.entropy_sum <= self.entropy_sum_bound * (1 + 1e-12) + 1e-12]
        if not math.isnan(self.a_sum):
            checks.append(self.a_sum <= self.a_sum_bound * (1 + 1e-12) + 1e-12)
        if not math.isnan(self.b_sum):
            checks.append(self.b_sum <= self.b_sum_bound * (1 + 1e-12) + 1e-12)
        return all(checks)


def entropy_checks(trace, i_star: int, round_tol: float = 1e-12) -> EntropyCheck:
    """Check the entropy caps in terms of ``q_t(i*)`` on a recorded trace.

    Per round ``H(q_t)`` must not exceed :func:`entropy_round_bound`; over the
    run ``sum H(q_t) <= Q ln(eKT/Q)``.  For the weak policies the pair
    entropies ``A_T = sum a_t`` and ``B_T = sum b_t`` are held to
    ``2 Q ln(eKT/Q)`` and ``2 Q``.
    """
    q_total, terms = q_quantity(trace, i_star)
    k, horizon = trace.num_arms, trace.horizon
    cap = entropy_round_bound(1.0 - terms, k)
    violations = int(np.sum(trace.entropy > cap + round_tol))
    bound = sum_bound(q_total, k, horizon)
    kw = {}
    if not np.all(np.isnan(trace.b)):
        kw = dict(
            a_sum=math.fsum(trace.a),
            a_sum_bound=2.0 * bound,
            b_sum=math.fsum(trace.b),
            b_sum_bound=2.0 * q_total,
        )
    return EntropyCheck(q_total, math.fsum(trace.entropy), bound, violations, **kw)


def loglog_slope(horizons, values) -> float:
    """Least-squares slope of ``log(values)`` against ``log(horizons)``."""
    x = np.log(np.asarray(horizons, dtype=np.float64))
    y = np.log(np.asarray(values, dtype=np.float64))
    if x.size < 2 or not np.all(np.isfinite(y)):
        return math.nan
    return float(np.polyfit(x, y, 1)[0])
