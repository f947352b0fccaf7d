"""Shannon-entropy FTRL with an entropy-adaptive learning rate.

For strongly observable graphs.  The FTRL point is the exponential-weights
distribution ``q_t ~ exp(-L / beta_t)``; it is mixed with the uniform
distribution over all arms at rate ``gamma_t = 1 / (2 beta_t)``.  The learning
rate starts at ``beta_1 = c1`` and grows by

    beta_{t+1} = beta_t + c1 / sqrt(1 + (sum_{s<=t} H(q_s)) / ln K).
"""

from __future__ import annotations

import math

import numpy as np

from .._compensated import CompensatedSum
from ..errors import BadParameterError, InvariantViolationError, NotStronglyObservableError
from ..graph import FeedbackGraph, Observability, classify_observability
from ..solver import shannon_entropy, solve_shannon
from .base import Decision, Policy


def recommended_c1(alpha: int, num_arms: int, horizon: int, multiplier: float = 1.0) -> float:
    """``max(1, m * sqrt(alpha ln T ln(KT) / ln K))``."""
    if alpha < 1 or num_arms < 2 or horizon < 2 or not multiplier > 0:
        raise BadParameterError(
            f"need alpha >= 1, K >= 2, T >= 2 and a positive multiplier; got {alpha}, {num_arms}, {horizon}, {multiplier}"
        )
    root = math.sqrt(alpha * math.log(horizon) * math.log(num_arms * horizon) / math.log(num_arms))
    return max(1.0, multiplier * root)


class StrongPolicy(Policy):
    """Best-of-both-worlds policy for strongly observable graphs.

    Parameters
    ----------
    graph : FeedbackGraph
        Must be strongly observable.
    c1 : float
        Initial learning rate and increment scale, ``c1 >= 1``.
    """

    name = "strong"

    def __init__(self, graph: FeedbackGraph, c1: float):
        if classify_observability(graph).tag is not Observability.STRONGLY_OBSERVABLE:
            raise NotStronglyObservableError("the strong policy needs a strongly observable graph")
        if not c1 >= 1.0:
            raise BadParameterError(f"c1 must be at least 1, got {c1}")
        super().__init__(graph)
        self.c1 = float(c1)
        self.beta = self.c1
        self.entropy_sum = 0.0
        self._log_k = math.log(self.num_arms)
        self._losses = CompensatedSum(self.num_arms)
        self._last = {}

    @property
    def gamma(self) -> float:
        return 0.5 / self.beta

    @property
    def cumulative_loss(self) -> np.ndarray:
        return self._losses.value

    def _act(self) -> Decision:
        q = solve_shannon(self._losses.value, self.beta)
        gamma = 0.5 / self.beta
        p = (1.0 - gamma) * q + gamma / self.num_arms
        self._last = {"beta": self.beta, "gamma": gamma, "a": shannon_entropy(q)}
        return Decision(q, gamma, p)

    def _update(self, decision: Decision, loss_estimate: np.ndarray) -> None:
        self.entropy_sum += self._last["a"]
        beta_next = self.beta + self.c1 / math.sqrt(1.0 + self.entropy_sum / self._log_k)
        self._last["beta_next"] = beta_next
        self.beta = beta_next
        self._losses.add(loss_estimate)

    def diagnostics(self) -> dict:
        return self._last

    def check_invariants(self, decision, estimate) -> None:
        last = self._last
        if not 0.0 < decision.gamma <= 0.5:
            raise InvariantViolationError(f"gamma_t={decision.gamma} outside (0, 1/2]")
        increment = last["beta_next"] - last["beta"]
        if not 0.0 < increment <= self.c1:
            raise InvariantViolationError(f"beta increment {increment} outside (0, c1]")
        floor = decision.gamma / self.num_arms
        if decision.p.min() < floor * (1.0 - 1e-12):
            raise InvariantViolationError(f"min p_t = {decision.p.min()} below gamma/K = {floor}")
        if last["a"] > self._log_k * (1.0 + 1e-12):
            raise InvariantViolationError(f"H(q_t) = {last['a']} exceeds ln K")
