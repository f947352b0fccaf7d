"""Comparison baselines."""

from __future__ import annotations

import math

import numpy as np

from .._compensated import CompensatedSum
from ..errors import BadParameterError, NotStronglyObservableError
from ..graph import FeedbackGraph, Observability, classify_observability
from ..policies.base import Decision, Policy
from ..solver import shannon_entropy, solve_shannon


def exp3g_rates(alpha: int, horizon: int) -> tuple:
    """Fixed ``(gamma, beta)`` with ``gamma = min(sqrt(1/(alpha T)), 1/2)`` and ``beta = 1/(2 gamma)``."""
    if alpha < 1 or horizon < 1:
        raise BadParameterError(f"need alpha >= 1 and T >= 1, got {alpha}, {horizon}")
    gamma = min(math.sqrt(1.0 / (alpha * horizon)), 0.5)
    return gamma, 0.5 / gamma


class Exp3GPolicy(Policy):
    """Exponential weights with uniform exploration at a horizon-tuned fixed rate."""

    name = "exp3g"

    def __init__(self, graph: FeedbackGraph, alpha: int, horizon: int):
        if classify_observability(graph).tag is not Observability.STRONGLY_OBSERVABLE:
            raise NotStronglyObservableError("Exp3.G with these rates needs a strongly observable graph")
        super().__init__(graph)
        self.gamma, self.beta = exp3g_rates(alpha, horizon)
        self._losses = CompensatedSum(graph.num_arms)
        self._last = {}

    def _act(self) -> Decision:
        q = solve_shannon(self._losses.value, self.beta)
        p = (1.0 - self.gamma) * q + self.gamma / self.num_arms
        self._last = {"beta": self.beta, "gamma": self.gamma, "a": shannon_entropy(q)}
        return Decision(q, self.gamma, p)

    def _update(self, decision, loss_estimate) -> None:
        self._losses.add(loss_estimate)

    def diagnostics(self) -> dict:
        return self._last


def baseline_exp3g(graph: FeedbackGraph, alpha: int, horizon: int) -> Exp3GPolicy:
    return Exp3GPolicy(graph, alpha, horizon)


class UniformPolicy(Policy):
    """Plays the uniform distribution forever; a regret reference point."""

    name = "uniform"

    def __init__(self, graph: FeedbackGraph):
        super().__init__(graph)
        self._q = np.full(graph.num_arms, 1.0 / graph.num_arms)
        self._last = {"beta": math.nan, "gamma": 0.0, "a": math.log(graph.num_arms)}

    def _act(self) -> Decision:
        return Decision(self._q, 0.0, self._q)

    def _update(self, decision, loss_estimate) -> None:
        pass

    def diagnostics(self) -> dict:
        return self._last
