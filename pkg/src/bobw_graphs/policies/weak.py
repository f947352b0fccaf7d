"""FTRL policies for weakly observable graphs.

Both policies mix the FTRL point with the uniform distribution over a weakly
dominating set ``D``.  Vertices dominated by ``D`` form ``V1``; the rest
(``V2``) all carry self-loops.

:class:`WeakPolicy` regularizes ``V1`` with the binary Shannon term scaled by
``beta_t`` and ``V2`` with the root term scaled by ``sqrt(t)``.  Its rates are

    gamma'_t    = c1 b_t / (4 (c1 + (sum_{s<=t} b_s)^(1/3)))
    gamma_t     = gamma'_t + 2|D| / beta_t                      (capped at 1/2)
    beta_{t+1}  = beta_t + c2 b_t / (gamma'_t sqrt(c1 + sum_{s<t} b_s a_{s+1} / gamma'_s))

with ``a_t = -sum_{V1} h(q_t(i))`` and ``b_t = sum_{V1} q_t(i)(1 - q_t(i))``.

Round order: solve ``q_t`` with ``beta_t``; record ``a_t`` (which completes the
``s = t-1`` term of the running sum); compute ``b_t``, ``gamma'_t``,
``gamma_t`` and act; on update, compute ``beta_{t+1}``.

:class:`WeakAltPolicy` puts a second binary-Shannon block on ``V2`` whose
learning rate follows the strongly observable recurrence, and mixes over
both ``D`` and ``V2``.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .._compensated import CompensatedSum
from ..errors import (
    BadParameterError,
    EmptyV2Error,
    InvalidDominatingSetError,
    InvariantViolationError,
    NotWeaklyObservableError,
)
from ..graph import FeedbackGraph, GraphAnalysis, Observability, analyze_graph
from ..solver import ROOT_PAIR, SHANNON_PAIR, RegularizerSpec, solve_separable
from .base import Decision, Policy

GAMMA_CAP = 0.5
# below this b_t the ratio b_t / gamma'_t is taken from its limit
DEGENERATE_B = 1e-12


def recommended_weak_params(delta: int, num_arms: int, horizon: int, multiplier: float = 1.0) -> tuple:
    """``c1 = max(2 ln K, m (d ln T ln(KT))^(1/3))`` and ``c2 = max(1, m sqrt(d ln T))``."""
    if delta < 1 or num_arms < 2 or horizon < 2 or not multiplier > 0:
        raise BadParameterError(
            f"need |D| >= 1, K >= 2, T >= 2 and a positive multiplier; got {delta}, {num_arms}, {horizon}, {multiplier}"
        )
    log_t = math.log(horizon)
    c1 = max(2.0 * math.log(num_arms), multiplier * (delta * log_t * math.log(num_arms * horizon)) ** (1.0 / 3.0))
    c2 = max(1.0, multiplier * math.sqrt(delta * log_t))
    return c1, c2


def _pair_entropy(x: np.ndarray) -> float:
    # -sum h(x) for interior x
    return float(-np.sum(x * np.log(x) + (1.0 - x) * np.log1p(-x)))


def _weak_analysis(graph: FeedbackGraph, analysis: Optional[GraphAnalysis]) -> GraphAnalysis:
    if analysis is None:
        analysis = analyze_graph(graph)
    if analysis.observability.tag is not Observability.WEAKLY_OBSERVABLE:
        raise NotWeaklyObservableError("the weak policies need a weakly observable graph")
    if not analysis.dominating_set:
        raise InvalidDominatingSetError("the weakly dominating set must be nonempty")
    return analysis


class _DominatedBlock:
    """Rate recurrences for the ``V1`` block (shared by both weak policies)."""

    def __init__(self, c1: float, c2: float, d_size: int):
        self.c1 = c1
        self.c2 = c2
        self.d_size = d_size
        self.beta = max(c2, 8.0 * d_size)
        self.b_sum = 0.0
        self.za_sum = 0.0  # sum_{s=1}^{t-1} b_s a_{s+1} / gamma'_s
        self._ratio_prev = None  # b_{t-1} / gamma'_{t-1}

    def start_round(self, a: float, b: float) -> tuple:
        """Fold in ``a_t``/``b_t``; return ``(gamma'_t, raw gamma_t, b_t / gamma'_t)``."""
        if self._ratio_prev is not None:
            self.za_sum += self._ratio_prev * a
        self.b_sum += b
        denom = self.c1 + self.b_sum ** (1.0 / 3.0)
        gamma_prime = 0.25 * self.c1 * b / denom
        if b < DEGENERATE_B:
            ratio = 4.0 * denom / self.c1
        else:
            ratio = b / gamma_prime
        self._ratio_prev = ratio
        return gamma_prime, gamma_prime + 2.0 * self.d_size / self.beta, ratio

    def finish_round(self) -> float:
        self.beta = self.beta + self.c2 * self._ratio_prev / math.sqrt(self.c1 + self.za_sum)
        return self.beta


class WeakPolicy(Policy):
    """Hybrid Shannon / root-regularized FTRL for weakly observable graphs.

    Parameters
    ----------
    graph : FeedbackGraph
        Must be weakly observable.
    c1, c2 : float
        Rate parameters; ``c1 >= 2 ln K`` and ``c2 > 0``.
    analysis : GraphAnalysis, optional
        Supplies ``D``, ``V1`` and ``V2``; computed with defaults if omitted.
    """

    name = "weak"

    def __init__(self, graph: FeedbackGraph, c1: float, c2: float, analysis: Optional[GraphAnalysis] = None):
        analysis = _weak_analysis(graph, analysis)
        k = graph.num_arms
        if not c1 >= 2.0 * math.log(k):
            raise BadParameterError(f"c1 must be at least 2 ln K = {2.0 * math.log(k):.6g}, got {c1}")
        if not c2 > 0:
            raise BadParameterError(f"c2 must be positive, got {c2}")
        super().__init__(graph)
        self.analysis = analysis
        self.c1 = float(c1)
        self.c2 = float(c2)
        self.v1 = np.zeros(k, dtype=bool)
        self.v1[[i - 1 for i in analysis.v1]] = True
        self.v2 = ~self.v1
        self.mix = np.zeros(k)
        self.mix[[i - 1 for i in analysis.dominating_set]] = 1.0 / len(analysis.dominating_set)
        self._kinds = np.where(self.v1, SHANNON_PAIR, ROOT_PAIR).astype(np.int64)
        self._block = _DominatedBlock(self.c1, self.c2, len(analysis.dominating_set))
        self._losses = CompensatedSum(k)
        self._last = {}

    @property
    def beta(self) -> float:
        return self._block.beta

    @property
    def b_sum(self) -> float:
        return self._block.b_sum

    @property
    def za_sum(self) -> float:
        return self._block.za_sum

    @property
    def cumulative_loss(self) -> np.ndarray:
        return self._losses.value

    def regularizer(self) -> RegularizerSpec:
        weights = np.where(self.v1, self._block.beta, math.sqrt(self.t))
        return RegularizerSpec._unchecked(self._kinds, weights)

    def _act(self) -> Decision:
        q = solve_separable(self._losses.value, self.regularizer())
        x = q[self.v1]
        a = _pair_entropy(x)
        b = float(np.sum(x * (1.0 - x)))
        beta = self._block.beta
        gamma_prime, gamma, _ = self._block.start_round(a, b)
        clipped = gamma > GAMMA_CAP
        if clipped:
            gamma = GAMMA_CAP
            self.clip_events += 1
        p = (1.0 - gamma) * q + gamma * self.mix
        self._last = {"beta": beta, "gamma": gamma, "gamma_prime": gamma_prime, "a": a, "b": b, "clipped": clipped}
        return Decision(q, gamma, p)

    def _update(self, decision: Decision, loss_estimate: np.ndarray) -> None:
        self._last["beta_next"] = self._block.finish_round()
        self._losses.add(loss_estimate)

    def diagnostics(self) -> dict:
        return self._last

    def check_invariants(self, decision, estimate) -> None:
        _check_weak_round(self, decision, estimate, self._last, self._block.d_size)
        last = self._last
        if last["beta_next"] < last["beta"]:
            raise InvariantViolationError(f"beta decreased: {last['beta']} -> {last['beta_next']}")
        if last["gamma_prime"] > last["b"] / 4.0 * (1.0 + 1e-12):
            raise InvariantViolationError("gamma'_t exceeds b_t / 4")
        v2_floor = (1.0 - decision.gamma) * decision.q[self.v2]
        if np.any(estimate.obs_prob[self.v2] < v2_floor * (1.0 - 1e-12)):
            raise InvariantViolationError("P_t(j) < (1 - gamma_t) q_t(j) on V2")


def _check_weak_round(policy, decision, estimate, last, d_size) -> None:
    if not 0.0 < decision.gamma <= GAMMA_CAP:
        raise InvariantViolationError(f"gamma_t={decision.gamma} outside (0, 1/2]")
    if last["a"] < last["b"] - 1e-12:
        raise InvariantViolationError(f"a_t={last['a']} < b_t={last['b']}")
    v1 = policy.v1
    floor = decision.gamma / d_size
    if np.any(estimate.obs_prob[v1] < floor * (1.0 - 1e-12)):
        raise InvariantViolationError("observation probability below gamma_t/|D| on V1")
    cap = d_size / decision.gamma
    if np.any(estimate.values[v1] > cap * (1.0 + 1e-12)):
        raise InvariantViolationError("estimated loss above |D|/gamma_t on V1")


class WeakAltPolicy(Policy):
    """Two binary-Shannon blocks with separate learning and exploration rates.

    The ``V1`` block follows the same recurrences as :class:`WeakPolicy` with
    parameters ``(c1, c2)``.  The ``V2`` block starts at ``beta2 = c1_v2`` and
    grows as in the strongly observable policy, driven by
    ``a2_t = -sum_{V2} h(q_t(i))``, with ``gamma2_t = 1 / (2 beta2_t)``.  The
    played distribution is
    ``(1 - g1 - g2) q + g1 * uniform(D) + g2 * uniform(V2)``; if
    ``g1 + g2 > 1/2`` both are scaled down proportionally.
    """

    name = "weak_alt"

    def __init__(
        self,
        graph: FeedbackGraph,
        c1: float,
        c2: float,
        c1_v2: float,
        analysis: Optional[GraphAnalysis] = None,
    ):
        analysis = _weak_analysis(graph, analysis)
        if not analysis.v2:
            raise EmptyV2Error("V2 is empty: every vertex is dominated by D")
        k = graph.num_arms
        if not c1 >= 2.0 * math.log(k):
            raise BadParameterError(f"c1 must be at least 2 ln K = {2.0 * math.log(k):.6g}, got {c1}")
        if not c2 > 0:
            raise BadParameterError(f"c2 must be positive, got {c2}")
        if not c1_v2 >= 1.0:
            raise BadParameterError(f"c1_v2 must be at least 1, got {c1_v2}")
        super().__init__(graph)
        self.analysis = analysis
        self.c1, self.c2, self.c1_v2 = float(c1), float(c2), float(c1_v2)
        self.v1 = np.zeros(k, dtype=bool)
        self.v1[[i - 1 for i in analysis.v1]] = True
        self.v2 = ~self.v1
        self.mix_d = np.zeros(k)
        self.mix_d[[i - 1 for i in analysis.dominating_set]] = 1.0 / len(analysis.dominating_set)
        self.mix_v2 = self.v2 / self.v2.sum()
        self._kinds = np.full(k, SHANNON_PAIR, dtype=np.int64)
        self._block = _DominatedBlock(self.c1, self.c2, len(analysis.dominating_set))
        self.beta2 = self.c1_v2
        self.a2_sum = 0.0
        self._log_k = math.log(k)
        self._losses = CompensatedSum(k)
        self._last = {}

    @property
    def beta(self) -> float:
        return self._block.beta

    @property
    def cumulative_loss(self) -> np.ndarray:
        return self._losses.value

    def regularizer(self) -> RegularizerSpec:
        return RegularizerSpec._unchecked(self._kinds, np.where(self.v1, self._block.beta, self.beta2))

    def _act(self) -> Decision:
        q = solve_separable(self._losses.value, self.regularizer())
        x1, x2 = q[self.v1], q[self.v2]
        a = _pair_entropy(x1)
        b = float(np.sum(x1 * (1.0 - x1)))
        a2 = _pair_entropy(x2)
        beta, beta2 = self._block.beta, self.beta2
        gamma_prime, gamma1, _ = self._block.start_round(a, b)
        gamma2 = 0.5 / beta2
        clipped = gamma1 + gamma2 > GAMMA_CAP
        if clipped:
            scale = GAMMA_CAP / (gamma1 + gamma2)
            gamma1 *= scale
            gamma2 *= scale
            self.clip_events += 1
        gamma = gamma1 + gamma2
        p = (1.0 - gamma) * q + gamma1 * self.mix_d + gamma2 * self.mix_v2
        self._last = {
            "beta": beta,
            "beta2": beta2,
            "gamma": gamma,
            "gamma1": gamma1,
            "gamma2": gamma2,
            "gamma_prime": gamma_prime,
            "a": a,
            "b": b,
            "a2": a2,
            "clipped": clipped,
        }
        return Decision(q, gamma, p)

    def _update(self, decision: Decision, loss_estimate: np.ndarray) -> None:
        self._last["beta_next"] = self._block.finish_round()
        self.a2_sum += self._last["a2"]
        self.beta2 = self.beta2 + self.c1_v2 / math.sqrt(1.0 + self.a2_sum / self._log_k)
        self._last["beta2_next"] = self.beta2
        self._losses.add(loss_estimate)

    def diagnostics(self) -> dict:
        return self._last

    def check_invariants(self, decision, estimate) -> None:
        last = self._last
        # the V1 floor only uses the D-mixing share
        if not (last["gamma1"] > 0 and last["gamma2"] > 0):
            raise InvariantViolationError("both exploration rates must be positive")
        shim = Decision(decision.q, last["gamma1"], decision.p)
        _check_weak_round(self, shim, estimate, last, self._block.d_size)
        if decision.gamma > GAMMA_CAP * (1.0 + 1e-12):
            raise InvariantViolationError(f"gamma1 + gamma2 = {decision.gamma} exceeds 1/2")
        if last["beta_next"] < last["beta"] or last["beta2_next"] <= last["beta2"]:
            raise InvariantViolationError("a learning rate decreased")
        floor2 = last["gamma2"] / self.v2.sum()
        if np.any(estimate.obs_prob[self.v2] < floor2 * (1.0 - 1e-12)):
            raise InvariantViolationError("observation probability below gamma2/|V2| on V2")
