"""Shared round protocol for the FTRL policies."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ..errors import SequencingViolationError
from ..feedback import EstimatedLoss, RoundObservation, estimate_losses
from ..graph import FeedbackGraph


class Decision(NamedTuple):
    """Output of one ``act`` call: FTRL point, mixing rate and played distribution."""

    q: np.ndarray
    gamma: float
    p: np.ndarray


class Policy:
    """Base class: ``act`` once, then ``observe`` (or ``update``) once, per round.

    Subclasses implement ``_act`` and ``_update``; the base class enforces the
    call order and turns a :class:`RoundObservation` into loss estimates, so a
    policy only ever sees the revealed slice of the loss vector.
    """

    name = "policy"

    def __init__(self, graph: FeedbackGraph):
        self.graph = graph
        self.num_arms = graph.num_arms
        self.t = 1
        self.clip_events = 0
        self._pending = None

    def act(self) -> Decision:
        if self._pending is not None:
            raise SequencingViolationError(f"act called twice in round {self.t} without an update")
        decision = self._act()
        self._pending = decision
        return decision

    def observe(self, obs: RoundObservation) -> EstimatedLoss:
        if self._pending is None:
            raise SequencingViolationError(f"observe called in round {self.t} before act")
        estimate = estimate_losses(self.graph, self._pending.p, obs)
        self.update(estimate.values)
        return estimate

    def update(self, loss_estimate) -> None:
        if self._pending is None:
            raise SequencingViolationError(f"update called in round {self.t} before act")
        decision, self._pending = self._pending, None
        self._update(decision, np.asarray(loss_estimate, dtype=np.float64))
        self.t += 1

    def diagnostics(self) -> dict:
        """Per-round quantities of the most recent ``act`` (for traces)."""
        return {}

    def check_invariants(self, decision: Decision, estimate: EstimatedLoss) -> None:
        """Raise :class:`~bobw_graphs.errors.InvariantViolationError` on a broken invariant."""

    def _act(self) -> Decision:  # pragma: no cover - abstract
        raise NotImplementedError

    def _update(self, decision: Decision, loss_estimate: np.ndarray) -> None:  # pragma: no cover
        raise NotImplementedError
