"""Observation probabilities and the importance-weighted loss estimator."""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .errors import BadParameterError, ZeroObservationProbabilityError
from .graph import FeedbackGraph


@dataclass(frozen=True)
class RoundObservation:
    """What the player sees after playing ``chosen_arm``.

    ``observed`` maps each ``j`` in ``N_out(chosen_arm)`` (1-indexed) to
    ``loss_t(j)``.  Build it with :func:`reveal` so that no other entry of the
    loss vector can leak into a policy.
    """

    chosen_arm: int
    observed: Mapping[int, float]


def reveal(g: FeedbackGraph, chosen_arm: int, losses) -> RoundObservation:
    """Slice the full loss vector down to ``N_out(chosen_arm)``."""
    observed = {}
    for j in sorted(g.out_neighbors(chosen_arm)):
        value = float(losses[j - 1])
        if not 0.0 <= value <= 1.0:
            raise BadParameterError(f"loss {value} of arm {j} is outside [0, 1]")
        observed[j] = value
    return RoundObservation(chosen_arm, MappingProxyType(observed))


@dataclass(frozen=True)
class EstimatedLoss:
    values: np.ndarray
    obs_prob: np.ndarray


def observation_probabilities(g: FeedbackGraph, p) -> np.ndarray:
    """``P(i) = sum_{j in N_in(i)} p(j)``."""
    return np.asarray(p, dtype=np.float64) @ g.adjacency


def estimate_losses(g: FeedbackGraph, p, obs: RoundObservation) -> EstimatedLoss:
    """Unbiased estimate ``loss(i) / P(i)`` on observed arms, zero elsewhere.

    ``P`` is computed from the played distribution ``p`` (after mixing).
    """
    probs = observation_probabilities(g, p)
    values = np.zeros(g.num_arms)
    for j, loss in obs.observed.items():
        pj = probs[j - 1]
        if pj <= 0.0:
            raise ZeroObservationProbabilityError(
                f"arm {j} was observed but its observation probability is {pj}"
            )
        values[j - 1] = loss / pj
    return EstimatedLoss(values, probs)
