"""The round loop: act, sample, reveal, estimate, update."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..config import RunConfig, make_policy
from ..environments import block_rng, BLOCK
from ..errors import InvariantViolationError
from ..feedback import reveal

SAMPLER_TAG = 0x5A3D  # arbitrary stream tag for arm sampling
SIMPLEX_TOL = 1e-9


@dataclass
class Trace:
    """Per-round record of one episode.

    Arms are 1-indexed.  ``q`` (the FTRL points) is always kept; ``p`` (the
    played distributions) only at trace level ``"full"``.  Columns that do
    not apply to a policy hold NaN.
    """

    seed: int
    horizon: int
    num_arms: int
    policy: str
    params: dict
    arms: np.ndarray
    losses: np.ndarray
    gamma: np.ndarray
    beta: np.ndarray
    beta2: np.ndarray
    entropy: np.ndarray
    a: np.ndarray
    b: np.ndarray
    gamma_prime: np.ndarray
    q: np.ndarray
    p: Optional[np.ndarray] = None
    i_star: Optional[int] = None
    clip_events: int = 0
    below_cubic_horizon: bool = False
    extra: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return self.horizon

    @property
    def cumulative_loss(self) -> float:
        return math.fsum(self.losses)

    @property
    def q_istar(self) -> Optional[np.ndarray]:
        if self.i_star is None:
            return None
        return self.q[:, self.i_star - 1]

    def columns(self) -> dict:
        """The per-round CSV columns ``t,arm,loss,gamma,beta,entropy,q_istar``."""
        q_star = self.q_istar
        return {
            "t": np.arange(1, self.horizon + 1),
            "arm": self.arms,
            "loss": self.losses,
            "gamma": self.gamma,
            "beta": self.beta,
            "entropy": self.entropy,
            "q_istar": q_star if q_star is not None else np.full(self.horizon, np.nan),
        }

    def equals(self, other: "Trace") -> bool:
        """Bit-for-bit equality of every recorded array."""
        names = ("arms", "losses", "gamma", "beta", "beta2", "entropy", "a", "b", "gamma_prime", "q")
        same = all(np.array_equal(getattr(self, n), getattr(other, n), equal_nan=True) for n in names)
        if (self.p is None) != (other.p is None):
            return False
        if self.p is not None:
            same = same and np.array_equal(self.p, other.p)
        return same and self.clip_events == other.clip_events and self.i_star == other.i_star


class ArmSampler:
    """Inverse-CDF sampling from a dedicated counter-keyed uniform stream."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._block = -1
        self._u = None

    def uniform(self, t: int) -> float:
        b, r = divmod(t - 1, BLOCK)
        if b != self._block:
            self._u = block_rng(self.seed, SAMPLER_TAG, b).random(BLOCK)
            self._block = b
        return self._u[r]

    def sample(self, p: np.ndarray, t: int) -> int:
        cdf = np.cumsum(p)
        idx = int(np.searchsorted(cdf, self.uniform(t) * cdf[-1], side="right"))
        return min(idx, p.shape[0] - 1) + 1


def _check_simplex(x: np.ndarray, name: str, t: int) -> None:
    if not np.all(np.isfinite(x)) or x.min() < -SIMPLEX_TOL or abs(x.sum() - 1.0) > SIMPLEX_TOL:
        raise InvariantViolationError(f"{name}_t is not a probability vector at round {t}: {x}")


def run_episode(config: RunConfig, seed: int, policy=None, i_star: Optional[int] = None) -> Trace:
    """Play ``config.horizon`` rounds and record a :class:`Trace`.

    Parameters
    ----------
    config : RunConfig
    seed : int
        Seeds both the environment stream and the arm sampler.
    policy : Policy, optional
        A fresh policy instance; built from ``config.policy`` when omitted.
    i_star : int, optional
        Reference arm for ``q_t(i*)``; taken from the environment's ground
        truth when omitted (left ``None`` for adversarial environments).
    """
    graph, env, horizon = config.graph, config.environment, config.horizon
    if policy is None:
        policy, params = make_policy(graph, config.policy, horizon)
    else:
        params = {"name": getattr(policy, "name", type(policy).__name__)}
    if config.below_cubic_horizon:
        warnings.warn(f"T={horizon} < K^3={graph.num_arms ** 3}", stacklevel=2)
    if i_star is None:
        truth = env.ground_truth()
        i_star = truth.i_star if truth is not None else None

    k = graph.num_arms
    stream = env.stream(seed)
    sampler = ArmSampler(seed)
    arms = np.empty(horizon, dtype=np.int64)
    losses = np.empty(horizon)
    cols = {name: np.full(horizon, np.nan) for name in ("gamma", "beta", "beta2", "entropy", "a", "b", "gamma_prime")}
    qs = np.empty((horizon, k))
    ps = np.empty((horizon, k)) if config.trace == "full" else None
    debug = config.debug

    for t in range(1, horizon + 1):
        decision = policy.act()
        p = decision.p
        arm = sampler.sample(p, t)
        loss_vec = stream.draw(t)
        estimate = policy.observe(reveal(graph, arm, loss_vec))

        i = t - 1
        arms[i] = arm
        losses[i] = loss_vec[arm - 1]
        qs[i] = decision.q
        if ps is not None:
            ps[i] = p
        diag = policy.diagnostics()
        cols["gamma"][i] = decision.gamma
        cols["beta"][i] = diag.get("beta", np.nan)
        cols["beta2"][i] = diag.get("beta2", np.nan)
        cols["a"][i] = diag.get("a", np.nan)
        cols["b"][i] = diag.get("b", np.nan)
        cols["gamma_prime"][i] = diag.get("gamma_prime", np.nan)
        if debug:
            _check_simplex(decision.q, "q", t)
            _check_simplex(p, "p", t)
            if decision.gamma > 0.5 * (1.0 + 1e-12):
                raise InvariantViolationError(f"gamma_t = {decision.gamma} > 1/2 at round {t}")
            policy.check_invariants(decision, estimate)

    with np.errstate(divide="ignore", invalid="ignore"):
        cols["entropy"] = -np.sum(np.where(qs > 0, qs * np.log(qs), 0.0), axis=1)
    return Trace(
        seed=int(seed),
        horizon=horizon,
        num_arms=k,
        policy=params["name"],
        params=params,
        arms=arms,
        losses=losses,
        q=qs,
        p=ps,
        i_star=i_star,
        clip_events=policy.clip_events,
        below_cubic_horizon=config.below_cubic_horizon,
        extra={"realized_corruption": stream.realized_corruption},
        **cols,
    )
