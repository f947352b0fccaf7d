"""Loss-sequence generators: stochastic, corrupted stochastic and oblivious adversarial.

Every environment is an immutable spec.  ``env.stream(seed)`` returns a
:class:`LossStream` whose ``draw(t)`` gives the full loss vector of round
``t`` (1-indexed).  Random draws come in fixed-size blocks, each from its own
generator keyed by ``(seed, stream tag, block index)``, so a round's losses
depend only on the seed and ``t`` and never on how the stream was consumed.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import BadParameterError, BudgetExceededError, ScriptExhaustedError

BLOCK = 1024
ENV_TAG = 0x1055  # arbitrary stream tag for loss draws


def block_rng(seed: int, tag: int, block: int) -> np.random.Generator:
    """Generator for one block of a counter-keyed substream."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(tag), int(block)]))


@dataclass(frozen=True)
class GroundTruth:
    i_star: int
    gaps: np.ndarray
    gap_min: float
    corruption_budget: float


class Environment:
    num_arms: int
    kind = "environment"
    #: number of rounds available, ``None`` for unbounded streams
    length: Optional[int] = None

    def stream(self, seed: int) -> "LossStream":
        return LossStream(self, seed)

    def ground_truth(self) -> Optional[GroundTruth]:
        """Gaps and corruption budget, or ``None`` when no self-bounding certificate exists."""
        return None

    def _block(self, seed: int, block: int, stream: "LossStream") -> np.ndarray:  # pragma: no cover
        raise NotImplementedError

    def to_json(self) -> dict:  # pragma: no cover
        raise NotImplementedError


class LossStream:
    """Per-run view of an environment; blocks are produced in order and cached."""

    def __init__(self, env: Environment, seed: int):
        self.env = env
        self.seed = int(seed)
        self.realized_corruption = 0.0
        self._blocks = []

    def draw(self, t: int) -> np.ndarray:
        if t < 1:
            raise BadParameterError(f"rounds are 1-indexed, got t={t}")
        if self.env.length is not None and t > self.env.length:
            raise ScriptExhaustedError(f"the loss script has {self.env.length} rounds; round {t} requested")
        b, r = divmod(t - 1, BLOCK)
        while len(self._blocks) <= b:
            block = self.env._block(self.seed, len(self._blocks), self)
            block.setflags(write=False)
            self._blocks.append(block)
        return self._blocks[b][r]

    def matrix(self, horizon: int) -> np.ndarray:
        """Losses of rounds ``1..horizon`` stacked as a ``(T, K)`` array."""
        if horizon <= 0:
            return np.zeros((0, self.env.num_arms))
        self.draw(horizon)
        return np.concatenate(self._blocks)[:horizon]


def draw_losses(stream: LossStream, t: int) -> np.ndarray:
    return stream.draw(t)


# ---------------------------------------------------------------------------
# stochastic


@dataclass(frozen=True)
class StochasticEnvironment(Environment):
    """I.i.d. losses with fixed means and a unique best arm.

    ``family="bernoulli"`` draws 0/1 losses.  ``family="uniform"`` draws
    uniformly on ``[m - w, m + w]`` with ``w = min(m, 1 - m)``, which keeps the
    support inside ``[0, 1]`` without clipping, so the means are exact.
    """

    means: tuple
    family: str = "bernoulli"
    kind = "stochastic"

    def __post_init__(self):
        means = tuple(float(m) for m in self.means)
        object.__setattr__(self, "means", means)
        if len(means) < 2:
            raise BadParameterError("need at least two arms")
        if any(not 0.0 <= m <= 1.0 for m in means):
            raise BadParameterError(f"means must lie in [0, 1], got {means}")
        if self.family not in ("bernoulli", "uniform"):
            raise BadParameterError(f"unknown loss family {self.family!r}")
        best = min(means)
        if sum(m == best for m in means) > 1:
            raise BadParameterError(f"the optimal arm must be unique; means {means} tie at {best}")

    @property
    def num_arms(self) -> int:
        return len(self.means)

    def ground_truth(self) -> GroundTruth:
        means = np.array(self.means)
        i_star = int(np.argmin(means)) + 1
        gaps = means - means[i_star - 1]
        gap_min = float(np.min(np.delete(gaps, i_star - 1)))
        return GroundTruth(i_star, gaps, gap_min, 0.0)

    def _block(self, seed, block, stream):
        rng = block_rng(seed, ENV_TAG, block)
        u = rng.random((BLOCK, self.num_arms))
        means = np.array(self.means)
        if self.family == "bernoulli":
            return (u < means).astype(np.float64)
        width = np.minimum(means, 1.0 - means)
        return np.clip(means + width * (2.0 * u - 1.0), 0.0, 1.0)

    def to_json(self) -> dict:
        return {"type": "stochastic", "means": list(self.means), "family": self.family}


# ---------------------------------------------------------------------------
# corrupted stochastic


@dataclass(frozen=True)
class CorruptedEnvironment(Environment):
    """Stochastic losses perturbed by an adversary with total budget ``C``.

    The budget is charged ``max_i |l_t(i) - l'_t(i)|`` per round.

    ``strategy="flip_optimal_prefix"`` pushes the optimal arm's loss up and
    the runner-up's loss down in the earliest rounds until the budget is
    spent.  ``strategy="periodic_swap"`` swaps those two losses every
    ``period`` rounds while budget remains.
    """

    base: StochasticEnvironment
    budget: float
    strategy: str = "flip_optimal_prefix"
    period: int = 10
    kind = "corrupted"

    def __post_init__(self):
        if not self.budget >= 0:
            raise BadParameterError(f"corruption budget must be nonnegative, got {self.budget}")
        if self.strategy not in ("flip_optimal_prefix", "periodic_swap"):
            raise BadParameterError(f"unknown corruption strategy {self.strategy!r}")
        if self.period < 1:
            raise BadParameterError("period must be positive")

    @property
    def num_arms(self) -> int:
        return self.base.num_arms

    def ground_truth(self) -> GroundTruth:
        gt = self.base.ground_truth()
        return GroundTruth(gt.i_star, gt.gaps, gt.gap_min, float(self.budget))

    def _targets(self) -> tuple:
        means = np.array(self.base.means)
        order = np.argsort(means, kind="stable")
        return int(order[0]), int(order[1])

    def _block(self, seed, block, stream):
        losses = self.base._block(seed, block, stream).copy()
        remaining = self.budget - stream.realized_corruption
        if remaining <= 0.0:
            return losses
        star, runner = self._targets()
        for r in range(BLOCK):
            if remaining <= 0.0:
                break
            t = block * BLOCK + r + 1
            row = losses[r]
            if self.strategy == "flip_optimal_prefix":
                new_star = min(1.0, row[star] + remaining)
                new_runner = max(0.0, row[runner] - remaining)
            else:
                if t % self.period:
                    continue
                gap = row[runner] - row[star]
                move = math.copysign(min(abs(gap), remaining), gap)
                new_star, new_runner = row[star] + move, row[runner] - move
            change = max(abs(new_star - row[star]), abs(new_runner - row[runner]))
            if change > remaining:
                raise BudgetExceededError(f"round {t} would spend {change} with {remaining} left")
            row[star], row[runner] = new_star, new_runner
            stream.realized_corruption += change
            remaining = self.budget - stream.realized_corruption
        if stream.realized_corruption > self.budget:
            raise BudgetExceededError(f"spent {stream.realized_corruption} of budget {self.budget}")
        return losses

    def to_json(self) -> dict:
        return {
            "type": "corrupted",
            "base": self.base.to_json(),
            "budget": self.budget,
            "strategy": self.strategy,
            "period": self.period,
        }


# ---------------------------------------------------------------------------
# oblivious adversarial schedules


@dataclass(frozen=True)
class AlternatingBlocks(Environment):
    """Arm 1 is free and all others cost 1 for ``period`` rounds, then arm 2 is free, and so on."""

    k: int
    period: int = 100
    kind = "adversarial"

    def __post_init__(self):
        if self.k < 2 or self.period < 1:
            raise BadParameterError("need K >= 2 and period >= 1")

    @property
    def num_arms(self) -> int:
        return self.k

    def _block(self, seed, block, stream):
        t = np.arange(block * BLOCK, (block + 1) * BLOCK)
        free = (t // self.period) % 2
        losses = np.ones((BLOCK, self.k))
        losses[np.arange(BLOCK), free] = 0.0
        return losses

    def to_json(self) -> dict:
        return {"type": "adversarial", "schedule": "alternating_blocks", "k": self.k, "period": self.period}


@dataclass(frozen=True)
class LinearDrift(Environment):
    """Losses move linearly from ``(i-1)/(K-1)`` to ``1 - (i-1)/(K-1)`` over ``horizon`` rounds."""

    k: int
    horizon: int = 10_000
    kind = "adversarial"

    def __post_init__(self):
        if self.k < 2 or self.horizon < 2:
            raise BadParameterError("need K >= 2 and horizon >= 2")

    @property
    def num_arms(self) -> int:
        return self.k

    def _block(self, seed, block, stream):
        t = np.arange(block * BLOCK, (block + 1) * BLOCK, dtype=np.float64)
        frac = np.minimum(t / (self.horizon - 1), 1.0)[:, None]
        start = np.arange(self.k) / (self.k - 1)
        return start + frac * (1.0 - 2.0 * start)

    def to_json(self) -> dict:
        return {"type": "adversarial", "schedule": "linear_drift", "k": self.k, "horizon": self.horizon}


@dataclass(frozen=True, eq=False)
class ScriptedLosses(Environment):
    """Fixed loss table; round ``t`` uses row ``t``.  Drawing past the end raises."""

    table: np.ndarray = field(repr=False)
    source: Optional[str] = None
    kind = "adversarial"

    def __post_init__(self):
        table = np.array(self.table, dtype=np.float64)
        if table.ndim != 2 or table.shape[1] < 2:
            raise BadParameterError("scripted losses need a (T, K) table with K >= 2")
        if np.any(~np.isfinite(table)) or np.any(table < 0.0) or np.any(table > 1.0):
            raise BadParameterError("scripted losses must lie in [0, 1]")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    @property
    def num_arms(self) -> int:
        return self.table.shape[1]

    @property
    def length(self) -> int:
        return self.table.shape[0]

    @classmethod
    def from_csv(cls, path) -> "ScriptedLosses":
        """Read a ``t,l1,...,lK`` CSV (rows must be ``t = 1, 2, ...``)."""
        path = Path(path)
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if not header or header[0].strip() != "t" or len(header) < 3:
                raise BadParameterError(f"{path}: header must be t,l1,...,lK")
            rows = []
            for n, row in enumerate(reader, start=1):
                if not row:
                    continue
                if int(row[0]) != n:
                    raise BadParameterError(f"{path}: expected t={n}, found {row[0]}")
                rows.append([float(v) for v in row[1:]])
        return cls(np.array(rows).reshape(len(rows), len(header) - 1), source=str(path))

    def to_csv(self, path) -> None:
        k = self.num_arms
        with Path(path).open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t"] + [f"l{i}" for i in range(1, k + 1)])
            for t, row in enumerate(self.table, start=1):
                writer.writerow([t] + [repr(float(v)) for v in row])

    def _block(self, seed, block, stream):
        start = block * BLOCK
        chunk = self.table[start : start + BLOCK]
        if chunk.shape[0] < BLOCK:
            # NaN marks rounds past the end of the script
            pad = np.full((BLOCK - chunk.shape[0], self.num_arms), np.nan)
            chunk = np.vstack([chunk, pad])
        return chunk.copy()

    def to_json(self) -> dict:
        if self.source is None:
            return {"type": "adversarial", "schedule": "scripted", "table": self.table.tolist()}
        return {"type": "adversarial", "schedule": "scripted", "path": self.source}


def ground_truth(env: Environment) -> Optional[GroundTruth]:
    return env.ground_truth()


def environment_from_json(obj: dict) -> Environment:
    """Build an environment from its JSON description."""
    try:
        kind = obj["type"]
        if kind == "stochastic":
            return StochasticEnvironment(tuple(obj["means"]), obj.get("family", "bernoulli"))
        if kind == "corrupted":
            base = obj["base"]
            if isinstance(base, dict):
                base = environment_from_json({"type": "stochastic", **{k: v for k, v in base.items() if k != "type"}})
            return CorruptedEnvironment(
                base, float(obj["budget"]), obj.get("strategy", "flip_optimal_prefix"), int(obj.get("period", 10))
            )
        if kind == "adversarial":
            schedule = obj["schedule"]
            if schedule == "alternating_blocks":
                return AlternatingBlocks(int(obj["k"]), int(obj.get("period", 100)))
            if schedule == "linear_drift":
                return LinearDrift(int(obj["k"]), int(obj.get("horizon", 10_000)))
            if schedule == "scripted":
                if "path" in obj:
                    return ScriptedLosses.from_csv(obj["path"])
                return ScriptedLosses(np.array(obj["table"], dtype=np.float64))
            raise BadParameterError(f"unknown adversarial schedule {schedule!r}")
        raise BadParameterError(f"unknown environment type {kind!r}")
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, BadParameterError):
            raise
        raise BadParameterError(f"malformed environment description: {exc}") from exc
