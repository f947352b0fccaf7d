"""Seed-by-config sweeps with per-cell failure capture and aggregation."""

from __future__ import annotations

import math
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..errors import BobwError
from .episode import run_episode
from .metrics import best_fixed_arm, loglog_slope, pseudo_regret, q_quantity, realized_regret

ROW_COLUMNS = (
    "config_id",
    "seed",
    "T",
    "final_regret",
    "final_Q",
    "clip_events",
    "regret_kind",
    "cumulative_loss",
    "label",
    "graph",
    "policy",
    "group",
    "error",
)
SUMMARY_COLUMNS = (
    "config_id",
    "T",
    "n",
    "n_failed",
    "mean_regret",
    "stderr_regret",
    "mean_Q",
    "stderr_Q",
    "label",
    "graph",
    "policy",
    "group",
)


def summarize_trace(config, trace) -> dict:
    """One result row for a finished episode."""
    env = config.environment
    truth = env.ground_truth()
    i_star = truth.i_star if truth is not None else best_fixed_arm(trace, env)
    q_total, _ = q_quantity(trace, i_star)
    return {
        "seed": trace.seed,
        "T": trace.horizon,
        "final_regret": pseudo_regret(trace, env) if truth is not None else realized_regret(trace, env),
        "final_Q": q_total,
        "clip_events": trace.clip_events,
        "regret_kind": "pseudo" if truth is not None else "realized",
        "cumulative_loss": trace.cumulative_loss,
    }


def _run_cell(args) -> dict:
    config_id, config, seed = args
    row = {
        "config_id": config_id,
        "seed": seed,
        "T": config.horizon,
        "label": config.label,
        "graph": config.graph_spec,
        "policy": config.policy.get("name", "strong"),
        "group": config.extra.get("group", config_id),
        "error": "",
    }
    try:
        row.update(summarize_trace(config, run_episode(config, seed)))
    except (BobwError, ArithmeticError, ValueError) as exc:
        row.update(final_regret=math.nan, final_Q=math.nan, error=f"{type(exc).__name__}: {exc}")
    return row


@dataclass
class SweepResult:
    rows: list
    fits: dict = field(default_factory=dict)

    def summary(self) -> list:
        by_cfg = defaultdict(list)
        for row in self.rows:
            by_cfg[row["config_id"]].append(row)
        out = []
        for cid in sorted(by_cfg):
            rows = by_cfg[cid]
            ok = [r for r in rows if not r["error"]]
            reg = np.array([r["final_regret"] for r in ok])
            qs = np.array([r["final_Q"] for r in ok])
            out.append(
                {
                    "config_id": cid,
                    "T": rows[0]["T"],
                    "n": len(ok),
                    "n_failed": len(rows) - len(ok),
                    "mean_regret": reg.mean() if ok else math.nan,
                    "stderr_regret": _stderr(reg),
                    "mean_Q": qs.mean() if ok else math.nan,
                    "stderr_Q": _stderr(qs),
                    "label": rows[0]["label"],
                    "graph": rows[0]["graph"],
                    "policy": rows[0]["policy"],
                    "group": rows[0]["group"],
                }
            )
        return out

    def scaling_fits(self) -> dict:
        """Log-log slope of mean regret against T for each group with at least two horizons.

        Groups whose horizons repeat (cells merged from separate documents) are
        skipped, since their slope is not defined.
        """
        groups = defaultdict(list)
        for s in self.summary():
            groups[s["group"]].append(s)
        fits = {}
        for g, cells in sorted(groups.items()):
            cells.sort(key=lambda s: s["T"])
            horizons = [c["T"] for c in cells]
            if len(cells) >= 2 and len(set(horizons)) == len(horizons):
                fits[str(g)] = {
                    "label": cells[0]["label"],
                    "T": [c["T"] for c in cells],
                    "mean_regret": [c["mean_regret"] for c in cells],
                    "slope": loglog_slope([c["T"] for c in cells], [c["mean_regret"] for c in cells]),
                }
        return fits


def _stderr(x: np.ndarray) -> float:
    if x.size < 2:
        return 0.0 if x.size == 1 else math.nan
    return float(x.std(ddof=1) / math.sqrt(x.size))


def sweep(configs, parallelism: int = 1) -> SweepResult:
    """Run every ``(config, seed)`` cell; failures are recorded in the ``error`` column.

    Rows come back ordered by config then seed regardless of ``parallelism``.
    """
    tasks = [(cid, cfg, seed) for cid, cfg in enumerate(configs) for seed in cfg.seeds]
    if parallelism > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            rows = list(pool.map(_run_cell, tasks))
    else:
        rows = [_run_cell(t) for t in tasks]
    result = SweepResult(rows)
    result.fits = result.scaling_fits()
    return result
