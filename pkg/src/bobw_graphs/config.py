"""JSON run configurations and policy construction with ``"auto"`` parameters.

A configuration is one JSON document::

    {
      "graph": "bandit:5",
      "policy": {"name": "strong", "c1": "auto"},
      "environment": {"type": "stochastic", "means": [0.3, 0.5, 0.5, 0.5, 0.5]},
      "run": {"T": 10000, "seeds": [0, 1, 2], "trace": "summary"}
    }

``run.T`` may be a list, and an optional ``grid`` section maps dotted paths to
lists of values; a sweep expands the cross product of both.
"""

from __future__ import annotations

import copy
import itertools
import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .environments import Environment, environment_from_json
from .errors import BadParameterError, BobwError, NotWeaklyObservableError, PolicyGraphMismatchError
from .graph import (
    DominationDefinition,
    FeedbackGraph,
    Observability,
    analyze_graph,
    classify_observability,
    load_graph,
)
from .policies import StrongPolicy, WeakAltPolicy, WeakPolicy, recommended_c1, recommended_weak_params

POLICY_NAMES = ("strong", "weak", "weak_alt", "exp3g", "uniform")
TRACE_LEVELS = ("none", "summary", "full")


class ConfigError(BadParameterError):
    """The configuration document cannot be parsed or is inconsistent."""


def _number_or_auto(value, name):
    if value == "auto":
        return "auto"
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"policy.{name} must be a number or 'auto', got {value!r}") from None


def make_policy(graph: FeedbackGraph, spec: dict, horizon: int) -> tuple:
    """Build a policy from its spec and return ``(policy, resolved_spec)``.

    ``"auto"`` values of ``c1``, ``c2``, ``c1_v2``, ``dominating_set`` and
    ``alpha`` are replaced by concrete numbers in the returned spec.
    """
    from .harness.baselines import Exp3GPolicy, UniformPolicy

    spec = dict(spec)
    name = spec.get("name", "strong")
    if name not in POLICY_NAMES:
        raise ConfigError(f"unknown policy {name!r}; expected one of {POLICY_NAMES}")
    multiplier = float(spec.get("multiplier", 1.0))
    horizon_for_params = max(int(horizon), 2)
    obs = classify_observability(graph)
    if not obs.is_observable:
        raise PolicyGraphMismatchError(f"graph is unobservable: no arm observes {sorted(obs.unobserved_vertices)}")
    resolved = {"name": name}

    if name == "uniform":
        return UniformPolicy(graph), resolved

    if name in ("strong", "exp3g"):
        if obs.tag is not Observability.STRONGLY_OBSERVABLE:
            raise PolicyGraphMismatchError(f"policy {name!r} needs a strongly observable graph")
        alpha = spec.get("alpha", "auto")
        if alpha == "auto":
            analysis = analyze_graph(graph)
            alpha = analysis.alpha_exact if analysis.alpha_exact is not None else analysis.alpha_upper
        alpha = int(alpha)
        resolved["alpha"] = alpha
        if name == "exp3g":
            policy = Exp3GPolicy(graph, alpha, int(horizon))
            resolved.update(gamma=policy.gamma, beta=policy.beta)
            return policy, resolved
        c1 = _number_or_auto(spec.get("c1", "auto"), "c1")
        if c1 == "auto":
            c1 = recommended_c1(alpha, graph.num_arms, horizon_for_params, multiplier)
        resolved.update(c1=c1, multiplier=multiplier)
        return StrongPolicy(graph, c1), resolved

    if obs.tag is not Observability.WEAKLY_OBSERVABLE:
        raise NotWeaklyObservableError(f"policy {name!r} needs a weakly observable graph")
    definition = DominationDefinition(spec.get("domination", DominationDefinition.NO_SELF_LOOP.value))
    analysis = analyze_graph(graph, spec.get("dominating_set", "auto"), definition)
    delta = len(analysis.dominating_set)
    auto_c1, auto_c2 = recommended_weak_params(delta, graph.num_arms, horizon_for_params, multiplier)
    c1 = _number_or_auto(spec.get("c1", "auto"), "c1")
    c2 = _number_or_auto(spec.get("c2", "auto"), "c2")
    c1 = auto_c1 if c1 == "auto" else c1
    c2 = auto_c2 if c2 == "auto" else c2
    resolved.update(
        c1=c1,
        c2=c2,
        multiplier=multiplier,
        domination=definition.value,
        dominating_set=sorted(analysis.dominating_set),
        v2=sorted(analysis.v2),
    )
    if name == "weak":
        return WeakPolicy(graph, c1, c2, analysis=analysis), resolved
    c1_v2 = _number_or_auto(spec.get("c1_v2", "auto"), "c1_v2")
    if c1_v2 == "auto":
        alpha2 = analysis.alpha2 or 1
        k2 = max(len(analysis.v2), 2)
        c1_v2 = recommended_c1(alpha2, k2, horizon_for_params, multiplier)
    resolved["c1_v2"] = c1_v2
    return WeakAltPolicy(graph, c1, c2, c1_v2, analysis=analysis), resolved


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to run episodes of one (graph, policy, environment, T) cell."""

    graph: FeedbackGraph
    policy: dict
    environment: Environment
    horizon: int
    seeds: tuple = (0,)
    trace: str = "summary"
    debug: bool = False
    label: str = ""
    graph_spec: str = ""
    out: Optional[str] = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.horizon < 1:
            raise ConfigError(f"T must be positive, got {self.horizon}")
        if self.trace not in TRACE_LEVELS:
            raise ConfigError(f"trace must be one of {TRACE_LEVELS}, got {self.trace!r}")
        if self.environment.num_arms != self.graph.num_arms:
            raise ConfigError(
                f"environment has {self.environment.num_arms} arms but the graph has {self.graph.num_arms}"
            )

    @property
    def below_cubic_horizon(self) -> bool:
        """True when ``T < K^3``, the standing horizon assumption of the guarantees."""
        return self.horizon < self.graph.num_arms**3

    def with_seeds(self, seeds) -> "RunConfig":
        return RunConfig(**{**self.__dict__, "seeds": tuple(int(s) for s in seeds)})


# ---------------------------------------------------------------------------
# JSON documents


def load_document(source) -> dict:
    if isinstance(source, dict):
        return copy.deepcopy(source)
    try:
        return json.loads(Path(source).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {source}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {source} is not valid JSON: {exc}") from exc


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def set_path(doc: dict, path: str, value) -> None:
    keys = path.split(".")
    node = doc
    for key in keys[:-1]:
        nxt = node.get(key)
        if not isinstance(nxt, dict):
            nxt = {}
            node[key] = nxt
        node = nxt
    node[keys[-1]] = value


def apply_overrides(doc: dict, overrides) -> dict:
    """Apply ``path=value`` strings; values are parsed as JSON when possible."""
    doc = copy.deepcopy(doc)
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form path=value")
        path, text = item.split("=", 1)
        set_path(doc, path.strip(), _parse_value(text.strip()))
    return doc


def _seeds(run: dict) -> tuple:
    if "seeds" in run:
        seeds = run["seeds"]
        if isinstance(seeds, int):
            return tuple(range(seeds))
        return tuple(int(s) for s in seeds)
    return tuple(range(int(run.get("n_seeds", 1))))


def _build(doc: dict, horizon: int) -> RunConfig:
    for section in ("graph", "policy", "environment"):
        if section not in doc:
            raise ConfigError(f"config has no {section!r} section")
    run = doc.get("run", {})
    graph_src = doc["graph"]
    graph = load_graph(graph_src)
    policy = doc["policy"]
    if isinstance(policy, str):
        policy = {"name": policy}
    env = environment_from_json(doc["environment"])
    return RunConfig(
        graph=graph,
        policy=dict(policy),
        environment=env,
        horizon=int(horizon),
        seeds=_seeds(run),
        trace=run.get("trace", "summary"),
        debug=bool(run.get("debug", False)),
        label=str(doc.get("label", "")),
        graph_spec=graph_src if isinstance(graph_src, str) else "custom",
        out=run.get("out"),
    )


def expand_document(doc: dict) -> list:
    """All cells of a (possibly sweeping) document as ``RunConfig`` objects."""
    try:
        grid = doc.get("grid", {})
        paths = sorted(grid)
        cells = []
        for group, combo in enumerate(itertools.product(*(grid[p] for p in paths))):
            cell = copy.deepcopy(doc)
            cell.pop("grid", None)
            for path, value in zip(paths, combo):
                set_path(cell, path, value)
            horizons = cell.get("run", {}).get("T", 1000)
            if not isinstance(horizons, list):
                horizons = [horizons]
            for horizon in horizons:
                cfg = _build(cell, horizon)
                label = cfg.label or ",".join(f"{p}={v}" for p, v in zip(paths, combo))
                cfg = RunConfig(**{**cfg.__dict__, "label": label, "extra": {"group": group}})
                cells.append(cfg)
        return cells
    except BobwError:
        raise
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise ConfigError(f"malformed config: {exc}") from exc


def load_config(source, overrides=()) -> RunConfig:
    """A single-cell configuration (``run.T`` must be a number and no grid)."""
    doc = apply_overrides(load_document(source), overrides)
    cells = expand_document(doc)
    if len(cells) != 1:
        raise ConfigError(f"expected a single run but the config expands to {len(cells)} cells")
    return cells[0]


def validate_config(cfg: RunConfig) -> dict:
    """Resolve every ``"auto"`` parameter and check compatibility; returns the resolved policy spec."""
    _, resolved = make_policy(cfg.graph, cfg.policy, cfg.horizon)
    if cfg.below_cubic_horizon:
        warnings.warn(
            f"T={cfg.horizon} is below K^3={cfg.graph.num_arms ** 3}; the guarantees assume T >= K^3",
            stacklevel=2,
        )
    return resolved


def resolved_to_json(resolved: dict) -> dict:
    out = {}
    for k, v in resolved.items():
        if isinstance(v, float) and not math.isfinite(v):
            v = None
        out[k] = v
    return out


__all__ = [
    "ConfigError",
    "RunConfig",
    "apply_overrides",
    "expand_document",
    "load_config",
    "load_document",
    "make_policy",
    "validate_config",
]

