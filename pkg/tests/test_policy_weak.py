import math

import numpy as np
import pytest

from bobw_graphs import graph as G
from bobw_graphs.config import load_config
from bobw_graphs.errors import BadParameterError, EmptyV2Error, NotWeaklyObservableError
from bobw_graphs.harness import run_episode
from bobw_graphs.policies import WeakAltPolicy, WeakPolicy, recommended_weak_params
from bobw_graphs.solver import RegularizerSpec

import oracles

# arm 1 reveals the loopless arms 2 and 3; arms 4 and 5 are plain bandit arms
MIXED = G.FeedbackGraph(5, [(1, 1), (1, 2), (1, 3), (4, 4), (5, 5)])


def weak_config(policy, graph="revealing_action:5", means=(0.8, 0.2, 0.5, 0.5, 0.5), T=100, trace="full"):
    return {
        "graph": graph,
        "policy": policy,
        "environment": {"type": "stochastic", "means": list(means)},
        "run": {"T": T, "seeds": [0], "trace": trace, "debug": True},
    }


def test_mixed_graph_partition():
    a = G.analyze_graph(MIXED)
    assert a.observability.tag is G.Observability.WEAKLY_OBSERVABLE
    assert a.dominating_set == frozenset({1})
    assert a.v1 == frozenset({1, 2, 3}) and a.v2 == frozenset({4, 5})


@pytest.mark.parametrize("graph", ["revealing_action:5", MIXED.to_json()])
def test_recurrence_matches_straight_line_oracle(graph):
    c1, c2 = 2 * math.log(5), 1.7
    cfg = load_config(weak_config({"name": "weak", "c1": c1, "c2": c2}, graph=graph))
    trace = run_episode(cfg, 3)
    v1 = np.array(sorted(G.analyze_graph(cfg.graph).v1)) - 1
    q1 = trace.q[:, v1]
    a = -np.sum(q1 * np.log(q1) + (1 - q1) * np.log(1 - q1), axis=1)
    b = np.sum(q1 * (1 - q1), axis=1)
    np.testing.assert_allclose(trace.a, a, atol=1e-12)
    np.testing.assert_allclose(trace.b, b, atol=1e-12)
    beta, gp, gam = oracles.weak_recurrence(list(a), list(b), c1, c2, 1)
    np.testing.assert_allclose(trace.beta, beta, rtol=0, atol=1e-10)
    np.testing.assert_allclose(trace.gamma_prime, gp, rtol=0, atol=1e-10)
    np.testing.assert_allclose(trace.gamma, np.minimum(gam, 0.5), rtol=0, atol=1e-10)
    assert trace.clip_events == int(np.sum(np.array(gam) > 0.5))


def test_ftrl_point_matches_oracle():
    cfg = load_config(weak_config({"name": "weak", "c1": 4.0, "c2": 2.0}, graph=MIXED.to_json(), T=40))
    pol = WeakPolicy(cfg.graph, 4.0, 2.0)
    trace = run_episode(cfg, 1, policy=WeakPolicy(cfg.graph, 4.0, 2.0))
    stream = cfg.environment.stream(1)
    from bobw_graphs.feedback import reveal

    L = np.zeros(5)
    for t in range(40):
        spec: RegularizerSpec = pol.regularizer()
        d = pol.act()
        ref = oracles.projected_gradient_oracle(L, spec.kinds, spec.weights)
        np.testing.assert_allclose(d.q, ref, atol=1e-7)
        np.testing.assert_allclose(d.q, trace.q[t], atol=0)
        est = pol.observe(reveal(cfg.graph, int(trace.arms[t]), stream.draw(t + 1)))
        L += est.values


def test_v2_weight_is_root_t():
    pol = WeakPolicy(MIXED, 4.0, 2.0)
    for t in range(1, 6):
        spec = pol.regularizer()
        np.testing.assert_allclose(spec.weights[[3, 4]], math.sqrt(t))
        pol.act()
        pol.update(np.zeros(5))


def test_b_zero_uses_limit_ratio():
    oracle_beta, _, _ = oracles.weak_recurrence([0.0, 0.0], [0.0, 0.0], 4.0, 2.0, 1)
    assert oracle_beta[1] == pytest.approx(8.0 + 2.0 * 4.0 / math.sqrt(4.0))


def test_recommended_params():
    c1, c2 = recommended_weak_params(1, 5, 10_000)
    assert c1 == pytest.approx(max(2 * math.log(5), (math.log(1e4) * math.log(5e4)) ** (1 / 3)))
    assert c2 == pytest.approx(max(1.0, math.sqrt(math.log(1e4))))
    assert recommended_weak_params(1, 5, 10_000, 1e-3) == (pytest.approx(2 * math.log(5)), 1.0)


def test_compatibility_errors():
    with pytest.raises(NotWeaklyObservableError):
        WeakPolicy(G.bandit(3), 3.0, 1.0)
    with pytest.raises(BadParameterError):
        WeakPolicy(G.revealing_action(4), 0.1, 1.0)
    with pytest.raises(EmptyV2Error):
        WeakAltPolicy(G.revealing_action(4), 3.0, 1.0, 1.0)


def test_weak_alt_runs_with_invariants():
    cfg = load_config(weak_config({"name": "weak_alt", "c1": 4.0, "c2": 2.0, "c1_v2": 1.0}, graph=MIXED.to_json(), T=300))
    trace = run_episode(cfg, 0)
    assert np.all(trace.gamma <= 0.5 + 1e-15)
    assert np.all(np.diff(trace.beta2[~np.isnan(trace.beta2)]) > 0)
    np.testing.assert_allclose(trace.p.sum(axis=1), 1.0, atol=1e-12)


def test_domination_definition_switch():
    g = G.FeedbackGraph(3, [(2, 1), (3, 1), (1, 2), (3, 3)])
    for definition, size in (("no_self_loop", 2), ("weakly_observable", 1)):
        cfg = load_config(
            weak_config({"name": "weak", "domination": definition}, graph=g.to_json(), means=(0.3, 0.5, 0.6), T=50)
        )
        trace = run_episode(cfg, 0)
        assert len(trace.params["dominating_set"]) == size
