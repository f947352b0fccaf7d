import math

import numpy as np
import pytest

from bobw_graphs import graph as G
from bobw_graphs.config import load_config
from bobw_graphs.errors import BadParameterError, NotStronglyObservableError, SequencingViolationError
from bobw_graphs.feedback import reveal
from bobw_graphs.harness import run_episode
from bobw_graphs.policies import StrongPolicy, recommended_c1

import oracles


def strong_config(graph="bandit:4", means=(0.2, 0.5, 0.6, 0.7), T=100, c1=1.5, trace="full"):
    return load_config(
        {
            "graph": graph,
            "policy": {"name": "strong", "c1": c1},
            "environment": {"type": "stochastic", "means": list(means)},
            "run": {"T": T, "seeds": [0], "trace": trace, "debug": True},
        }
    )


def test_first_rounds_by_hand():
    pol = StrongPolicy(G.bandit(2), c1=1.0)
    d = pol.act()
    np.testing.assert_array_equal(d.q, [0.5, 0.5])
    assert d.gamma == 0.5
    np.testing.assert_array_equal(d.p, [0.5, 0.5])
    pol.observe(reveal(pol.graph, 1, [0.0, 1.0]))
    # a_1 = ln K, so beta_2 = c1 (1 + 1/sqrt 2)
    assert pol.beta == 1.0 + 1.0 / math.sqrt(2.0)


@pytest.mark.parametrize("c1", [1.0, 2.5])
def test_recurrence_matches_straight_line_oracle(c1):
    trace = run_episode(strong_config(c1=c1), 0)
    entropies = [oracles.shannon_entropy(q) for q in trace.q]
    betas, gammas = oracles.strong_recurrence(entropies, c1, 4)
    np.testing.assert_allclose(trace.beta, betas, rtol=0, atol=1e-10)
    np.testing.assert_allclose(trace.gamma, gammas, rtol=0, atol=1e-10)


def test_fixed_point_is_softmax_of_estimates():
    pol = StrongPolicy(G.full_feedback(3), c1=2.0)
    rng = np.random.default_rng(0)
    L = np.zeros(3)
    for _ in range(30):
        d = pol.act()
        z = np.exp(-(L - L.min()) / pol.beta)
        np.testing.assert_allclose(d.q, z / z.sum(), atol=1e-14)
        losses = rng.random(3)
        est = pol.observe(reveal(pol.graph, 1, losses))
        L += est.values


def test_learning_rate_grows_and_mixing_shrinks():
    trace = run_episode(strong_config(T=500), 0)
    assert np.all(np.diff(trace.beta) > 0)
    assert np.all(np.diff(trace.gamma) < 0)
    assert trace.gamma.max() <= 0.5


def test_floor_of_played_distribution():
    trace = run_episode(strong_config(T=200), 0)
    assert np.all(trace.p.min(axis=1) >= trace.gamma / 4 * (1 - 1e-12))


def test_recommended_c1():
    assert recommended_c1(1, 2, 2) == pytest.approx(max(1.0, math.sqrt(math.log(2) * math.log(4) / math.log(2))))
    assert recommended_c1(4, 5, 10_000) == pytest.approx(math.sqrt(4 * math.log(1e4) * math.log(5e4) / math.log(5)))
    assert recommended_c1(1, 5, 10_000, multiplier=1e-3) == 1.0
    with pytest.raises(BadParameterError):
        recommended_c1(0, 5, 100)


def test_rejects_weak_graph_and_small_c1():
    with pytest.raises(NotStronglyObservableError):
        StrongPolicy(G.revealing_action(4), 1.0)
    with pytest.raises(BadParameterError):
        StrongPolicy(G.bandit(3), 0.5)


def test_sequencing():
    pol = StrongPolicy(G.bandit(3), 1.0)
    with pytest.raises(SequencingViolationError):
        pol.update(np.zeros(3))
    pol.act()
    with pytest.raises(SequencingViolationError):
        pol.act()


def test_stochastic_full_feedback_concentrates():
    # c1 at its floor; the auto value (about 9.5 here) leaves q_T(1) near 0.86 at this T
    cfg = strong_config(graph="full_feedback:2", means=(0.1, 0.9), T=2000, c1=1.0, trace="summary")
    hits = sum(run_episode(cfg, s).q[-1, 0] > 0.95 for s in range(10))
    assert hits >= 9
