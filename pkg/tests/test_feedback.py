import numpy as np
import pytest

from bobw_graphs import graph as G
from bobw_graphs.errors import BadParameterError, ZeroObservationProbabilityError
from bobw_graphs.feedback import estimate_losses, observation_probabilities, reveal


def expected_estimate(g, p, losses):
    """``sum_j p(j) * estimate(I=j)`` by enumerating the played arm."""
    total = np.zeros(g.num_arms)
    for j in range(1, g.num_arms + 1):
        if p[j - 1] == 0.0:
            continue
        total += p[j - 1] * estimate_losses(g, p, reveal(g, j, losses)).values
    return total


def test_reveal_slices_out_neighbourhood():
    g = G.revealing_action(4)
    losses = np.array([0.1, 0.2, 0.3, 0.4])
    assert dict(reveal(g, 1, losses).observed) == {1: 0.1, 2: 0.2, 3: 0.3, 4: 0.4}
    assert dict(reveal(g, 3, losses).observed) == {}
    with pytest.raises(TypeError):
        reveal(g, 1, losses).observed[2] = 0.0


def test_reveal_rejects_out_of_range_losses():
    with pytest.raises(BadParameterError):
        reveal(G.bandit(2), 1, [1.5, 0.0])


def test_observation_probabilities_bandit_and_full():
    p = np.array([0.2, 0.3, 0.5])
    np.testing.assert_allclose(observation_probabilities(G.bandit(3), p), p)
    np.testing.assert_allclose(observation_probabilities(G.full_feedback(3), p), 1.0)


def test_bandit_estimate_values():
    g = G.bandit(3)
    p = np.array([0.25, 0.25, 0.5])
    est = estimate_losses(g, p, reveal(g, 3, [0.0, 0.0, 0.8]))
    np.testing.assert_allclose(est.values, [0.0, 0.0, 1.6])


def test_unbiased_on_random_graphs():
    rng = np.random.default_rng(17)
    checked = 0
    while checked < 200:
        k = int(rng.integers(2, 8))
        adj = rng.random((k, k)) < 0.5
        np.fill_diagonal(adj, rng.random(k) < 0.5)
        g = G.FeedbackGraph.from_adjacency(adj)
        p = rng.dirichlet(np.ones(k))
        losses = rng.random(k)
        P = observation_probabilities(g, p)
        mean = expected_estimate(g, p, losses)
        seen = P > 0
        if not seen.any():
            continue
        assert np.max(np.abs(mean[seen] - losses[seen])) <= 1e-12
        checked += 1


def test_zero_probability_raises():
    g = G.bandit(2)
    with pytest.raises(ZeroObservationProbabilityError):
        estimate_losses(g, np.array([0.0, 1.0]), reveal(g, 1, [0.5, 0.5]))
