import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bobw_graphs import solver as S
from bobw_graphs.errors import BadParameterError, BoundaryPointError, NonFiniteError

import oracles


def random_instance(rng, kinds=(S.SHANNON_PAIR, S.ROOT_PAIR)):
    k = int(rng.integers(2, 11))
    spec = S.RegularizerSpec(rng.choice(kinds, size=k), rng.uniform(1.0, 10.0, size=k))
    return rng.uniform(0.0, 20.0, size=k), spec


def test_shannon_is_softmax():
    L = np.array([0.0, 1.0, 3.0])
    q = S.solve_shannon(L, 2.0)
    z = np.exp(-L / 2.0)
    np.testing.assert_allclose(q, z / z.sum(), rtol=1e-15)


def test_shannon_large_offsets():
    q = S.solve_shannon(np.array([1e6, 1e6 + 1.0]), 1.0)
    np.testing.assert_allclose(q, [1 / (1 + math.e**-1), math.e**-1 / (1 + math.e**-1)])


def test_full_shannon_through_separable_solver_matches_softmax():
    L = np.array([0.5, 2.0, 1.0, 4.0])
    spec = S.RegularizerSpec.uniform(S.SHANNON_FULL, 3.0, 4)
    np.testing.assert_allclose(S.solve_separable(L, spec), S.solve_shannon(L, 3.0), atol=1e-13)


def test_symmetric_losses_give_uniform_point():
    for kind in (S.SHANNON_FULL, S.SHANNON_PAIR, S.ROOT_PAIR):
        q = S.solve_separable(np.full(5, 7.0), S.RegularizerSpec.uniform(kind, 2.0, 5))
        np.testing.assert_allclose(q, 0.2, atol=1e-14)


def test_two_arm_pair_entropy_closed_form():
    # with K=2 and equal weights the pair terms reduce to a logistic in L1-L2
    w, L = 2.0, np.array([1.0, 3.0])
    q = S.solve_separable(L, S.RegularizerSpec.uniform(S.SHANNON_PAIR, w, 2))
    expected = 1.0 / (1.0 + math.exp((L[0] - L[1]) / (2.0 * w)))
    assert q[0] == pytest.approx(expected, abs=1e-13)


def test_matches_projected_gradient_oracle():
    rng = np.random.default_rng(1)
    for _ in range(100):
        L, spec = random_instance(rng, kinds=(S.SHANNON_FULL, S.SHANNON_PAIR, S.ROOT_PAIR))
        q = S.solve_separable(L, spec)
        ref = oracles.projected_gradient_oracle(L, spec.kinds, spec.weights)
        assert np.max(np.abs(q - ref)) < 1e-7
        assert abs(q.sum() - 1.0) < 1e-12
        assert S.kkt_residual(q, L, spec) < 1e-8


def test_multiplier_is_returned():
    L = np.array([0.0, 1.0, 2.0])
    spec = S.RegularizerSpec.uniform(S.SHANNON_PAIR, 1.0, 3)
    q, lam = S.solve_separable(L, spec, return_multiplier=True)
    np.testing.assert_allclose(S.regularizer_gradient(q, spec) + L + lam, 0.0, atol=1e-9)


def test_extreme_weights_stay_accurate():
    L = np.array([0.0, 20.0, 20.0, 20.0])
    for kind in (S.SHANNON_PAIR, S.ROOT_PAIR):
        for w in (1e-3, 1e4):
            spec = S.RegularizerSpec.uniform(kind, w, 4)
            q = S.solve_separable(L, spec)
            assert abs(q.sum() - 1) < 1e-10 and q.min() >= 0


def test_bad_inputs():
    spec = S.RegularizerSpec.uniform(S.SHANNON_PAIR, 1.0, 3)
    with pytest.raises(NonFiniteError):
        S.solve_separable(np.array([0.0, np.nan, 1.0]), spec)
    with pytest.raises(BadParameterError):
        S.solve_separable(np.zeros(4), spec)
    with pytest.raises(BadParameterError):
        S.RegularizerSpec([0, 1], [1.0, 0.0])
    with pytest.raises(BadParameterError):
        S.RegularizerSpec([0, 5], [1.0, 1.0])
    with pytest.raises(BadParameterError):
        S.solve_shannon(np.zeros(2), 0.0)


def test_kkt_residual_rejects_boundary_points():
    spec = S.RegularizerSpec.uniform(S.SHANNON_PAIR, 1.0, 2)
    with pytest.raises(BoundaryPointError):
        S.kkt_residual(np.array([1.0, 0.0]), np.zeros(2), spec)


def test_entropies():
    p = np.array([0.5, 0.25, 0.25])
    assert S.shannon_entropy(p) == pytest.approx(oracles.shannon_entropy(p), abs=1e-15)
    pair = -sum(x * math.log(x) + (1 - x) * math.log(1 - x) for x in p)
    assert S.pair_entropy_sum(p) == pytest.approx(pair, abs=1e-15)
    assert S.pair_entropy_sum(p, [1]) == pytest.approx(math.log(2), abs=1e-15)
    assert S.pair_variance_sum(p) == pytest.approx(0.25 + 2 * 0.1875)


def test_entropy_bound_dominates_entropy():
    rng = np.random.default_rng(3)
    for _ in range(500):
        k = int(rng.integers(2, 12))
        p = rng.dirichlet(np.full(k, rng.uniform(0.05, 3.0)))
        i = int(rng.integers(1, k + 1))
        assert S.shannon_entropy(p) <= S.entropy_bound(p, i) + 1e-12


def test_entropy_bound_at_point_mass():
    assert S.entropy_bound(np.array([1.0, 0.0, 0.0]), 1) == 0.0


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.floats(0.0, 20.0), min_size=2, max_size=10),
    st.floats(0.5, 50.0),
    st.sampled_from([S.SHANNON_FULL, S.SHANNON_PAIR, S.ROOT_PAIR]),
)
def test_solution_is_a_distribution_ordered_by_loss(losses, w, kind):
    L = np.array(losses)
    q = S.solve_separable(L, S.RegularizerSpec.uniform(kind, w, L.size))
    assert abs(q.sum() - 1.0) < 1e-10 and np.all(q > 0)
    order = np.argsort(L, kind="stable")
    assert np.all(np.diff(q[order]) <= 1e-12)
