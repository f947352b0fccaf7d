import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bobw_graphs import graph as G
from bobw_graphs.errors import BadParameterError, InvalidDominatingSetError, TooLargeError, UncoverableTargetError

import oracles
from corpus import fuzz_corpus


def test_construction_and_neighbourhoods():
    g = G.FeedbackGraph(3, [(1, 2), (2, 2), (3, 1)])
    assert g.out_neighbors(1) == frozenset({2})
    assert g.in_neighbors(2) == frozenset({1, 2})
    assert g.has_self_loop(2) and not g.has_self_loop(1)
    with pytest.raises(BadParameterError):
        G.FeedbackGraph(1, [])
    with pytest.raises(BadParameterError):
        G.FeedbackGraph(3, [(1, 4)])
    with pytest.raises(ValueError):
        g.adjacency[0, 0] = True


def test_json_round_trip(tmp_path):
    g = G.random_graph(6, 0.4, seed=3)
    assert G.FeedbackGraph.from_json(json.loads(json.dumps(g.to_json()))) == g
    path = tmp_path / "g.json"
    path.write_text(json.dumps(g.to_json()))
    assert G.load_graph(str(path)) == g


@pytest.mark.parametrize(
    "spec, tag",
    [
        ("bandit:4", "strongly_observable"),
        ("full_feedback:4", "strongly_observable"),
        ("loopless_clique:4", "strongly_observable"),
        ("total_order:5", "strongly_observable"),
        ("revealing_action:5", "weakly_observable"),
    ],
)
def test_catalogue_observability(spec, tag):
    assert G.classify_observability(G.parse_graph_spec(spec)).tag.value == tag


def test_unobservable_graph():
    g = G.FeedbackGraph(3, [(1, 2), (2, 1)])
    obs = G.classify_observability(g)
    assert obs.tag is G.Observability.UNOBSERVABLE
    assert obs.unobserved == (False, False, True)
    assert obs.unobserved_vertices == frozenset({3})


def test_strong_graph_without_self_loops_is_analyzable():
    a = G.analyze_graph(G.loopless_clique(4))
    assert a.dominating_set == frozenset() and a.v1 == frozenset()
    assert a.v2 == frozenset({1, 2, 3, 4}) and a.alpha_exact == 1


def test_classification_matches_definition_on_corpus():
    for g in fuzz_corpus(150, seed=7):
        assert G.classify_observability(g).tag.value == oracles.observability(g.adjacency)


def test_relabel_preserves_invariants():
    g = G.random_graph(7, 0.3, seed=11)
    perm = [3, 1, 7, 2, 6, 5, 4]
    h = g.relabel(perm)
    assert G.classify_observability(h).tag == G.classify_observability(g).tag
    assert G.independence_number(h) == G.independence_number(g)


def test_alpha_catalogue():
    assert G.independence_number(G.bandit(6)) == (6, 6)
    assert G.independence_number(G.full_feedback(6)) == (1, 1)
    assert G.independence_number(G.loopless_clique(6)) == (1, 1)
    assert G.independence_number(G.revealing_action(6)) == (5, 5)


def test_alpha_exact_matches_brute_force():
    for g in fuzz_corpus(120, seed=5):
        lo, hi = G.independence_number(g)
        assert lo == hi == oracles.brute_force_alpha(g.adjacency)


def test_alpha_greedy_is_a_valid_lower_bound():
    for g in fuzz_corpus(80, seed=9):
        lo, hi = G.independence_number(g, "greedy")
        s = G.greedy_independent_set(g)
        assert len(s) == lo <= oracles.brute_force_alpha(g.adjacency) <= hi
        adj = g.adjacency
        assert not any(adj[i - 1, j - 1] for i in s for j in s if i != j)


def test_alpha_cap():
    with pytest.raises(TooLargeError):
        G.independence_number(G.bandit(25), "exact", max_k=20)


def test_revealing_action_domination():
    g = G.revealing_action(6)
    assert G.weakly_dominating_set_exact(g) == frozenset({1})
    a = G.analyze_graph(g)
    assert a.dominating_set == frozenset({1})
    assert a.k_prime == len(a.v2)


def test_dominating_set_exact_matches_brute_force():
    for g in fuzz_corpus(200, seed=13):
        if not G.classify_observability(g).is_observable:
            continue
        for definition in G.DominationDefinition:
            d = G.weakly_dominating_set_exact(g, definition)
            assert G.covers_targets(g, d, definition)
            assert len(d) == oracles.brute_force_delta(g.adjacency, definition.value)
            greedy = G.weakly_dominating_set_greedy(g, definition)
            assert G.covers_targets(g, greedy, definition)
            assert len(greedy) >= len(d)


def test_uncoverable_targets_raise():
    g = G.FeedbackGraph(3, [(1, 2), (2, 1)])
    with pytest.raises(UncoverableTargetError):
        G.weakly_dominating_set_greedy(g)


def test_domination_definitions_differ_by_at_most_one():
    # the no-self-loop definition can need one more vertex, never fewer
    for g in fuzz_corpus(300, seed=2024):
        if G.classify_observability(g).tag is not G.Observability.WEAKLY_OBSERVABLE:
            continue
        d = len(G.weakly_dominating_set_exact(g, "no_self_loop"))
        d_alt = len(G.weakly_dominating_set_exact(g, "weakly_observable"))
        assert d_alt <= d <= d_alt + 1
        if d_alt >= 2:
            assert d == d_alt


def test_domination_counterexample_pinned():
    # vertex 1 is loopless but seen by everyone else; only the no-self-loop
    # definition has to cover it
    g = G.FeedbackGraph(3, [(2, 1), (3, 1), (1, 2), (3, 3)])
    assert G.classify_observability(g).tag is G.Observability.WEAKLY_OBSERVABLE
    assert len(G.weakly_dominating_set_exact(g, "weakly_observable")) == 1
    assert len(G.weakly_dominating_set_exact(g, "no_self_loop")) == 2


def test_partition_and_invalid_set():
    g = G.FeedbackGraph(4, [(1, 2), (1, 1), (2, 3), (3, 3), (4, 4), (3, 1), (4, 2)])
    v1, v2 = G.partition_v1_v2(g, {1})
    assert v1 == frozenset({1, 2}) and v2 == frozenset({3, 4})
    with pytest.raises(InvalidDominatingSetError):
        G.analyze_graph(g, dominating_set=[3])


@pytest.mark.parametrize("bad", ["bandit:", "bandit", "nosuch:4", "random:4:0.5", "bandit:1"])
def test_bad_specs(bad):
    with pytest.raises(BadParameterError):
        G.parse_graph_spec(bad)


def test_random_graph_is_reproducible():
    assert G.random_graph(8, 0.3, 5) == G.random_graph(8, 0.3, 5)
    assert all(G.random_graph(8, 0.3, 5).has_self_loop(i) for i in range(1, 9))


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 7), st.integers(0, 2**31 - 1))
def test_greedy_cover_property(k, seed):
    rng = np.random.default_rng(seed)
    adj = rng.random((k, k)) < 0.4
    np.fill_diagonal(adj, rng.random(k) < 0.5)
    g = G.FeedbackGraph.from_adjacency(adj)
    if not G.classify_observability(g).is_observable:
        return
    d = G.weakly_dominating_set_greedy(g)
    assert G.covers_targets(g, d)
    v1, v2 = G.partition_v1_v2(g, d)
    assert v1 | v2 == frozenset(g.vertices) and not v1 & v2
