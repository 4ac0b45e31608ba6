"""G^(d) 上的游走、窗口维护与平稳分布。"""
from __future__ import annotations

from collections import Counter
from fractions import Fraction

import pytest
from scipy.stats import chisquare

from graphlet_walk.access import NeighborOracle
from graphlet_walk.catalog import class_by_name, classify_mask
from graphlet_walk.errors import ConfigError, DegenerateWalkError
from graphlet_walk.graph import Graph, r2_size
from graphlet_walk.oracle import build_relationship_graph, exact_stationary
from graphlet_walk.walk import Walker, init_walk, nominal_degree, pi_tilde, window_weight


def _ids(graph, *labels):
    return tuple(sorted(graph.index_of(x) for x in labels))


def test_square_window_probability(square, square_oracle):
    walker = Walker(square_oracle, d=2, k=4, seed=1)
    window = walker.build_window([_ids(square, 1, 2), _ids(square, 1, 3), _ids(square, 3, 4)])
    assert window.valid
    assert window.degrees == (3, 4, 3)
    weight = pi_tilde(window, exact=True)
    assert weight / (2 * r2_size(square)) == Fraction(1, 64)
    assert classify_mask(4, window.position_mask()) == class_by_name(4, "diamond").index


def test_window_with_repeated_nodes_is_invalid(square, square_oracle):
    walker = Walker(square_oracle, d=2, k=4)
    window = walker.build_window([_ids(square, 1, 2), _ids(square, 1, 3), _ids(square, 2, 3)])
    assert not window.valid


def test_build_window_rejects_non_adjacent_states(square, square_oracle):
    walker = Walker(square_oracle, d=2, k=4)
    with pytest.raises(ValueError):
        walker.build_window([_ids(square, 1, 2), _ids(square, 3, 4), _ids(square, 1, 3)])


def test_square_third_level_relationship_graph_is_complete(square, square_oracle):
    walker = Walker(square_oracle, d=3, k=4)
    triples = [_ids(square, 1, 2, 3), _ids(square, 1, 2, 4), _ids(square, 1, 3, 4), _ids(square, 2, 3, 4)]
    for state in triples:
        assert set(walker.neighbors_of(state)) == set(triples) - {state}


def test_neighbor_enumeration_matches_explicit_relationship_graph(small_random_graphs):
    for graph in small_random_graphs:
        for d in (2, 3):
            relation = build_relationship_graph(graph, d)
            walker = Walker(NeighborOracle(graph), d=d, k=d + 1)
            for state in relation.states:
                assert list(walker.neighbors_of(state)) == sorted(relation.neighbors(state))
                assert walker.state_degree(state) == relation.degree(state)


def test_incremental_window_matches_rebuild(er_graph):
    for d, k in [(1, 4), (2, 4), (2, 5), (3, 5)]:
        walker, window = init_walk(NeighborOracle(er_graph), d, k, seed=3)
        checker = Walker(NeighborOracle(er_graph), d=d, k=k)
        for _ in range(300):
            window = walker.step(window)
            fresh = checker.build_window(window.states)
            assert window.union_nodes == fresh.union_nodes
            assert window.induced_edges == fresh.induced_edges
            assert window.degrees == fresh.degrees
            assert window.searches <= k - 1


def test_walker_calls_match_oracle_counter(ba_graph):
    oracle = NeighborOracle(ba_graph)
    walker, window = init_walk(oracle, 2, 4, seed=5)
    for _ in range(500):
        window = walker.step(window)
    assert walker.api_calls == oracle.access_stats().calls


def test_same_seed_same_trajectory(er_graph):
    def trajectory(seed):
        walker, window = init_walk(NeighborOracle(er_graph), 2, 4, seed=seed)
        states = []
        for _ in range(100):
            window = walker.step(window)
            states.append(window.states[-1])
        return states

    assert trajectory(11) == trajectory(11)
    assert trajectory(11) != trajectory(12)


@pytest.mark.parametrize("mode", ["simple", "nb"])
def test_edge_walk_visits_follow_stationary_law(square, mode):
    relation = build_relationship_graph(square, 2)
    target = exact_stationary(relation)
    walker, window = init_walk(NeighborOracle(square), 2, 3, seed=21, mode=mode)
    steps = 200_000
    visits = Counter()
    for _ in range(steps):
        window = walker.step(window)
        visits[window.states[-1]] += 1
    empirical = [visits[s] / steps for s in relation.states]
    assert sum(abs(a - b) for a, b in zip(empirical, target)) < 0.02


def test_non_backtracking_never_returns_when_it_can_avoid(er_graph):
    walker, window = init_walk(NeighborOracle(er_graph), 1, 3, seed=2, mode="nb")
    for _ in range(2000):
        before = window.states
        window = walker.step(window)
        if walker.state_degree(before[-1]) > 1:
            assert window.states[-1] != before[-2]


def test_nominal_degree_and_weights():
    assert nominal_degree(1) == 1
    assert nominal_degree(5) == 4
    assert window_weight([3, 4, 2, 7], exact=True) == Fraction(1, 8)
    assert window_weight([9, 9]) == 1.0
    assert window_weight([6], exact=True) == 6


def test_init_walk_needs_k_nodes(k3):
    with pytest.raises(ConfigError):
        init_walk(NeighborOracle(k3), 1, 4)


def test_isolated_start_is_degenerate():
    graph = Graph([[1], [0], []])
    with pytest.raises(DegenerateWalkError):
        init_walk(NeighborOracle(graph), 1, 3, start=2)


def test_unknown_mode_rejected(square_oracle):
    with pytest.raises(ConfigError):
        Walker(square_oracle, d=1, k=3, mode="lazy")


def test_burn_in_advances_the_walk(er_graph):
    _, plain = init_walk(NeighborOracle(er_graph), 2, 4, seed=9)
    _, burned = init_walk(NeighborOracle(er_graph), 2, 4, seed=9, burn_in=50)
    assert plain.states != burned.states


@pytest.mark.parametrize("labels", [(1, 2), (1, 3)])
def test_edge_state_neighbor_is_uniform(square, square_oracle, labels):
    state = _ids(square, *labels)
    walker = Walker(square_oracle, d=2, k=3, seed=11)
    expected = walker.neighbors_of(state)
    assert len(expected) == walker.state_degree(state)
    draws = Counter(walker.random_neighbor(state) for _ in range(30_000))
    assert set(draws) == set(expected)
    observed = [draws[s] for s in expected]
    assert chisquare(observed).pvalue > 1e-3
