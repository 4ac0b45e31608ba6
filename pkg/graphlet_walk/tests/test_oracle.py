"""精确枚举、显式 G^(d) 与对应状态穷举。"""
from __future__ import annotations

from itertools import combinations

import networkx as nx
import numpy as np
import pytest

from graphlet_walk.catalog import alpha_table, classify_mask, edge_mask
from graphlet_walk.errors import ConfigError, RelationshipGraphTooLarge
from graphlet_walk.graph import Graph
from graphlet_walk.oracle import (
    ExactCounts,
    brute_corresponding_states,
    build_relationship_graph,
    connected_subsets,
    exact_enumerate,
    exact_stationary,
    subset_filter_counts,
)


def test_square_three_node_concentration(square):
    exact = exact_enumerate(square, 3)
    assert exact.counts == [2, 2]
    assert exact.concentration == [0.5, 0.5]


def test_square_four_node_subgraph_is_diamond(square):
    assert exact_enumerate(square, 4).counts == [0, 0, 0, 0, 1, 0]


def test_cliques(k4, k5):
    assert exact_enumerate(k4, 3).counts == [0, 4]
    assert exact_enumerate(k5, 5).counts[-1] == 1
    assert exact_enumerate(k5, 4).counts == [0, 0, 0, 0, 0, 5]


@pytest.mark.parametrize("k", [3, 4, 5])
def test_esu_matches_subset_filter(small_random_graphs, k):
    for graph in small_random_graphs:
        assert exact_enumerate(graph, k).counts == subset_filter_counts(graph, k).counts


def test_esu_emits_each_subset_once(er_graph):
    found = list(connected_subsets(er_graph, 3))
    assert len(found) == len(set(found))
    nx_graph = er_graph.to_networkx()
    triangles = sum(nx.triangles(nx_graph).values()) // 3
    assert exact_enumerate(er_graph, 3).counts[1] == triangles


def test_subset_filter_refuses_large_graphs(er_graph):
    with pytest.raises(ConfigError):
        subset_filter_counts(er_graph, 3)


def test_concentration_of_empty_count_is_null():
    assert ExactCounts(k=3, counts=[0, 0]).concentration == [None, None]


def test_exact_counts_json_round_trip(square):
    exact = exact_enumerate(square, 4, name="square")
    again = ExactCounts.model_validate_json(exact.model_dump_json())
    assert again.counts == exact.counts and again.graph == "square"


def test_relationship_graph_sizes(square):
    assert build_relationship_graph(square, 1).edge_count == square.edge_count
    second = build_relationship_graph(square, 2)
    assert len(second.states) == 5
    assert second.edge_count == 8
    third = build_relationship_graph(square, 3)
    assert len(third.states) == 4
    assert third.edge_count == 6


def test_relationship_graph_memory_guard(er_graph):
    with pytest.raises(RelationshipGraphTooLarge):
        build_relationship_graph(er_graph, 3, max_states=10)


def test_relationship_graph_guard_reads_settings(monkeypatch, square):
    monkeypatch.setenv("GRAPHLET_MAX_RELATIONSHIP_STATES", "3")
    with pytest.raises(RelationshipGraphTooLarge):
        build_relationship_graph(square, 2)


def _class_of(graph: Graph, nodes, k):
    pairs = [(i, j) for i, j in combinations(range(k), 2) if graph.has_edge(nodes[i], nodes[j])]
    return classify_mask(k, edge_mask(k, pairs))


@pytest.mark.parametrize("k", [3, 4])
def test_corresponding_state_count_equals_alpha(small_random_graphs, k):
    for graph in small_random_graphs[:3]:
        for d in range(1, k):
            relation = build_relationship_graph(graph, d)
            alpha = alpha_table(k, d).alpha
            for nodes in connected_subsets(graph, k):
                states = brute_corresponding_states(graph, nodes, d, relationship=relation)
                assert len(states) == alpha[_class_of(graph, nodes, k) - 1]


def test_brute_states_check_window_length(square):
    with pytest.raises(ValueError):
        brute_corresponding_states(square, [0, 1, 2, 3], 2, 2)


def test_exact_stationary_is_degree_proportional(square):
    relation = build_relationship_graph(square, 2)
    pi = exact_stationary(relation)
    assert np.isclose(pi.sum(), 1.0)
    assert np.allclose(pi * 16, [relation.degree(s) for s in relation.states])
