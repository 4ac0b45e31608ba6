"""边表解析、图结构与最大连通分量。"""
from __future__ import annotations

import io

import networkx as nx
import numpy as np
import pytest

from graphlet_walk.errors import EdgeListParseError, EmptyGraphError
from graphlet_walk.oracle import build_relationship_graph
from graphlet_walk.graph import (
    Graph,
    is_connected,
    largest_connected_component,
    load_edge_list,
    parse_edge_list,
    r2_size,
    serialize_edge_list,
    write_edge_list,
)


def test_parse_skips_comments_loops_and_duplicates(caplog):
    text = "# header\n\n1 2\n2 1\n3 3\n2 3\n  # indented comment\n"
    with caplog.at_level("INFO", logger="graphlet_walk.graph"):
        g = parse_edge_list(text.splitlines())
    assert g.node_count == 3
    assert g.edge_count == 2
    assert g.labels == (1, 2, 3)
    assert "1 self-loops dropped" in caplog.text
    assert "1 duplicate records merged" in caplog.text


def test_parse_reports_line_number():
    with pytest.raises(EdgeListParseError) as info:
        parse_edge_list(["1 2", "2 x"])
    assert info.value.line_number == 2
    assert info.value.line == "2 x"


def test_parse_rejects_wrong_token_count():
    with pytest.raises(EdgeListParseError):
        parse_edge_list(["1 2 3"])


def test_parse_rejects_empty_input():
    with pytest.raises(EmptyGraphError):
        parse_edge_list(["# nothing", "5 5"])


def test_labels_map_to_dense_ids(square):
    assert [square.index_of(label) for label in (1, 2, 3, 4)] == [0, 1, 2, 3]
    assert square.label_of(2) == 3
    with pytest.raises(KeyError):
        square.index_of(99)


def test_neighbors_sorted_and_degrees(square):
    assert square.neighbors(square.index_of(1)) == (1, 2, 3)
    assert square.degrees.tolist() == [3, 2, 3, 2]
    assert square.degree(square.index_of(4)) == 2


def test_degrees_view_is_read_only(square):
    with pytest.raises(ValueError):
        square.degrees[0] = 7


def test_has_edge_is_symmetric(square):
    one, two, four = square.index_of(1), square.index_of(2), square.index_of(4)
    assert square.has_edge(one, two) and square.has_edge(two, one)
    assert not square.has_edge(two, four)
    assert not square.has_edge(one, one)


def test_invalid_node_id_raises_index_error(square):
    with pytest.raises(IndexError, match="节点数 4"):
        square.neighbors(4)


def test_constructor_rejects_asymmetric_rows():
    with pytest.raises(ValueError):
        Graph([[1], []])


def test_edges_and_csr_agree(square):
    edges = list(square.edges())
    assert all(u < v for u, v in edges)
    assert len(edges) == square.edge_count == 5
    csr = square.to_csr()
    assert csr.nnz == 10
    assert np.array_equal(np.asarray(csr.sum(axis=1)).ravel(), square.degrees)


def test_r2_size_matches_closed_form(square, k4):
    assert r2_size(square) == 8
    # 每条边与其余 4 条边各共享一个端点
    assert r2_size(k4) == 6 * 4 // 2


def test_r2_size_matches_explicit_relationship_graph(small_random_graphs, square):
    for graph in [square, *small_random_graphs]:
        assert r2_size(graph) == build_relationship_graph(graph, 2).edge_count


def test_round_trip_through_text(tmp_path, square):
    path = tmp_path / "g.txt"
    write_edge_list(square, path)
    assert load_edge_list(path) == square
    assert load_edge_list(io.BytesIO(serialize_edge_list(square).encode())) == square


def test_largest_component_keeps_labels():
    g = parse_edge_list(["10 11", "11 12", "20 21"])
    lcc = largest_connected_component(g)
    assert lcc.labels == (10, 11, 12)
    assert is_connected(lcc)
    assert not is_connected(g)


def test_largest_component_tie_prefers_smaller_label():
    g = parse_edge_list(["7 8", "1 2"])
    assert largest_connected_component(g).labels == (1, 2)


def test_networkx_conversion_round_trip():
    nx_graph = nx.petersen_graph()
    g = Graph.from_networkx(nx_graph)
    assert g.node_count == 10 and g.edge_count == 15
    assert nx.is_isomorphic(g.to_networkx(), nx_graph)


def test_subgraph_is_induced(square):
    sub = square.subgraph([square.index_of(1), square.index_of(2), square.index_of(3)])
    assert sub.edge_count == 3
    assert sub.labels == (1, 2, 3)
