"""测试夹具：4 节点示例图、小型完全图与随机图语料。"""
from __future__ import annotations

import networkx as nx
import pytest

from graphlet_walk.access import NeighborOracle
from graphlet_walk.graph import Graph, largest_connected_component, parse_edge_list

CHORDED_SQUARE_EDGES = [(1, 2), (1, 3), (1, 4), (2, 3), (3, 4)]


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="运行标记为 slow 的统计验收测试")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="需要 --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


def graph_from_labels(edges) -> Graph:
    return parse_edge_list(f"{u} {v}" for u, v in edges)


@pytest.fixture
def square() -> Graph:
    """节点 1..4，两个共享边 1-3 的三角形。"""

    return graph_from_labels(CHORDED_SQUARE_EDGES)


@pytest.fixture
def square_oracle(square) -> NeighborOracle:
    return NeighborOracle(square)


@pytest.fixture
def k3() -> Graph:
    return Graph.from_networkx(nx.complete_graph(3))


@pytest.fixture
def k4() -> Graph:
    return Graph.from_networkx(nx.complete_graph(4))


@pytest.fixture
def k5() -> Graph:
    return Graph.from_networkx(nx.complete_graph(5))


@pytest.fixture
def diamond() -> Graph:
    return Graph.from_edges([(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)])


@pytest.fixture
def star4() -> Graph:
    """中心 0 加 4 个叶子。"""

    return Graph.from_networkx(nx.star_graph(4))


@pytest.fixture
def path4() -> Graph:
    return Graph.from_networkx(nx.path_graph(4))


@pytest.fixture
def path5() -> Graph:
    return Graph.from_networkx(nx.path_graph(5))


@pytest.fixture(scope="session")
def er_graph() -> Graph:
    return largest_connected_component(Graph.from_networkx(nx.gnp_random_graph(200, 0.05, seed=7)))


@pytest.fixture(scope="session")
def ba_graph() -> Graph:
    return Graph.from_networkx(nx.barabasi_albert_graph(500, 5, seed=7))


@pytest.fixture(scope="session")
def small_random_graphs():
    """|V| ≤ 12 的连通随机图，用于穷举对照。"""

    graphs = []
    for seed in range(6):
        g = nx.gnp_random_graph(9 + seed % 3, 0.45, seed=seed)
        graphs.append(largest_connected_component(Graph.from_networkx(g)))
    return graphs
