"""小图上的真值工具：精确枚举、显式 G^(d)、对应状态穷举与平稳分布。

这些实现以正确性为先，只用于测试、真值文件和小规模实验。
"""
from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, computed_field

from .catalog import classify_mask, edge_mask, enumerate_classes
from .errors import ConfigError, RelationshipGraphTooLarge
from .graph import Graph
from .settings import get_settings

logger = logging.getLogger(__name__)

SUBSET_ORACLE_MAX_NODES = 12

State = Tuple[int, ...]


class ExactCounts(BaseModel):
    """各类别连通诱导子图的精确数量 C^k_i。"""

    k: int
    counts: List[int] = Field(description="按类别编号排列的数量")
    graph: str = Field(default="", description="图的名称或路径")

    @computed_field  # type: ignore[prop-decorator]
    @property
    def total(self) -> int:
        return sum(self.counts)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def concentration(self) -> List[Optional[float]]:
        """c^k_i = C^k_i / Σ_j C^k_j；图中没有任何 k 节点连通子图时全为 null。"""

        total = self.total
        return [c / total if total else None for c in self.counts]


def _check_k(k: int) -> None:
    enumerate_classes(k)


def connected_subsets(graph: Graph, size: int) -> Iterator[State]:
    """ESU 扩展：每个诱导连通的 size 节点子集恰好输出一次（升序元组）。"""

    if size < 1:
        raise ValueError("size 必须为正")
    for root in range(graph.node_count):
        row = graph.neighbors(root)
        yield from _extend(graph, [root], [u for u in row if u > root], root, size, {root, *row})


def _extend(graph: Graph, sub: List[int], ext: List[int], root: int, size: int, closed: set) -> Iterator[State]:
    if len(sub) == size:
        yield tuple(sorted(sub))
        return
    pending = sorted(ext)
    while pending:
        w = pending.pop()
        row = graph.neighbors(w)
        exclusive = [u for u in row if u > root and u not in closed]
        yield from _extend(graph, sub + [w], pending + exclusive, root, size, closed.union(row))


def _subset_class(graph: Graph, nodes: Sequence[int], k: int) -> Optional[int]:
    pairs = ((i, j) for i, j in combinations(range(k), 2) if graph.has_edge(nodes[i], nodes[j]))
    return classify_mask(k, edge_mask(k, pairs))


def exact_enumerate(graph: Graph, k: int, *, name: str = "") -> ExactCounts:
    """精确统计每个类别的连通诱导 k 子图数量。"""

    _check_k(k)
    counts = [0] * len(enumerate_classes(k))
    for nodes in connected_subsets(graph, k):
        index = _subset_class(graph, nodes, k)
        counts[index - 1] += 1
    logger.info("exact enumeration k=%d: %d connected subgraphs", k, sum(counts))
    return ExactCounts(k=k, counts=counts, graph=name)


def subset_filter_counts(graph: Graph, k: int) -> ExactCounts:
    """第二个独立真值：遍历全部 C(|V|, k) 个节点子集再过滤连通者，仅限小图。"""

    _check_k(k)
    if graph.node_count > SUBSET_ORACLE_MAX_NODES:
        raise ConfigError(f"子集遍历真值只用于 |V| ≤ {SUBSET_ORACLE_MAX_NODES} 的图")
    counts = [0] * len(enumerate_classes(k))
    for nodes in combinations(range(graph.node_count), k):
        index = _subset_class(graph, nodes, k)
        if index is not None:
            counts[index - 1] += 1
    return ExactCounts(k=k, counts=counts)


@dataclass(frozen=True)
class RelationshipGraph:
    """显式构造的 G^(d)：第 i 个节点对应状态 states[i]。"""

    d: int
    states: Tuple[State, ...]
    graph: Graph
    index: Dict[State, int] = field(default_factory=dict, compare=False)

    @property
    def edge_count(self) -> int:
        return self.graph.edge_count

    def degree(self, state: State) -> int:
        return self.graph.degree(self.index[state])

    def neighbors(self, state: State) -> List[State]:
        return [self.states[j] for j in self.graph.neighbors(self.index[state])]


def build_relationship_graph(graph: Graph, d: int, *, max_states: Optional[int] = None) -> RelationshipGraph:
    """状态为连通 d 子集，两个状态共享 d-1 个节点时相邻；d=1 时就是 G 本身。"""

    if d < 1:
        raise ValueError("d 必须为正")
    limit = max_states if max_states is not None else get_settings().max_relationship_states
    if d == 1:
        if graph.node_count > limit:
            raise RelationshipGraphTooLarge(d, limit)
        states = tuple((v,) for v in range(graph.node_count))
        return RelationshipGraph(d, states, graph, {s: i for i, s in enumerate(states)})
    found: List[State] = []
    for state in connected_subsets(graph, d):
        found.append(state)
        if len(found) > limit:
            raise RelationshipGraphTooLarge(d, limit)
    states = tuple(sorted(found))
    index = {s: i for i, s in enumerate(states)}
    buckets: Dict[State, List[int]] = defaultdict(list)
    for i, state in enumerate(states):
        for shared in combinations(state, d - 1):
            buckets[shared].append(i)
    edges = [pair for members in buckets.values() for pair in combinations(members, 2)]
    relation = Graph.from_edges(edges, range(len(states)))
    logger.debug("built G^(%d): %d states, %d edges", d, len(states), relation.edge_count)
    return RelationshipGraph(d, states, relation, index)


def brute_corresponding_states(
    graph: Graph,
    subgraph_nodes: Sequence[int],
    d: int,
    l: Optional[int] = None,  # noqa: E741
    *,
    relationship: Optional[RelationshipGraph] = None,
) -> List[Tuple[State, ...]]:
    """在显式 G^(d) 上穷举所有 s(X^(l)) 恰为给定子图的窗口 X^(l)。"""

    nodes = frozenset(subgraph_nodes)
    length = len(nodes) - d + 1
    if l is not None and l != length:
        raise ValueError(f"l 应为 |s| - d + 1 = {length}")
    relation = relationship if relationship is not None else build_relationship_graph(graph, d)
    inside = {i for i, s in enumerate(relation.states) if nodes.issuperset(s)}
    found: List[Tuple[State, ...]] = []

    def walk(path: List[int], covered: frozenset) -> None:
        if len(path) == length:
            if covered == nodes:
                found.append(tuple(relation.states[i] for i in path))
            return
        for j in relation.graph.neighbors(path[-1]):
            if j in inside and j not in path:
                walk(path + [j], covered.union(relation.states[j]))

    for i in sorted(inside):
        walk([i], frozenset(relation.states[i]))
    return found


def exact_stationary(relation: Union[RelationshipGraph, Graph]) -> np.ndarray:
    """简单随机游走的平稳分布 π(v) = d_v / 2|E|。"""

    target = relation.graph if isinstance(relation, RelationshipGraph) else relation
    degrees = target.degrees.astype(float)
    return degrees / degrees.sum()


__all__ = [
    "ExactCounts",
    "RelationshipGraph",
    "SUBSET_ORACLE_MAX_NODES",
    "brute_corresponding_states",
    "build_relationship_graph",
    "connected_subsets",
    "exact_enumerate",
    "exact_stationary",
    "subset_filter_counts",
]
