"""3/4/5 节点图元目录：类别常量、同构分类与状态对应系数 α。

类别顺序固定为常量（边表写在位置 0..k-1 上），报告列与文献表格一一对应。
小图的规范编码通过穷举置换（至多 5! = 120 种）求最小边位掩码得到。
"""
from __future__ import annotations

import logging
from functools import lru_cache
from itertools import combinations, permutations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field

from .errors import ConfigError

logger = logging.getLogger(__name__)

SUPPORTED_K = (3, 4, 5)
DISCONNECTED = None

Pair = Tuple[int, int]
NodeSubset = Tuple[int, ...]

_CLASS_TABLE: Dict[int, Tuple[Tuple[str, Tuple[Pair, ...]], ...]] = {
    3: (
        ("wedge", ((0, 1), (1, 2))),
        ("triangle", ((0, 1), (0, 2), (1, 2))),
    ),
    4: (
        ("3-path", ((0, 1), (1, 2), (2, 3))),
        ("3-star", ((0, 1), (0, 2), (0, 3))),
        ("4-cycle", ((0, 1), (1, 2), (2, 3), (0, 3))),
        ("tailed-triangle", ((0, 1), (0, 2), (1, 2), (2, 3))),
        ("diamond", ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3))),
        ("4-clique", ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))),
    ),
    5: (
        ("4-path", ((0, 2), (0, 4), (1, 2), (1, 3))),
        ("fork", ((0, 1), (0, 3), (0, 4), (1, 2))),
        ("4-star", ((0, 1), (0, 2), (0, 3), (0, 4))),
        ("bull", ((0, 1), (0, 2), (0, 4), (1, 2), (1, 3))),
        ("long-tailed-triangle", ((0, 1), (0, 4), (1, 2), (1, 3), (2, 3))),
        ("cricket", ((0, 1), (0, 2), (0, 3), (0, 4), (1, 2))),
        ("5-cycle", ((0, 3), (0, 4), (1, 2), (1, 4), (2, 3))),
        ("banner", ((0, 2), (0, 3), (0, 4), (1, 2), (1, 3))),
        ("hub-tailed-diamond", ((0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 3))),
        ("bowtie", ((0, 1), (0, 2), (0, 3), (0, 4), (1, 4), (2, 3))),
        ("rim-tailed-diamond", ((0, 1), (0, 2), (0, 4), (1, 2), (1, 3), (2, 3))),
        ("k2-3", ((0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4))),
        ("house", ((0, 1), (0, 3), (0, 4), (1, 2), (1, 4), (2, 3))),
        ("book", ((0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4))),
        ("tailed-4-clique", ((0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (2, 3))),
        ("gem", ((0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 4), (2, 3))),
        ("k2-3-plus-edge", ((0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 3))),
        ("clique-minus-wedge", ((0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 3))),
        ("wheel", ((0, 1), (0, 2), (0, 3), (0, 4), (1, 3), (1, 4), (2, 3), (2, 4))),
        ("clique-minus-edge", ((0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 3), (2, 4))),
        ("5-clique", tuple(combinations(range(5), 2))),
    ),
}


def _check_k(k: int) -> None:
    if k not in SUPPORTED_K:
        raise ConfigError(f"只支持 k ∈ {SUPPORTED_K}，收到 k={k}")


def check_walk_config(k: int, d: int) -> None:
    """校验 (k, d) 组合：1 ≤ d < k 且至少有一个类别 α > 0。"""

    _check_k(k)
    if not 1 <= d < k:
        raise ConfigError(f"需要 1 ≤ d < k，收到 k={k}, d={d}")
    if not any(alpha_table(k, d).alpha):
        raise ConfigError(f"(k={k}, d={d}) 下所有类别的 α 都为 0，无法估计")


@lru_cache(maxsize=None)
def _pair_bits(k: int) -> Dict[Pair, int]:
    return {pair: bit for bit, pair in enumerate(combinations(range(k), 2))}


def edge_mask(k: int, edges: Iterable[Pair]) -> int:
    """位置 0..k-1 上的边集合 → 位掩码。"""

    bits = _pair_bits(k)
    mask = 0
    for u, v in edges:
        mask |= 1 << bits[(u, v) if u < v else (v, u)]
    return mask


def mask_edges(k: int, mask: int) -> Tuple[Pair, ...]:
    return tuple(pair for pair, bit in _pair_bits(k).items() if mask >> bit & 1)


@lru_cache(maxsize=None)
def _permuted_bits(k: int) -> Tuple[Tuple[int, ...], ...]:
    pairs = list(combinations(range(k), 2))
    bits = _pair_bits(k)
    tables = []
    for perm in permutations(range(k)):
        tables.append(tuple(bits[tuple(sorted((perm[u], perm[v])))] for u, v in pairs))
    return tuple(tables)


@lru_cache(maxsize=None)
def canonical_code(k: int, mask: int) -> int:
    """所有顶点置换下边位掩码的最小值，同构类的唯一标识。"""

    best = None
    for table in _permuted_bits(k):
        code = 0
        for bit, target in enumerate(table):
            if mask >> bit & 1:
                code |= 1 << target
        if best is None or code < best:
            best = code
    return best if best is not None else 0


def _mask_graph(k: int, mask: int) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(range(k))
    graph.add_edges_from(mask_edges(k, mask))
    return graph


@lru_cache(maxsize=None)
def degree_signature(k: int, mask: int) -> Tuple[int, ...]:
    degrees = [0] * k
    for u, v in mask_edges(k, mask):
        degrees[u] += 1
        degrees[v] += 1
    return tuple(sorted(degrees))


class GraphletClass(BaseModel):
    """一个连通 k 节点图元类别 g^k_i。"""

    model_config = ConfigDict(frozen=True)

    k: int = Field(description="节点数，取值 3/4/5")
    index: int = Field(ge=1, description="从 1 开始的类别编号")
    name: str = Field(description="便于阅读的形状名称")
    edges: Tuple[Pair, ...] = Field(description="位置 0..k-1 上的代表边表")
    degree_signature: Tuple[int, ...] = Field(description="升序度序列")
    canonical_code: int = Field(description="置换不变的规范边位编码")

    @property
    def mask(self) -> int:
        return edge_mask(self.k, self.edges)

    @property
    def nodes(self) -> Tuple[int, ...]:
        return tuple(range(self.k))


class AlphaTable(BaseModel):
    """给定 (k, d) 的状态对应系数向量，第 i 项对应 g^k_{i+1}。"""

    model_config = ConfigDict(frozen=True)

    k: int
    d: int
    alpha: Tuple[int, ...]

    @property
    def window_length(self) -> int:
        return self.k - self.d + 1

    @property
    def half(self) -> Tuple[int, ...]:
        return tuple(a // 2 for a in self.alpha)

    @property
    def estimable(self) -> Tuple[int, ...]:
        """α > 0 的类别编号（从 1 开始）。"""

        return tuple(i for i, a in enumerate(self.alpha, start=1) if a > 0)

    @property
    def not_estimable(self) -> Tuple[int, ...]:
        return tuple(i for i, a in enumerate(self.alpha, start=1) if a == 0)


@lru_cache(maxsize=None)
def _classes(k: int) -> Tuple[GraphletClass, ...]:
    result = []
    for index, (name, edges) in enumerate(_CLASS_TABLE[k], start=1):
        mask = edge_mask(k, edges)
        result.append(
            GraphletClass(
                k=k,
                index=index,
                name=name,
                edges=tuple(tuple(sorted(e)) for e in edges),
                degree_signature=degree_signature(k, mask),
                canonical_code=canonical_code(k, mask),
            )
        )
    return tuple(result)


def enumerate_classes(k: int) -> List[GraphletClass]:
    _check_k(k)
    return list(_classes(k))


def class_by_name(k: int, name: str) -> GraphletClass:
    for graphlet in enumerate_classes(k):
        if graphlet.name == name:
            return graphlet
    raise KeyError(f"k={k} 中没有名为 {name!r} 的类别")


@lru_cache(maxsize=None)
def _signature_index(k: int) -> Dict[Tuple[int, ...], Tuple[int, ...]]:
    index: Dict[Tuple[int, ...], List[int]] = {}
    for graphlet in _classes(k):
        index.setdefault(graphlet.degree_signature, []).append(graphlet.index)
    return {sig: tuple(ids) for sig, ids in index.items()}


@lru_cache(maxsize=None)
def _code_index(k: int) -> Dict[int, int]:
    return {graphlet.canonical_code: graphlet.index for graphlet in _classes(k)}


def signature_collisions(k: int) -> Dict[Tuple[int, ...], Tuple[int, ...]]:
    """度序列相同的类别组，这些组在分类时需要回退到规范编码。"""

    _check_k(k)
    return {sig: ids for sig, ids in _signature_index(k).items() if len(ids) > 1}


@lru_cache(maxsize=None)
def classify_mask(k: int, mask: int) -> Optional[int]:
    """按位置掩码分类：先查度序列，冲突时比较规范编码；不连通返回 None。"""

    if not nx.is_connected(_mask_graph(k, mask)):
        return DISCONNECTED
    candidates = _signature_index(k)[degree_signature(k, mask)]
    if len(candidates) == 1:
        return candidates[0]
    return _code_index(k)[canonical_code(k, mask)]


def classify(k: int, node_set: Sequence[int], edge_set: Iterable[Pair]) -> Optional[int]:
    """把 k 个节点上的诱导边集归入类别，返回 1 起始编号或 DISCONNECTED。"""

    _check_k(k)
    if len(node_set) != k or len(set(node_set)) != k:
        raise ValueError(f"需要恰好 {k} 个不同节点，收到 {list(node_set)}")
    position = {node: i for i, node in enumerate(node_set)}
    return classify_mask(k, edge_mask(k, ((position[u], position[v]) for u, v in edge_set)))


def _states_adjacent(a: NodeSubset, b: NodeSubset, d: int, edge_bits: int, k: int) -> bool:
    if d == 1:
        u, v = a[0], b[0]
        return u != v and bool(edge_bits >> _pair_bits(k)[(u, v) if u < v else (v, u)] & 1)
    return len(set(a) & set(b)) == d - 1


@lru_cache(maxsize=None)
def connected_subsets(k: int, mask: int, d: int) -> Tuple[NodeSubset, ...]:
    """位置 0..k-1 上诱导连通的 d 元子集，按字典序。"""

    graph = _mask_graph(k, mask)
    return tuple(s for s in combinations(range(k), d) if nx.is_connected(graph.subgraph(s)))


def connected_d_subgraphs(source: Union[GraphletClass, Iterable[Pair]], d: int) -> List[NodeSubset]:
    """图元（或一个连通边集）中所有诱导连通的 d 节点子集。"""

    if isinstance(source, GraphletClass):
        if not 1 <= d <= source.k:
            raise ValueError(f"需要 1 ≤ d ≤ {source.k}")
        return list(connected_subsets(source.k, source.mask, d))
    edges = [tuple(e) for e in source]
    nodes = sorted({x for e in edges for x in e})
    if not 1 <= d <= len(nodes):
        raise ValueError(f"需要 1 ≤ d ≤ {len(nodes)}")
    graph = nx.Graph(edges)
    return [s for s in combinations(nodes, d) if nx.is_connected(graph.subgraph(s))]


@lru_cache(maxsize=None)
def corresponding_templates(k: int, d: int, mask: int) -> Tuple[Tuple[NodeSubset, ...], ...]:
    """位置掩码所描述子图的全部对应状态：l 个连通 d 子集的有序组，
    相邻两项在关系图意义下相邻，并集覆盖全部 k 个位置。"""

    length = k - d + 1
    subsets = connected_subsets(k, mask, d)
    found = []
    for combo in combinations(subsets, length):
        if len(set().union(*combo)) < k:
            continue
        for order in permutations(combo):
            if all(_states_adjacent(order[j], order[j + 1], d, mask, k) for j in range(length - 1)):
                found.append(order)
    logger.debug("templates cached: k=%d d=%d mask=%d -> %d", k, d, mask, len(found))
    return tuple(found)


def alpha_last_level(graphlet: GraphletClass) -> int:
    """d = k-1 时的闭式：α = |S|·(|S|-1)，S 为连通的 (k-1) 子集。"""

    size = len(connected_subsets(graphlet.k, graphlet.mask, graphlet.k - 1))
    return size * (size - 1)


def compute_alpha(graphlet: GraphletClass, d: int, *, use_closed_form: bool = True) -> int:
    """状态对应系数 α^k_i：组合 × 排列穷举，d = k-1 时可走闭式。"""

    if not 1 <= d <= graphlet.k - 1:
        raise ConfigError(f"需要 1 ≤ d ≤ {graphlet.k - 1}，收到 d={d}")
    if use_closed_form and d == graphlet.k - 1:
        return alpha_last_level(graphlet)
    return len(corresponding_templates(graphlet.k, d, graphlet.mask))


def covering_path_count(graphlet: GraphletClass, d: int) -> int:
    """关系图中由 l 个状态组成、覆盖全部 k 个节点的无向简单路径数（d=1 时即 Hamilton 路径数）。

    与 compute_alpha 相互独立：这里在显式关系图上用 networkx 枚举简单路径。
    """

    k, mask = graphlet.k, graphlet.mask
    length = k - d + 1
    states = connected_subsets(k, mask, d)
    relation = nx.Graph()
    relation.add_nodes_from(states)
    for a, b in combinations(states, 2):
        if _states_adjacent(a, b, d, mask, k):
            relation.add_edge(a, b)
    total = 0
    for source, target in combinations(states, 2):
        for path in nx.all_simple_paths(relation, source, target, cutoff=length - 1):
            if len(path) == length and len(set().union(*path)) == k:
                total += 1
    return total


@lru_cache(maxsize=None)
def alpha_table(k: int, d: int) -> AlphaTable:
    _check_k(k)
    if not 1 <= d < k:
        raise ConfigError(f"需要 1 ≤ d < k，收到 k={k}, d={d}")
    return AlphaTable(k=k, d=d, alpha=tuple(compute_alpha(g, d) for g in _classes(k)))


__all__ = [
    "AlphaTable",
    "DISCONNECTED",
    "GraphletClass",
    "SUPPORTED_K",
    "alpha_last_level",
    "alpha_table",
    "canonical_code",
    "check_walk_config",
    "class_by_name",
    "classify",
    "classify_mask",
    "compute_alpha",
    "connected_d_subgraphs",
    "connected_subsets",
    "corresponding_templates",
    "covering_path_count",
    "degree_signature",
    "edge_mask",
    "enumerate_classes",
    "mask_edges",
    "signature_collisions",
]
