"""底层无向简单图 G：边表读写、最大连通分量与 |R^(2)| 闭式。

节点在内部使用 0 起始的稠密编号，原始标签按升序映射到编号，
邻接表严格升序，便于二分查找与线性归并。
"""
from __future__ import annotations

import io
import logging
from bisect import bisect_left
from pathlib import Path
from typing import IO, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import EdgeListParseError, EmptyGraphError

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]
EdgeSource = Union[str, Path, IO[bytes], IO[str]]


def sorted_contains(values: Sequence[int], item: int) -> bool:
    """在升序序列中二分查找 item。"""

    pos = bisect_left(values, item)
    return pos < len(values) and values[pos] == item


class Graph:
    """不可构造后修改的无向简单图，可被多个游走线程并发读取。"""

    __slots__ = ("_adjacency", "_labels", "_label_index", "_degrees", "_edge_count")

    def __init__(self, adjacency: Sequence[Sequence[int]], labels: Optional[Sequence[int]] = None) -> None:
        adj = tuple(tuple(int(u) for u in row) for row in adjacency)
        n = len(adj)
        for v, row in enumerate(adj):
            for a, b in zip(row, row[1:]):
                if a >= b:
                    raise ValueError(f"节点 {v} 的邻接表必须严格升序")
            if row and (row[0] < 0 or row[-1] >= n):
                raise ValueError(f"节点 {v} 的邻接表含越界编号")
            if sorted_contains(row, v):
                raise ValueError(f"节点 {v} 存在自环")
            for u in row:
                if not sorted_contains(adj[u], v):
                    raise ValueError(f"邻接关系不对称：{v}->{u}")
        self._adjacency = adj
        self._labels = tuple(range(n)) if labels is None else tuple(int(x) for x in labels)
        if len(self._labels) != n:
            raise ValueError("标签数量必须与节点数一致")
        self._label_index = {label: i for i, label in enumerate(self._labels)}
        self._degrees = np.fromiter((len(row) for row in adj), dtype=np.int64, count=n)
        self._edge_count = int(self._degrees.sum()) // 2

    @classmethod
    def from_edges(cls, edges: Iterable[Edge], labels: Optional[Sequence[int]] = None) -> "Graph":
        """由稠密编号的边构造图；自环与重复边被丢弃。"""

        pairs = {(min(u, v), max(u, v)) for u, v in edges if u != v}
        n = len(labels) if labels is not None else (max((b for _, b in pairs), default=-1) + 1)
        rows: List[set] = [set() for _ in range(n)]
        for u, v in pairs:
            rows[u].add(v)
            rows[v].add(u)
        return cls([sorted(r) for r in rows], labels)

    @classmethod
    def from_networkx(cls, nx_graph: nx.Graph) -> "Graph":
        """从 networkx 图转换，整数节点按升序成为稠密编号。"""

        nodes = sorted(nx_graph.nodes())
        index = {node: i for i, node in enumerate(nodes)}
        edges = [(index[u], index[v]) for u, v in nx_graph.edges()]
        labels = nodes if all(isinstance(x, (int, np.integer)) for x in nodes) else None
        return cls.from_edges(edges, labels if labels is not None else range(len(nodes)))

    def to_networkx(self) -> nx.Graph:
        nx_graph = nx.Graph()
        nx_graph.add_nodes_from(range(self.node_count))
        nx_graph.add_edges_from(self.edges())
        return nx_graph

    @property
    def node_count(self) -> int:
        return len(self._adjacency)

    @property
    def edge_count(self) -> int:
        return self._edge_count

    @property
    def labels(self) -> Tuple[int, ...]:
        return self._labels

    @property
    def degrees(self) -> np.ndarray:
        view = self._degrees.view()
        view.flags.writeable = False
        return view

    def index_of(self, label: int) -> int:
        """原始标签 → 稠密编号。"""

        try:
            return self._label_index[label]
        except KeyError:
            raise KeyError(f"图中没有标签为 {label} 的节点") from None

    def label_of(self, v: int) -> int:
        self._check(v)
        return self._labels[v]

    def _check(self, v: int) -> None:
        if not 0 <= v < len(self._adjacency):
            raise IndexError(f"节点编号 {v} 越界（节点数 {len(self._adjacency)}）")

    def neighbors(self, v: int) -> Tuple[int, ...]:
        self._check(v)
        return self._adjacency[v]

    def degree(self, v: int) -> int:
        self._check(v)
        return len(self._adjacency[v])

    def has_edge(self, u: int, v: int) -> bool:
        """在较短的邻接表里二分查找。"""

        self._check(u)
        self._check(v)
        if u == v:
            return False
        a, b = self._adjacency[u], self._adjacency[v]
        return sorted_contains(a, v) if len(a) <= len(b) else sorted_contains(b, u)

    def edges(self) -> Iterator[Edge]:
        for u, row in enumerate(self._adjacency):
            for v in row[bisect_left(row, u) :]:
                yield (u, v)

    def edge_array(self) -> np.ndarray:
        """形状为 (|E|, 2) 的边数组，每行 u < v。"""

        return np.array(list(self.edges()), dtype=np.int64).reshape(-1, 2)

    def to_csr(self) -> csr_matrix:
        indptr = np.concatenate(([0], np.cumsum(self._degrees)))
        indices = np.fromiter((u for row in self._adjacency for u in row), dtype=np.int64, count=int(indptr[-1]))
        data = np.ones(len(indices), dtype=np.int8)
        return csr_matrix((data, indices, indptr), shape=(self.node_count, self.node_count))

    def subgraph(self, nodes: Iterable[int]) -> "Graph":
        """诱导子图，按原编号顺序重新稠密编号，保留原始标签。"""

        keep = sorted(set(nodes))
        for v in keep:
            self._check(v)
        remap = {v: i for i, v in enumerate(keep)}
        rows = [[remap[u] for u in self._adjacency[v] if u in remap] for v in keep]
        return Graph(rows, [self._labels[v] for v in keep])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._adjacency == other._adjacency and self._labels == other._labels

    def __hash__(self) -> int:
        return hash((self._adjacency, self._labels))

    def __repr__(self) -> str:
        return f"Graph(node_count={self.node_count}, edge_count={self.edge_count})"


def _iter_text_lines(source: EdgeSource) -> Iterator[str]:
    if isinstance(source, (str, Path)):
        with open(source, "rb") as handle:
            yield from _iter_text_lines(handle)
        return
    for raw in source:
        yield raw.decode("ascii", errors="replace") if isinstance(raw, bytes) else raw


def parse_edge_list(lines: Iterable[str]) -> Graph:
    """解析边表文本行：'#' 开头为注释，数据行恰好两个整数。"""

    pairs = set()
    self_loops = 0
    records = 0
    for number, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise EdgeListParseError(number, line, f"需要 2 个整数，实际 {len(tokens)} 个")
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise EdgeListParseError(number, line, "存在非整数字段") from None
        records += 1
        if u == v:
            self_loops += 1
            continue
        pairs.add((min(u, v), max(u, v)))
    if not pairs:
        raise EmptyGraphError("边表中没有任何有效边")
    labels = sorted({x for pair in pairs for x in pair})
    index = {label: i for i, label in enumerate(labels)}
    graph = Graph.from_edges(((index[u], index[v]) for u, v in pairs), labels)
    logger.info(
        "loaded graph: %d nodes, %d edges (%d self-loops dropped, %d duplicate records merged)",
        graph.node_count,
        graph.edge_count,
        self_loops,
        records - self_loops - len(pairs),
    )
    return graph


def load_edge_list(source: EdgeSource) -> Graph:
    """从文件路径或字节/文本流读取边表；不做最大连通分量提取。"""

    return parse_edge_list(_iter_text_lines(source))


def write_edge_list(graph: Graph, target: Union[str, Path, IO[str]]) -> None:
    """按原始标签写出边表，每条边一行，load_edge_list 可原样读回。"""

    if isinstance(target, (str, Path)):
        with open(target, "w", encoding="utf-8") as handle:
            write_edge_list(graph, handle)
        return
    labels = graph.labels
    for u, v in graph.edges():
        target.write(f"{labels[u]} {labels[v]}\n")


def serialize_edge_list(graph: Graph) -> str:
    buffer = io.StringIO()
    write_edge_list(graph, buffer)
    return buffer.getvalue()


def largest_connected_component(graph: Graph) -> Graph:
    """最大连通分量；规模相同时取最小原始标签更小的那个。"""

    if graph.node_count == 0:
        raise EmptyGraphError("空图没有连通分量")
    count, membership = connected_components(graph.to_csr(), directed=False)
    if count == 1:
        return graph
    sizes = np.bincount(membership, minlength=count)
    labels = np.asarray(graph.labels)
    min_labels = np.full(count, np.iinfo(np.int64).max, dtype=np.int64)
    np.minimum.at(min_labels, membership, labels)
    best = min(range(count), key=lambda c: (-int(sizes[c]), int(min_labels[c])))
    nodes = np.flatnonzero(membership == best)
    logger.info("kept largest component: %d of %d nodes (%d components)", len(nodes), graph.node_count, count)
    return graph.subgraph(nodes.tolist())


def is_connected(graph: Graph) -> bool:
    if graph.node_count == 0:
        return False
    count, _ = connected_components(graph.to_csr(), directed=False)
    return count == 1


def r2_size(graph: Graph) -> int:
    """|R^(2)| = ½ Σ_{(u,v)∈E} (d_u + d_v − 2)，一次扫描边即可。"""

    edges = graph.edge_array()
    if len(edges) == 0:
        return 0
    deg = graph.degrees
    return int((deg[edges[:, 0]] + deg[edges[:, 1]] - 2).sum()) // 2


def has_edge(graph: Graph, u: int, v: int) -> bool:
    return graph.has_edge(u, v)


__all__ = [
    "Edge",
    "Graph",
    "has_edge",
    "is_connected",
    "largest_connected_component",
    "load_edge_list",
    "parse_edge_list",
    "r2_size",
    "serialize_edge_list",
    "sorted_contains",
    "write_edge_list",
]
