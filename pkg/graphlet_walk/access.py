"""受限访问模型：只能通过“查询某个用户的好友列表”来获取邻接信息。

每次查询计一次 API 调用，实验可以用调用次数而不是步数衡量成本。
"""
from __future__ import annotations

import threading
import time
from typing import Dict, NamedTuple, Optional, Set, Tuple

from pydantic import BaseModel, Field

from .graph import Graph
from .settings import AppSettings, get_settings


class Neighborhood(NamedTuple):
    node: int
    neighbors: Tuple[int, ...]
    degree: int
    from_cache: bool = False


class AccessStats(BaseModel):
    """邻居查询的计数快照。"""

    calls: int = Field(ge=0, description="真正发往后端的查询次数")
    touched: int = Field(ge=0, description="至少被查询过一次的不同节点数")
    cached_hits: int = Field(default=0, ge=0, description="由本地缓存直接应答的查询次数")


class NeighborOracle:
    """包装一张不可变图的邻居查询接口，计数器在线程间原子更新。"""

    def __init__(self, graph: Graph, *, memoize: bool = False, latency_ms: float = 0.0) -> None:
        if latency_ms < 0:
            raise ValueError("latency_ms 不能为负")
        self._graph = graph
        self._memoize = memoize
        self._latency = latency_ms / 1000.0
        self._lock = threading.Lock()
        self._calls = 0
        self._cached_hits = 0
        self._touched: Set[int] = set()
        self._memo: Dict[int, Neighborhood] = {}

    @classmethod
    def from_settings(cls, graph: Graph, settings: Optional[AppSettings] = None) -> "NeighborOracle":
        settings = settings or get_settings()
        return cls(graph, memoize=settings.memoize_neighbors, latency_ms=settings.access_latency_ms)

    @property
    def node_count(self) -> int:
        """节点总数视为公开元数据（用于均匀选取起点），不计调用。"""

        return self._graph.node_count

    @property
    def memoize(self) -> bool:
        return self._memoize

    def fetch_neighbors(self, v: int) -> Neighborhood:
        if not 0 <= v < self._graph.node_count:
            raise IndexError(f"节点编号 {v} 越界（节点数 {self._graph.node_count}）")
        if self._memoize:
            with self._lock:
                hit = self._memo.get(v)
                if hit is not None:
                    self._cached_hits += 1
                    return hit._replace(from_cache=True)
        if self._latency:
            time.sleep(self._latency)
        row = self._graph.neighbors(v)
        hood = Neighborhood(v, row, len(row))
        with self._lock:
            self._calls += 1
            self._touched.add(v)
            if self._memoize:
                self._memo[v] = hood
        return hood

    def access_stats(self) -> AccessStats:
        with self._lock:
            return AccessStats(calls=self._calls, touched=len(self._touched), cached_hits=self._cached_hits)

    def reset(self) -> None:
        """清零计数器并丢弃缓存。"""

        with self._lock:
            self._calls = 0
            self._cached_hits = 0
            self._touched.clear()
            self._memo.clear()


def access_stats(oracle: NeighborOracle) -> AccessStats:
    return oracle.access_stats()


__all__ = ["AccessStats", "Neighborhood", "NeighborOracle", "access_stats"]
