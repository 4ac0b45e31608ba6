"""在 G^(d) 上执行简单随机游走与非回溯随机游走，G^(d) 从不显式构造。

窗口 X^(l) = (X_1, …, X_l) 保存最近 l 个状态、它们覆盖的节点集合与诱导边集。
每走一步只有一个节点可能进入窗口，诱导边通过对它的邻接表做至多 k-1 次二分查找来更新。
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from networkx.utils import UnionFind

from .access import Neighborhood, NeighborOracle
from .catalog import check_walk_config, edge_mask
from .errors import ConfigError, DegenerateWalkError
from .graph import sorted_contains

logger = logging.getLogger(__name__)

SubgraphState = Tuple[int, ...]
WalkMode = Literal["simple", "nb"]
Weight = Union[float, Fraction]


def make_state(nodes: Iterable[int]) -> SubgraphState:
    return tuple(sorted(set(nodes)))


@dataclass(frozen=True)
class WalkWindow:
    """扩展马尔可夫链的一个状态，degrees[j] 是 states[j] 在 G^(d) 中的度。"""

    k: int
    d: int
    states: Tuple[SubgraphState, ...]
    degrees: Tuple[int, ...]
    union_nodes: FrozenSet[int]
    induced_edges: FrozenSet[Tuple[int, int]]
    prev_state: Optional[SubgraphState] = None
    searches: int = 0

    @property
    def valid(self) -> bool:
        return len(self.union_nodes) == self.k

    @property
    def sorted_nodes(self) -> Tuple[int, ...]:
        return tuple(sorted(self.union_nodes))

    def position_mask(self) -> int:
        """以升序节点位置表示的诱导边位掩码，只对有效窗口有意义。"""

        position = {v: i for i, v in enumerate(self.sorted_nodes)}
        return edge_mask(self.k, ((position[u], position[v]) for u, v in self.induced_edges))


def nominal_degree(degree: int) -> int:
    """非回溯游走的名义度 max(d-1, 1)。"""

    return max(degree - 1, 1)


def pi_tilde(window: WalkWindow, mode: WalkMode = "simple", *, exact: bool = False) -> Weight:
    """π̃_e(X^(l)) = 2|R^(d)|·π_e(X^(l))，只依赖窗口内部状态的度。"""

    degrees = window.degrees if mode == "simple" else tuple(nominal_degree(x) for x in window.degrees)
    return window_weight(degrees, exact=exact)


def window_weight(degrees: Sequence[int], *, exact: bool = False) -> Weight:
    length = len(degrees)
    if length == 1:
        return Fraction(degrees[0]) if exact else float(degrees[0])
    if length == 2:
        return Fraction(1) if exact else 1.0
    if exact:
        value = Fraction(1)
        for x in degrees[1:-1]:
            value /= x
        return value
    value = 1.0
    for x in degrees[1:-1]:
        value /= x
    return value


class Walker:
    """单线程游走器：持有自己的随机数发生器，所有邻接信息都经由 NeighborOracle 获取。

    成本模型：爬虫在窗口内需要反复读取并集节点的好友列表（重建诱导边、计算状态度），
    这些列表在窗口存续期间保存在 _hoods 中，重复读取不计调用；节点离开窗口后列表被丢弃，
    再次访问时重新计一次调用。api_calls 只统计真正发往后端的查询，cached_hits 统计
    NeighborOracle 的跨窗口缓存（--memoize）应答的查询。
    """

    def __init__(
        self,
        oracle: NeighborOracle,
        d: int,
        k: int,
        *,
        mode: WalkMode = "simple",
        seed: Optional[int] = 0,
        buffer_size: int = 4096,
    ) -> None:
        check_walk_config(k, d)
        if mode not in ("simple", "nb"):
            raise ConfigError(f"未知的游走方式：{mode}")
        self.oracle = oracle
        self.d = d
        self.k = k
        self.window_length = k - d + 1
        self.mode: WalkMode = mode
        self.window: Optional[WalkWindow] = None
        self.api_calls = 0
        self.cached_hits = 0
        self.rejections = 0
        self._rng = np.random.default_rng(seed)
        self._buffer_size = buffer_size
        self._buffer = np.empty(0)
        self._cursor = 0
        self._hoods: Dict[int, Neighborhood] = {}
        self._enumerated: Dict[SubgraphState, Tuple[SubgraphState, ...]] = {}

    def uniform(self) -> float:
        if self._cursor >= len(self._buffer):
            self._buffer = self._rng.random(self._buffer_size)
            self._cursor = 0
        value = float(self._buffer[self._cursor])
        self._cursor += 1
        return value

    def below(self, n: int) -> int:
        """[0, n) 上的均匀整数。"""

        return min(int(self.uniform() * n), n - 1)

    def hood(self, v: int) -> Neighborhood:
        hood = self._hoods.get(v)
        if hood is None:
            hood = self.oracle.fetch_neighbors(v)
            if hood.from_cache:
                self.cached_hits += 1
            else:
                self.api_calls += 1
            self._hoods[v] = hood
        return hood

    def _prune(self, window: WalkWindow) -> None:
        self._hoods = {v: h for v, h in self._hoods.items() if v in window.union_nodes}
        if self._enumerated:
            keep = set(window.states)
            self._enumerated = {s: n for s, n in self._enumerated.items() if s in keep}

    def _connected_with(self, rest: Sequence[int], candidate: int) -> bool:
        members = list(rest) + [candidate]
        forest = UnionFind(members)
        for i, a in enumerate(rest):
            row = self.hood(a).neighbors
            for b in rest[i + 1 :]:
                if sorted_contains(row, b):
                    forest.union(a, b)
            if sorted_contains(row, candidate):
                forest.union(a, candidate)
        root = forest[candidate]
        return all(forest[x] == root for x in rest)

    def neighbors_of(self, state: SubgraphState) -> Tuple[SubgraphState, ...]:
        """完整枚举 state 在 G^(d) 中的邻居（升序、去重）。"""

        cached = self._enumerated.get(state)
        if cached is not None:
            return cached
        if self.d == 1:
            result = tuple((u,) for u in self.hood(state[0]).neighbors)
        else:
            members = set(state)
            found = set()
            for drop in state:
                rest = [v for v in state if v != drop]
                candidates = set()
                for v in rest:
                    candidates.update(self.hood(v).neighbors)
                for c in candidates - members:
                    if self._connected_with(rest, c):
                        found.add(make_state(rest + [c]))
            result = tuple(sorted(found))
        self._enumerated[state] = result
        return result

    def state_degree(self, state: SubgraphState) -> int:
        if self.d == 1:
            return self.hood(state[0]).degree
        if self.d == 2:
            return self.hood(state[0]).degree + self.hood(state[1]).degree - 2
        return len(self.neighbors_of(state))

    def random_neighbor(self, state: SubgraphState) -> SubgraphState:
        """G^(d) 中 state 的均匀随机邻居。"""

        if self.d == 1:
            hood = self.hood(state[0])
            if hood.degree == 0:
                raise DegenerateWalkError(f"节点 {state[0]} 没有邻居")
            return (hood.neighbors[self.below(hood.degree)],)
        if self.d == 2:
            return self._edge_neighbor(state)
        options = self.neighbors_of(state)
        if not options:
            raise DegenerateWalkError(f"状态 {state} 在 G^({self.d}) 中没有邻居")
        return options[self.below(len(options))]

    def _edge_neighbor(self, state: SubgraphState) -> SubgraphState:
        u, v = state
        hu, hv = self.hood(u), self.hood(v)
        total = hu.degree + hv.degree
        if total - 2 <= 0:
            raise DegenerateWalkError(f"边状态 {state} 在 G^(2) 中没有邻居")
        while True:
            # 以 d_u/(d_u+d_v) 选端点，再在其邻居中均匀选 w；w 落在另一端点时整体重来
            r = self.below(total)
            if r < hu.degree:
                anchor, other, w = u, v, hu.neighbors[r]
            else:
                anchor, other, w = v, u, hv.neighbors[r - hu.degree]
            if w != other:
                return (anchor, w) if anchor < w else (w, anchor)
            self.rejections += 1

    def non_backtracking_neighbor(self, state: SubgraphState, previous: Optional[SubgraphState]) -> SubgraphState:
        if previous is None:
            return self.random_neighbor(state)
        degree = self.state_degree(state)
        if degree == 0:
            raise DegenerateWalkError(f"状态 {state} 在 G^({self.d}) 中没有邻居")
        if degree == 1:
            return previous
        if self.d == 1:
            row = self.hood(state[0]).neighbors
            skip = row.index(previous[0])
            pick = self.below(degree - 1)
            return (row[pick if pick < skip else pick + 1],)
        if self.d == 2:
            while True:
                candidate = self._edge_neighbor(state)
                if candidate != previous:
                    return candidate
        options = [s for s in self.neighbors_of(state) if s != previous]
        return options[self.below(len(options))]

    def _grow_state(self, start: int) -> SubgraphState:
        nodes = [start]
        while len(nodes) < self.d:
            frontier = set()
            for v in nodes:
                frontier.update(self.hood(v).neighbors)
            options = sorted(frontier - set(nodes))
            if not options:
                raise DegenerateWalkError(f"无法从节点 {start} 扩展出 {self.d} 节点连通子图")
            nodes.append(options[self.below(len(options))])
        return make_state(nodes)

    def _check_adjacent(self, a: SubgraphState, b: SubgraphState) -> None:
        if len(a) != self.d or len(b) != self.d:
            raise ValueError(f"状态必须恰好包含 {self.d} 个节点：{a}, {b}")
        if b not in self.neighbors_of(a):
            raise ValueError(f"{a} 与 {b} 在 G^({self.d}) 中不相邻")

    def build_window(self, states: Sequence[SubgraphState], prev_state: Optional[SubgraphState] = None) -> WalkWindow:
        """从头计算窗口的节点并集、诱导边与各状态的度。"""

        states = tuple(make_state(s) for s in states)
        if len(states) != self.window_length:
            raise ValueError(f"窗口需要 {self.window_length} 个状态，收到 {len(states)}")
        for a, b in zip(states, states[1:]):
            self._check_adjacent(a, b)
        union = frozenset(v for s in states for v in s)
        ordered = sorted(union)
        edges = set()
        searches = 0
        for i, a in enumerate(ordered):
            row = self.hood(a).neighbors
            for b in ordered[i + 1 :]:
                searches += 1
                if sorted_contains(row, b):
                    edges.add((a, b))
        degrees = tuple(self.state_degree(s) for s in states)
        window = WalkWindow(self.k, self.d, states, degrees, union, frozenset(edges), prev_state, searches)
        self.window = window
        return window

    def init_walk(
        self,
        start: Optional[int] = None,
        *,
        forced: Optional[Sequence[Sequence[int]]] = None,
        burn_in: int = 0,
    ) -> WalkWindow:
        """走 l 步得到初始窗口；forced 给定时直接使用指定的状态序列。"""

        if self.oracle.node_count < self.k:
            raise ConfigError(f"图只有 {self.oracle.node_count} 个节点，少于 k={self.k}")
        if forced is not None:
            return self.build_window([make_state(s) for s in forced])
        origin = self.below(self.oracle.node_count) if start is None else start
        states = [self._grow_state(origin)]
        while len(states) < self.window_length:
            previous = states[-2] if len(states) >= 2 else None
            states.append(self._choose_next(states[-1], previous))
        window = self.build_window(states)
        for _ in range(burn_in):
            window = self.step(window)
        logger.debug("walk initialised: d=%d k=%d start=%s burn_in=%d", self.d, self.k, origin, burn_in)
        return window

    def _choose_next(self, current: SubgraphState, previous: Optional[SubgraphState]) -> SubgraphState:
        if self.mode == "nb":
            return self.non_backtracking_neighbor(current, previous)
        return self.random_neighbor(current)

    def step(self, window: Optional[WalkWindow] = None) -> WalkWindow:
        window = window or self.window
        if window is None:
            raise RuntimeError("请先调用 init_walk")
        previous = window.states[-2] if len(window.states) >= 2 else window.prev_state
        return self.step_to(window, self._choose_next(window.states[-1], previous))

    def step_to(self, window: WalkWindow, new_state: SubgraphState) -> WalkWindow:
        """把 new_state 追加到窗口末尾、丢弃 X_1，并增量维护诱导边。"""

        new_state = make_state(new_state)
        states = window.states[1:] + (new_state,)
        union = frozenset(v for s in states for v in s)
        removed = window.union_nodes - union
        edges = {e for e in window.induced_edges if e[0] not in removed and e[1] not in removed}
        searches = 0
        for incoming in union - window.union_nodes:
            row = self.hood(incoming).neighbors
            for u in union:
                if u == incoming:
                    continue
                searches += 1
                if sorted_contains(row, u):
                    edges.add((u, incoming) if u < incoming else (incoming, u))
        degrees = window.degrees[1:] + (self.state_degree(new_state),)
        result = WalkWindow(self.k, self.d, states, degrees, union, frozenset(edges), window.states[0], searches)
        self._prune(result)
        self.window = result
        return result


def init_walk(
    oracle: NeighborOracle,
    d: int,
    k: int,
    seed: Optional[int] = 0,
    start: Optional[int] = None,
    *,
    mode: WalkMode = "simple",
    forced: Optional[Sequence[Sequence[int]]] = None,
    burn_in: int = 0,
) -> Tuple[Walker, WalkWindow]:
    walker = Walker(oracle, d, k, mode=mode, seed=seed)
    return walker, walker.init_walk(start, forced=forced, burn_in=burn_in)


__all__ = [
    "SubgraphState",
    "WalkMode",
    "WalkWindow",
    "Walker",
    "init_walk",
    "make_state",
    "nominal_degree",
    "pi_tilde",
    "window_weight",
]
