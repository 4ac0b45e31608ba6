"""对照采样器：全图访问的楔形采样与 3-path 采样，以及受限访问下的 MH 楔形采样。"""
from __future__ import annotations

import logging
import math
import time
from typing import List, Literal, NamedTuple, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .access import Neighborhood, NeighborOracle
from .catalog import classify_mask, edge_mask
from .errors import ConfigError, DegenerateWalkError
from .graph import Graph, sorted_contains

logger = logging.getLogger(__name__)

Acceptance = Literal["degree_minus_one", "binomial_ratio"]

PATH3_BETA = (1, 0, 4, 2, 6, 12)
START_PROBE_FACTOR = 32


class BaselineConfig(BaseModel):
    """CLI 与 bench 使用的对照方法配置。"""

    model_config = ConfigDict(frozen=True)

    method: Literal["wedge", "path3", "mhrw-wedge"]
    samples: int = Field(gt=0, description="样本数或 MH 步数")
    seed: int = Field(default=0, ge=0)
    acceptance: Acceptance = Field(default="degree_minus_one", description="mhrw-wedge 的接受规则")

    @property
    def k(self) -> int:
        return 4 if self.method == "path3" else 3


class BaselineReport(BaseModel):
    method: str
    k: int
    samples: int = Field(ge=0)
    seed: int = 0
    counts: Optional[List[Optional[float]]] = Field(default=None, description="绝对数量估计，仅全图方法给出")
    concentration: List[Optional[float]]
    api_calls: int = Field(default=0, ge=0, description="采样阶段的邻居查询次数")
    setup_calls: int = Field(default=0, ge=0, description="挑选起点时发往后端的探测查询次数")
    cached_hits: int = Field(default=0, ge=0, description="由 NeighborOracle 缓存应答的查询次数")
    preprocess_time: float = Field(default=0.0, ge=0.0, description="预处理耗时（秒）")
    sample_time: float = Field(default=0.0, ge=0.0, description="采样耗时（秒）")
    not_estimable: List[int] = Field(default_factory=list)


def _pick_pair(rng: np.random.Generator, degree: int) -> Tuple[int, int]:
    i = int(rng.integers(degree))
    j = int(rng.integers(degree - 1))
    return i, j + (j >= i)


def wedge_sampling(g: Graph, n: int, seed: int = 0) -> BaselineReport:
    """按 p_v ∝ C(d_v, 2) 选中心点，再均匀取一对邻居检查是否闭合。"""

    if n <= 0:
        raise ConfigError("样本数必须为正")
    began = time.perf_counter()
    degrees = g.degrees.astype(np.float64)
    wedges = degrees * (degrees - 1.0) / 2.0
    total = float(wedges.sum())
    if total <= 0:
        raise ConfigError("图中最大度不超过 1，没有楔形可采")
    prepared = time.perf_counter()
    rng = np.random.default_rng(seed)
    centres = rng.choice(g.node_count, size=n, p=wedges / total)
    closed = 0
    for v in centres.tolist():
        row = g.neighbors(v)
        i, j = _pick_pair(rng, len(row))
        if g.has_edge(row[i], row[j]):
            closed += 1
    finished = time.perf_counter()
    kappa = closed / n
    c2 = kappa * total / 3.0
    c1 = (1.0 - kappa) * total
    return BaselineReport(
        method="wedge",
        k=3,
        samples=n,
        seed=seed,
        counts=[c1, c2],
        concentration=_normalize([c1, c2]),
        preprocess_time=prepared - began,
        sample_time=finished - prepared,
    )


def path3_sampling(g: Graph, n: int, seed: int = 0) -> BaselineReport:
    """按 τ_e = (d_u-1)(d_v-1) 选中心边并延伸成 3-path，对诱导 4 节点子图按 S/β_i 加权。

    u' = v' 的样本不计入任何类别但仍计入 n；3-star 不含 3-path，无法估计。
    """

    if n <= 0:
        raise ConfigError("样本数必须为正")
    began = time.perf_counter()
    edges = g.edge_array()
    degrees = g.degrees
    tau = ((degrees[edges[:, 0]] - 1) * (degrees[edges[:, 1]] - 1)).astype(np.float64) if len(edges) else np.zeros(0)
    total = float(tau.sum())
    if total <= 0:
        raise ConfigError("Σ τ_e = 0：图中没有 3-path")
    prepared = time.perf_counter()
    rng = np.random.default_rng(seed)
    picks = rng.choice(len(edges), size=n, p=tau / total)
    sums = [0.0] * len(PATH3_BETA)
    for e in picks.tolist():
        u, v = (int(x) for x in edges[e])
        u_row = [x for x in g.neighbors(u) if x != v]
        v_row = [x for x in g.neighbors(v) if x != u]
        u2 = u_row[int(rng.integers(len(u_row)))]
        v2 = v_row[int(rng.integers(len(v_row)))]
        if u2 == v2:
            continue
        nodes = (u2, u, v, v2)
        mask = edge_mask(4, ((i, j) for i in range(4) for j in range(i + 1, 4) if g.has_edge(nodes[i], nodes[j])))
        index = classify_mask(4, mask)
        sums[index - 1] += total / PATH3_BETA[index - 1]
    finished = time.perf_counter()
    counts: List[Optional[float]] = [None if beta == 0 else s / n for s, beta in zip(sums, PATH3_BETA)]
    return BaselineReport(
        method="path3",
        k=4,
        samples=n,
        seed=seed,
        counts=counts,
        concentration=_normalize(counts),
        preprocess_time=prepared - began,
        sample_time=finished - prepared,
        not_estimable=[i for i, beta in enumerate(PATH3_BETA, start=1) if beta == 0],
    )


def _normalize(counts: List[Optional[float]]) -> List[Optional[float]]:
    total = math.fsum(c for c in counts if c is not None)
    if total <= 0:
        return [None] * len(counts)
    return [None if c is None else c / total for c in counts]


def acceptance_probability(d_v: int, d_w: int, rule: Acceptance = "degree_minus_one") -> float:
    """从 v 提议到 w 时的接受概率；d_w < 2 的节点永远不被接受。"""

    if d_w < 2:
        return 0.0
    if rule == "degree_minus_one":
        ratio = (d_w - 1) / (d_v - 1)
    elif rule == "binomial_ratio":
        ratio = d_w * (d_w - 1) / (d_v * (d_v - 1))
    else:
        raise ConfigError(f"未知的接受规则：{rule}")
    return min(1.0, ratio)


class _CallTally:
    """区分真正发往后端的查询与 NeighborOracle 缓存应答的查询。"""

    def __init__(self, oracle: NeighborOracle) -> None:
        self.oracle = oracle
        self.calls = 0
        self.cached_hits = 0

    def fetch(self, v: int) -> Neighborhood:
        hood = self.oracle.fetch_neighbors(v)
        if hood.from_cache:
            self.cached_hits += 1
        else:
            self.calls += 1
        return hood


def _draw_start(tally: _CallTally, rng: np.random.Generator) -> int:
    """均匀抽取起点，度小于 2 时重抽。"""

    size = tally.oracle.node_count
    limit = START_PROBE_FACTOR * max(size, 1)
    for _ in range(limit):
        v = int(rng.integers(size))
        if tally.fetch(v).degree >= 2:
            return v
    raise DegenerateWalkError(f"{limit} 次探测都没有找到度 ≥ 2 的起点")


def mhrw_node_sequence(
    oracle: NeighborOracle,
    n: int,
    seed: int = 0,
    *,
    acceptance: Acceptance = "degree_minus_one",
    start: Optional[int] = None,
) -> np.ndarray:
    """只返回 MH 游走访问的节点序列，供平稳分布检验使用。"""

    return _mhrw(oracle, n, seed, acceptance, start).visits


class _MhrwRun(NamedTuple):
    visits: np.ndarray
    open_count: int
    closed_count: int
    sampling: _CallTally
    setup: _CallTally


def _mhrw(
    oracle: NeighborOracle,
    n: int,
    seed: int,
    acceptance: Acceptance,
    start: Optional[int],
) -> _MhrwRun:
    if n <= 0:
        raise ConfigError("步数必须为正")
    if acceptance == "binomial_ratio":
        logger.warning("acceptance rule binomial_ratio does not leave C(d_v, 2) invariant under uniform proposals")
    rng = np.random.default_rng(seed)
    setup = _CallTally(oracle)
    if start is None:
        current = _draw_start(setup, rng)
    else:
        current = start
        if setup.fetch(start).degree < 2:
            raise DegenerateWalkError(f"起点 {start} 的度小于 2")
    sampling = _CallTally(oracle)
    visits = np.empty(n, dtype=np.int64)
    open_count = closed_count = 0
    for t in range(n):
        visits[t] = current
        # 每步恰好三次查询：当前节点、楔形一端（闭合检查）、提议节点
        hood = sampling.fetch(current)
        i, j = _pick_pair(rng, hood.degree)
        a, b = hood.neighbors[i], hood.neighbors[j]
        if sorted_contains(sampling.fetch(a).neighbors, b):
            closed_count += 1
        else:
            open_count += 1
        w = hood.neighbors[int(rng.integers(hood.degree))]
        d_w = sampling.fetch(w).degree
        if rng.random() < acceptance_probability(hood.degree, d_w, acceptance):
            current = w
    return _MhrwRun(visits, open_count, closed_count, sampling, setup)


def mhrw_wedge_sampling(
    oracle: NeighborOracle,
    n: int,
    seed: int = 0,
    *,
    acceptance: Acceptance = "degree_minus_one",
    start: Optional[int] = None,
) -> BaselineReport:
    """受限访问的楔形采样：MH 游走目标 π(v) ∝ C(d_v, 2)，每步查询 3 次邻居表。

    api_calls 只计真正发往后端的查询：未开启缓存时恰为 3n，开启缓存时与采样阶段的缓存命中合计为 3n。
    """

    began = time.perf_counter()
    run = _mhrw(oracle, n, seed, acceptance, start)
    finished = time.perf_counter()
    open_count, closed_count = run.open_count, run.closed_count
    calls = run.sampling.calls
    denominator = 3.0 * open_count + closed_count
    concentration: List[Optional[float]]
    if denominator > 0:
        concentration = [3.0 * open_count / denominator, closed_count / denominator]
    else:
        concentration = [None, None]
    logger.info("mhrw wedge: %d steps, %d closed, %d open, %d calls", n, closed_count, open_count, calls)
    return BaselineReport(
        method="mhrw-wedge",
        k=3,
        samples=n,
        seed=seed,
        concentration=concentration,
        api_calls=calls,
        setup_calls=run.setup.calls,
        cached_hits=run.sampling.cached_hits + run.setup.cached_hits,
        sample_time=finished - began,
    )


def mhrw_transition_matrix(g: Graph, acceptance: Acceptance = "degree_minus_one") -> np.ndarray:
    """显式转移矩阵；度小于 2 的节点不在支撑集上，其行取单位行。"""

    size = g.node_count
    matrix = np.zeros((size, size), dtype=np.float64)
    for v in range(size):
        d_v = g.degree(v)
        if d_v < 2:
            matrix[v, v] = 1.0
            continue
        for w in g.neighbors(v):
            matrix[v, w] = acceptance_probability(d_v, g.degree(w), acceptance) / d_v
        matrix[v, v] = 1.0 - matrix[v].sum()
    return matrix


def wedge_target(g: Graph) -> np.ndarray:
    """π(v) = C(d_v, 2) / Σ_u C(d_u, 2)。"""

    degrees = g.degrees.astype(np.float64)
    wedges = degrees * (degrees - 1.0) / 2.0
    return wedges / wedges.sum()


def run_baseline(cfg: BaselineConfig, graph: Graph, oracle: Optional[NeighborOracle] = None) -> BaselineReport:
    if cfg.method == "wedge":
        return wedge_sampling(graph, cfg.samples, cfg.seed)
    if cfg.method == "path3":
        return path3_sampling(graph, cfg.samples, cfg.seed)
    return mhrw_wedge_sampling(oracle or NeighborOracle(graph), cfg.samples, cfg.seed, acceptance=cfg.acceptance)


__all__ = [
    "BaselineConfig",
    "BaselineReport",
    "PATH3_BETA",
    "acceptance_probability",
    "mhrw_node_sequence",
    "mhrw_transition_matrix",
    "mhrw_wedge_sampling",
    "path3_sampling",
    "run_baseline",
    "wedge_sampling",
    "wedge_target",
]
