"""图元浓度估计器：基础估计（按 α·π̃ 加权）与对应状态采样 CSS（按 p̃ 加权）。

累加器只使用 π̃ 权重，浓度归一化时 2|R^(d)| 被约掉；
需要绝对数量时再由 estimate_counts 乘回 2|R^(d)|/n。
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Callable, List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .access import NeighborOracle
from .catalog import AlphaTable, alpha_table, check_walk_config, classify_mask, corresponding_templates
from .errors import ConfigError
from .graph import Graph, r2_size
from .oracle import build_relationship_graph
from .report import EstimateReport, TracePoint
from .settings import get_settings
from .walk import SubgraphState, Walker, WalkMode, WalkWindow, nominal_degree, pi_tilde, window_weight

logger = logging.getLogger(__name__)

_MASK64 = (1 << 64) - 1
_WALK_ALIASES = {"simple": "simple", "srw": "simple", "nb": "nb", "nbsrw": "nb", "nb-srw": "nb"}


def splitmix64(value: int) -> int:
    """SplitMix64 的一次输出，用于把 (seed, run) 打散成互不相关的 64 位种子。"""

    z = (value + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, run_index: int) -> int:
    """第 run_index 条链的种子：splitmix64(seed XOR run_index)。"""

    return splitmix64((seed ^ run_index) & _MASK64)


class EstimatorConfig(BaseModel):
    """一次估计的全部输入：图元大小 k、游走层级 d、步数预算等。"""

    model_config = ConfigDict(frozen=True)

    k: int = Field(ge=3, le=5, description="图元节点数")
    d: int = Field(ge=1, description="在 G^(d) 上游走")
    steps: int = Field(gt=0, description="游走步数 n（包含无效窗口）")
    method: Literal["base", "css"] = Field(default="base", description="基础估计或 CSS 估计")
    walk: WalkMode = Field(default="simple", description="simple 或 nb（非回溯）")
    seed: int = Field(default=0, ge=0)
    burn_in: int = Field(default=0, ge=0, description="开始计数前丢弃的步数")
    start: Optional[int] = Field(default=None, ge=0, description="起始节点编号，缺省时均匀随机")
    checkpoints: Tuple[int, ...] = Field(default=(), description="记录中途浓度的步数，严格递增")

    @field_validator("walk", mode="before")
    @classmethod
    def normalize_walk(cls, value: str) -> str:
        key = str(value).strip().lower()
        if key not in _WALK_ALIASES:
            raise ValueError(f"未知的游走方式：{value}")
        return _WALK_ALIASES[key]

    @model_validator(mode="after")
    def check_admissible(self) -> "EstimatorConfig":
        check_walk_config(self.k, self.d)
        previous = 0
        for point in self.checkpoints:
            if not previous < point <= self.steps:
                raise ValueError("checkpoints 必须严格递增且不超过 steps")
            previous = point
        return self

    @property
    def window_length(self) -> int:
        return self.k - self.d + 1

    @property
    def effective_method(self) -> str:
        """l = 2 时各对应状态的抽样概率相同，CSS 与基础估计一致。"""

        return "base" if self.window_length == 2 else self.method


DegreeOf = Callable[[SubgraphState], int]


def css_probability(
    window: WalkWindow,
    degree_of: DegreeOf,
    mode: WalkMode = "simple",
    *,
    exact: bool = False,
    mask: Optional[int] = None,
):
    """p̃(X^(l)) = Σ_{X' ∈ C(s)} π̃_e(X')，s 为窗口节点的诱导子图。

    对应状态的组合模板按诱导边模式缓存，每个窗口只需代入各内部状态的度。
    """

    if not window.valid:
        raise ValueError("只有覆盖 k 个节点的窗口才有对应状态")
    nodes = window.sorted_nodes
    mask = window.position_mask() if mask is None else mask
    templates = corresponding_templates(window.k, window.d, mask)
    length = window.k - window.d + 1
    if length <= 2:
        return Fraction(len(templates)) if exact else float(len(templates))
    degree_cache = {}

    def inner_degree(positions: Tuple[int, ...]) -> int:
        value = degree_cache.get(positions)
        if value is None:
            value = degree_of(tuple(nodes[p] for p in positions))
            if mode == "nb":
                value = nominal_degree(value)
            degree_cache[positions] = value
        return value

    terms = [window_weight([1, *(inner_degree(ps) for ps in template[1:-1]), 1], exact=exact) for template in templates]
    return sum(terms, Fraction(0)) if exact else math.fsum(terms)


def _normalize(accumulators: Sequence[float], table: AlphaTable) -> Tuple[List[Optional[float]], bool]:
    total = math.fsum(accumulators[i - 1] for i in table.estimable)
    if total <= 0:
        return [None] * len(accumulators), True
    return [accumulators[i] / total if table.alpha[i] > 0 else None for i in range(len(accumulators))], False


def run_estimate(
    cfg: EstimatorConfig,
    oracle: NeighborOracle,
    *,
    graph_name: str = "",
    run_index: int = 0,
) -> EstimateReport:
    """走 n 步，每步检查当前窗口：覆盖恰好 k 个节点时分类，并把 1/权重累加到对应类别。"""

    table = alpha_table(cfg.k, cfg.d)
    if oracle.node_count < cfg.k:
        raise ConfigError(f"图只有 {oracle.node_count} 个节点，少于 k={cfg.k}")
    method = cfg.effective_method
    notes: List[str] = []
    if method != cfg.method:
        notes.append("l = 2: css reduces to base")
        logger.warning("css requested with l = 2 (k=%d, d=%d); using base weights", cfg.k, cfg.d)
    walker = Walker(oracle, cfg.d, cfg.k, mode=cfg.walk, seed=derive_seed(cfg.seed, run_index))
    window = walker.init_walk(cfg.start, burn_in=cfg.burn_in)
    classes = np.zeros(cfg.steps, dtype=np.int8)
    weights = np.zeros(cfg.steps, dtype=np.float64)
    alpha = table.alpha
    valid = 0
    for t in range(cfg.steps):
        if window.valid:
            valid += 1
            mask = window.position_mask()
            index = classify_mask(cfg.k, mask)
            if index is not None and alpha[index - 1] > 0:
                if method == "css":
                    weight = css_probability(window, walker.state_degree, cfg.walk, mask=mask)
                else:
                    weight = alpha[index - 1] * pi_tilde(window, cfg.walk)
                classes[t] = index
                weights[t] = 1.0 / weight
        if t + 1 < cfg.steps:
            window = walker.step(window)

    def accumulate(upto: int) -> List[float]:
        head_classes, head_weights = classes[:upto], weights[:upto]
        return [math.fsum(head_weights[head_classes == i].tolist()) for i in range(1, len(alpha) + 1)]

    accumulators = accumulate(cfg.steps)
    concentration, degenerate = _normalize(accumulators, table)
    trace = [TracePoint(steps=c, concentration=_normalize(accumulate(c), table)[0]) for c in cfg.checkpoints]
    if degenerate:
        logger.warning("no valid window in %d steps (k=%d, d=%d)", cfg.steps, cfg.k, cfg.d)
    logger.info(
        "estimate done: k=%d d=%d method=%s walk=%s steps=%d valid=%d api_calls=%d",
        cfg.k,
        cfg.d,
        method,
        cfg.walk,
        cfg.steps,
        valid,
        walker.api_calls,
    )
    return EstimateReport(
        graph=graph_name,
        k=cfg.k,
        d=cfg.d,
        method=method,
        walk=cfg.walk,
        steps=cfg.steps,
        seed=cfg.seed,
        run_index=run_index,
        burn_in=cfg.burn_in,
        valid_windows=valid,
        api_calls=walker.api_calls,
        cached_hits=walker.cached_hits,
        accumulators=accumulators,
        concentration=concentration,
        not_estimable=list(table.not_estimable),
        degenerate=degenerate,
        notes=notes,
        trace=trace,
    )


def estimate_counts(report: EstimateReport, r_d: int) -> List[Optional[float]]:
    """Ĉ^k_i = (2·|R^(d)| / n) × 累加值；α = 0 的类别为 None。"""

    if r_d <= 0:
        raise ConfigError(f"|R^(d)| 必须为正，收到 {r_d}")
    scale = 2.0 * r_d / report.steps
    skip = set(report.not_estimable)
    return [None if i in skip else acc * scale for i, acc in enumerate(report.accumulators, start=1)]


def estimate_relationship_size(graph: Graph, d: int) -> int:
    """|R^(d)|：d=1 为 |E|，d=2 用闭式，d>2 只能在小图上显式构造 G^(d)。"""

    if d == 1:
        return graph.edge_count
    if d == 2:
        return r2_size(graph)
    return build_relationship_graph(graph, d).edge_count


def with_counts(report: EstimateReport, r_d: int) -> EstimateReport:
    return report.model_copy(update={"counts": estimate_counts(report, r_d)})


def run_parallel(
    cfg: EstimatorConfig,
    oracle: NeighborOracle,
    chains: int,
    *,
    threads: Optional[int] = None,
    graph_name: str = "",
) -> List[EstimateReport]:
    """运行 chains 条独立链；第 i 条链使用 derive_seed(cfg.seed, i)，结果按链编号排列。"""

    if chains < 1:
        raise ConfigError("chains 至少为 1")
    workers = max(1, min(threads or get_settings().threads, chains))
    logger.debug("running %d chains on %d workers", chains, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda i: run_estimate(cfg, oracle, graph_name=graph_name, run_index=i), range(chains)))


def combine_reports(reports: Sequence[EstimateReport]) -> EstimateReport:
    """合并独立链：累加值与步数相加，浓度重新归一化。"""

    if not reports:
        raise ValueError("至少需要一个报告")
    first = reports[0]
    for other in reports[1:]:
        if (other.k, other.d, other.method, other.walk) != (first.k, first.d, first.method, first.walk):
            raise ConfigError("只能合并 k、d、方法与游走方式都相同的报告")
    table = alpha_table(first.k, first.d)
    accumulators = [math.fsum(values) for values in zip(*(r.accumulators for r in reports))]
    concentration, degenerate = _normalize(accumulators, table)
    notes = sorted({note for r in reports for note in r.notes})
    return first.model_copy(
        update={
            "steps": sum(r.steps for r in reports),
            "chains": sum(r.chains for r in reports),
            "valid_windows": sum(r.valid_windows for r in reports),
            "api_calls": sum(r.api_calls for r in reports),
            "cached_hits": sum(r.cached_hits for r in reports),
            "accumulators": accumulators,
            "concentration": concentration,
            "counts": None,
            "degenerate": degenerate,
            "notes": notes,
            "trace": [],
        }
    )


def clustering_coefficient(concentration: Sequence[Optional[float]]) -> float:
    """全局聚类系数 3C_2/(C_1 + 3C_2) = 3c_2/(2c_2 + 1)，输入为 3 节点浓度向量。"""

    if len(concentration) != 2 or concentration[1] is None:
        raise ValueError("需要 k=3 的浓度向量")
    c2 = float(concentration[1])
    return 3.0 * c2 / (2.0 * c2 + 1.0)


def triangle_concentration_from_clustering(coefficient: float) -> float:
    if not 0.0 <= coefficient <= 1.0:
        raise ValueError("聚类系数应在 [0, 1] 内")
    return coefficient / (3.0 - 2.0 * coefficient)


__all__ = [
    "EstimatorConfig",
    "clustering_coefficient",
    "combine_reports",
    "css_probability",
    "derive_seed",
    "estimate_counts",
    "estimate_relationship_size",
    "run_estimate",
    "run_parallel",
    "splitmix64",
    "triangle_concentration_from_clustering",
    "with_counts",
]
