"""估计结果的模型与 JSON/CSV 序列化，字段说明见 docs/report_schema.md。"""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import IO, Iterable, List, Optional, Sequence, Union

from pydantic import BaseModel, Field

from .baselines import BaselineReport
from .catalog import alpha_table, enumerate_classes
from .errors import ConfigError
from .oracle import ExactCounts

ESTIMATE_CSV_HEADER = (
    "graph",
    "k",
    "d",
    "method",
    "walk",
    "steps",
    "seed",
    "class",
    "name",
    "alpha",
    "accumulator",
    "concentration",
    "count",
)
EXACT_CSV_HEADER = ("k", "class", "name", "count", "concentration")
BASELINE_CSV_HEADER = ("method", "k", "samples", "seed", "class", "name", "count", "concentration")


class TracePoint(BaseModel):
    """单次运行中某个检查点处的归一化浓度。"""

    steps: int = Field(ge=1, description="截至该检查点已走的步数")
    concentration: List[Optional[float]] = Field(description="该检查点的浓度向量")


class EstimateReport(BaseModel):
    """一次（或合并后的多次）游走估计的结果。"""

    graph: str = Field(default="", description="图的名称或路径，仅用于展示")
    k: int
    d: int
    method: str = Field(description="实际使用的估计方法 base/css")
    walk: str = Field(description="游走方式 simple/nb")
    steps: int = Field(ge=0, description="游走步数预算 n（合并报告为各链之和）")
    seed: int
    run_index: int = Field(default=0, ge=0, description="派生种子用的链编号")
    burn_in: int = Field(default=0, ge=0)
    chains: int = Field(default=1, ge=1, description="合并的独立链数量")
    valid_windows: int = Field(ge=0, description="覆盖恰好 k 个节点的窗口数")
    api_calls: int = Field(ge=0, description="本次运行发出的邻居查询次数")
    cached_hits: int = Field(default=0, ge=0, description="由缓存应答的邻居查询次数")
    accumulators: List[float] = Field(description="各类别的加权累加值 Ĉ^k_i")
    concentration: List[Optional[float]] = Field(description="归一化浓度，不可估计或退化时为 null")
    counts: Optional[List[Optional[float]]] = Field(default=None, description="已知 |R^(d)| 时的绝对数量估计")
    not_estimable: List[int] = Field(default_factory=list, description="α = 0 的类别编号")
    degenerate: bool = Field(default=False, description="没有任何有效窗口时为 true")
    notes: List[str] = Field(default_factory=list)
    trace: List[TracePoint] = Field(default_factory=list)


def report_to_json(report: BaseModel) -> str:
    return report.model_dump_json(indent=2)


def _fmt(value: Optional[float]) -> str:
    return "" if value is None else repr(float(value))


def estimate_rows(report: EstimateReport) -> List[List[str]]:
    alpha = alpha_table(report.k, report.d).alpha
    rows = []
    for graphlet in enumerate_classes(report.k):
        i = graphlet.index - 1
        count = report.counts[i] if report.counts is not None else None
        rows.append(
            [
                report.graph,
                str(report.k),
                str(report.d),
                report.method,
                report.walk,
                str(report.steps),
                str(report.seed),
                str(graphlet.index),
                graphlet.name,
                str(alpha[i]),
                _fmt(report.accumulators[i]),
                _fmt(report.concentration[i]),
                _fmt(count),
            ]
        )
    return rows


def exact_rows(exact: ExactCounts) -> List[List[str]]:
    return [
        [str(exact.k), str(g.index), g.name, str(exact.counts[g.index - 1]), _fmt(exact.concentration[g.index - 1])]
        for g in enumerate_classes(exact.k)
    ]


def baseline_rows(report: BaselineReport) -> List[List[str]]:
    rows = []
    for g in enumerate_classes(report.k):
        i = g.index - 1
        count = report.counts[i] if report.counts is not None else None
        rows.append(
            [report.method, str(report.k), str(report.samples), str(report.seed), str(g.index), g.name, _fmt(count), _fmt(report.concentration[i])]
        )
    return rows


def write_csv(target: IO[str], header: Sequence[str], rows: Iterable[Sequence[str]]) -> None:
    writer = csv.writer(target, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)


def render_csv(model: Union[EstimateReport, ExactCounts, BaselineReport]) -> str:
    """按模型类型选择表头，返回完整 CSV 文本。"""

    buffer = io.StringIO()
    if isinstance(model, EstimateReport):
        write_csv(buffer, ESTIMATE_CSV_HEADER, estimate_rows(model))
    elif isinstance(model, ExactCounts):
        write_csv(buffer, EXACT_CSV_HEADER, exact_rows(model))
    else:
        write_csv(buffer, BASELINE_CSV_HEADER, baseline_rows(model))
    return buffer.getvalue()


def load_concentration(path: Union[str, Path]) -> List[float]:
    """读取任一报告 JSON 中的 concentration 向量，null 视为 0。"""

    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    values = payload.get("concentration") if isinstance(payload, dict) else None
    if not isinstance(values, list):
        raise ConfigError(f"{path} 中没有 concentration 数组")
    return [0.0 if v is None else float(v) for v in values]


def load_exact_counts(path: Union[str, Path]) -> ExactCounts:
    """读取 `exact` 子命令写出的真值文件。"""

    try:
        return ExactCounts.model_validate_json(Path(path).read_text(encoding="utf-8"))
    except ValueError as exc:
        raise ConfigError(f"真值文件 {path} 与 ExactCounts 格式不符：{exc}") from exc


__all__ = [
    "BASELINE_CSV_HEADER",
    "ESTIMATE_CSV_HEADER",
    "EXACT_CSV_HEADER",
    "EstimateReport",
    "TracePoint",
    "baseline_rows",
    "estimate_rows",
    "exact_rows",
    "load_concentration",
    "load_exact_counts",
    "render_csv",
    "report_to_json",
    "write_csv",
]
