"""评估流程：对 (方法, 步数) 网格的每个单元运行多条独立链，输出 NRMSE 表与绘图数据。

结果按 (方法, 步数, 链编号) 的顺序归约，与线程完成顺序无关；
墙钟时间单独写入 timings.csv，results.csv 只依赖规格与种子。
"""
from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Literal, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .access import NeighborOracle
from .baselines import BaselineConfig, run_baseline
from .catalog import check_walk_config, enumerate_classes
from .errors import ConfigError
from .estimate import EstimatorConfig, derive_seed, run_estimate
from .graph import Graph, largest_connected_component, load_edge_list
from .metrics import error_decomposition, standard_error
from .oracle import ExactCounts, exact_enumerate
from .report import load_exact_counts, write_csv
from .settings import AppSettings, get_settings

logger = logging.getLogger(__name__)

BENCH_CSV_HEADER = (
    "method",
    "k",
    "d",
    "walk",
    "steps",
    "runs",
    "class",
    "name",
    "truth",
    "mean",
    "se",
    "nrmse",
    "bias2",
    "variance",
    "api_calls",
)
TIMINGS_CSV_HEADER = ("method", "steps", "runs", "wall_time_mean")

_BASELINE_K = {"wedge": 3, "mhrw-wedge": 3, "path3": 4}


class MethodSpec(BaseModel):
    """网格中的一个方法：G^(d) 游走估计，或某个对照采样器。"""

    model_config = ConfigDict(frozen=True)

    d: Optional[int] = Field(default=None, ge=1, description="游走层级，对照方法留空")
    method: Literal["base", "css"] = "base"
    walk: Literal["simple", "nb"] = "simple"
    baseline: Optional[Literal["wedge", "path3", "mhrw-wedge"]] = None
    acceptance: Literal["degree_minus_one", "binomial_ratio"] = "degree_minus_one"

    @field_validator("walk", mode="before")
    @classmethod
    def normalize_walk(cls, value: str) -> str:
        return {"srw": "simple", "nbsrw": "nb"}.get(str(value).lower(), str(value).lower())

    @model_validator(mode="after")
    def check_kind(self) -> "MethodSpec":
        if (self.d is None) == (self.baseline is None):
            raise ValueError("d 与 baseline 必须恰好给出一个")
        return self

    @property
    def label(self) -> str:
        """SRW2CSS、SRW1CSSNB 这类简写；对照方法用大写名称。"""

        if self.baseline is not None:
            return self.baseline.upper()
        return f"SRW{self.d}{'CSS' if self.method == 'css' else ''}{'NB' if self.walk == 'nb' else ''}"


class BenchSpec(BaseModel):
    """一次评估的完整规格，可由 `bench --spec` 读取的 JSON 构造。"""

    graph: str = Field(description="边表文件路径")
    k: int = Field(ge=3, le=5)
    methods: List[MethodSpec] = Field(min_length=1)
    steps: List[int] = Field(min_length=1, description="严格递增的步数网格")
    runs: int = Field(default=100, ge=2, description="每个单元的独立链数")
    seed: int = Field(default=0, ge=0)
    truth: str = Field(default="exact", description="'exact' 或 exact 子命令写出的真值 JSON")
    lcc: bool = Field(default=True, description="只在最大连通分量上评估")
    output: str = Field(default="bench_out", description="输出目录")

    @field_validator("steps")
    @classmethod
    def check_grid(cls, value: List[int]) -> List[int]:
        if value[0] <= 0 or any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("steps 必须为正且严格递增")
        return value

    @model_validator(mode="after")
    def check_methods(self) -> "BenchSpec":
        for spec in self.methods:
            if spec.baseline is not None:
                if _BASELINE_K[spec.baseline] != self.k:
                    raise ValueError(f"{spec.baseline} 只适用于 k={_BASELINE_K[spec.baseline]}")
            else:
                check_walk_config(self.k, spec.d)
        labels = [m.label for m in self.methods]
        if len(set(labels)) != len(labels):
            raise ValueError("methods 中有重复的方法")
        return self


class BenchRow(BaseModel):
    method: str
    k: int
    d: Optional[int]
    walk: str
    steps: int
    runs: int
    class_index: int
    name: str
    truth: float
    mean: Optional[float] = None
    se: Optional[float] = None
    nrmse: Optional[float] = None
    bias2: Optional[float] = None
    variance: Optional[float] = None
    api_calls: float = 0.0


class BenchResult(BaseModel):
    rows: List[BenchRow]
    timings: List[Tuple[str, int, float]] = Field(default_factory=list)
    results_path: Optional[str] = None
    timings_path: Optional[str] = None
    plot_path: Optional[str] = None


class _Outcome(BaseModel):
    concentration: List[Optional[float]]
    not_estimable: List[int]
    api_calls: int
    wall_time: float


def resolve_truth(spec: BenchSpec, graph: Graph) -> ExactCounts:
    if spec.truth == "exact":
        return exact_enumerate(graph, spec.k, name=spec.graph)
    truth = load_exact_counts(spec.truth)
    if truth.k != spec.k or len(truth.counts) != len(enumerate_classes(spec.k)):
        raise ConfigError(f"真值文件 {spec.truth} 的 k={truth.k} 与规格 k={spec.k} 不符")
    return truth


def restricted_truth(truth: ExactCounts, not_estimable: Sequence[int]) -> List[Optional[float]]:
    """只在可估计类别上归一化的真浓度，与估计器的归一化口径一致。"""

    skip = set(not_estimable)
    total = sum(c for i, c in enumerate(truth.counts, start=1) if i not in skip)
    if total == 0:
        return [None] * len(truth.counts)
    return [None if i in skip else c / total for i, c in enumerate(truth.counts, start=1)]


def _run_job(spec: BenchSpec, method: MethodSpec, steps: int, run: int, graph: Graph, settings: AppSettings) -> _Outcome:
    began = time.perf_counter()
    oracle = NeighborOracle.from_settings(graph, settings)
    if method.baseline is None:
        cfg = EstimatorConfig(k=spec.k, d=method.d, steps=steps, method=method.method, walk=method.walk, seed=spec.seed)
        report = run_estimate(cfg, oracle, graph_name=spec.graph, run_index=run)
        outcome = (report.concentration, report.not_estimable, report.api_calls)
    else:
        baseline = BaselineConfig(
            method=method.baseline, samples=steps, seed=derive_seed(spec.seed, run), acceptance=method.acceptance
        )
        result = run_baseline(baseline, graph, oracle)
        outcome = (result.concentration, result.not_estimable, result.api_calls)
    concentration, not_estimable, calls = outcome
    return _Outcome(
        concentration=concentration, not_estimable=not_estimable, api_calls=calls, wall_time=time.perf_counter() - began
    )


def _cell_rows(
    spec: BenchSpec, method: MethodSpec, steps: int, outcomes: Sequence[_Outcome], truth: ExactCounts
) -> List[BenchRow]:
    not_estimable = outcomes[0].not_estimable
    expected = restricted_truth(truth, not_estimable)
    calls = math.fsum(o.api_calls for o in outcomes) / len(outcomes)
    rows = []
    for graphlet in enumerate_classes(spec.k):
        i = graphlet.index - 1
        row = BenchRow(
            method=method.label,
            k=spec.k,
            d=method.d,
            walk=method.walk if method.baseline is None else "",
            steps=steps,
            runs=len(outcomes),
            class_index=graphlet.index,
            name=graphlet.name,
            truth=expected[i] if expected[i] is not None else 0.0,
            api_calls=calls,
        )
        if expected[i] is not None:
            estimates = [o.concentration[i] or 0.0 for o in outcomes]
            mean = math.fsum(estimates) / len(estimates)
            update = {"mean": mean, "se": standard_error(estimates)}
            if expected[i] > 0:
                split = error_decomposition(estimates, expected[i])
                update.update(nrmse=split.nrmse, bias2=split.bias_squared, variance=split.variance)
            row = row.model_copy(update=update)
        rows.append(row)
    return rows


def _fmt(value: Optional[float]) -> str:
    return "" if value is None else repr(float(value))


def bench_rows_as_csv(rows: Sequence[BenchRow]) -> List[List[str]]:
    return [
        [
            r.method,
            str(r.k),
            "" if r.d is None else str(r.d),
            r.walk,
            str(r.steps),
            str(r.runs),
            str(r.class_index),
            r.name,
            _fmt(r.truth),
            _fmt(r.mean),
            _fmt(r.se),
            _fmt(r.nrmse),
            _fmt(r.bias2),
            _fmt(r.variance),
            _fmt(r.api_calls),
        ]
        for r in rows
    ]


def write_plot_data(path: Path, spec: BenchSpec, rows: Sequence[BenchRow]) -> None:
    """每个类别一个数据块（块间空两行），列为步数与各方法的 NRMSE。"""

    labels = [m.label for m in spec.methods]
    lookup = {(r.method, r.steps, r.class_index): r.nrmse for r in rows}
    lines: List[str] = []
    for graphlet in enumerate_classes(spec.k):
        lines.append(f"# class {graphlet.index} {graphlet.name}")
        lines.append("# steps " + " ".join(labels))
        for steps in spec.steps:
            values = [lookup.get((label, steps, graphlet.index)) for label in labels]
            lines.append(" ".join([str(steps), *("nan" if v is None else repr(v) for v in values)]))
        lines.extend(["", ""])
    path.write_text("\n".join(lines), encoding="utf-8")


def run_bench(spec: BenchSpec, *, threads: Optional[int] = None, graph: Optional[Graph] = None) -> BenchResult:
    """运行整个网格并写出 results.csv、timings.csv 与 plot_nrmse.dat。"""

    if graph is None:
        graph = load_edge_list(spec.graph)
    if spec.lcc:
        graph = largest_connected_component(graph)
    truth = resolve_truth(spec, graph)
    settings = get_settings()
    jobs = [
        (mi, si, run)
        for mi in range(len(spec.methods))
        for si in range(len(spec.steps))
        for run in range(spec.runs)
    ]
    workers = max(1, min(threads or settings.threads, len(jobs)))
    logger.info("bench: %d methods x %d grid points x %d runs on %d workers", len(spec.methods), len(spec.steps), spec.runs, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        outcomes = list(
            pool.map(lambda job: _run_job(spec, spec.methods[job[0]], spec.steps[job[1]], job[2], graph, settings), jobs)
        )
    rows: List[BenchRow] = []
    timings: List[Tuple[str, int, float]] = []
    for mi, method in enumerate(spec.methods):
        for si, steps in enumerate(spec.steps):
            start = (mi * len(spec.steps) + si) * spec.runs
            cell = outcomes[start : start + spec.runs]
            rows.extend(_cell_rows(spec, method, steps, cell, truth))
            timings.append((method.label, steps, math.fsum(o.wall_time for o in cell) / len(cell)))
            logger.info("bench cell done: %s steps=%d", method.label, steps)
    out = Path(spec.output)
    out.mkdir(parents=True, exist_ok=True)
    results_path, timings_path, plot_path = out / "results.csv", out / "timings.csv", out / "plot_nrmse.dat"
    with results_path.open("w", encoding="utf-8", newline="") as handle:
        write_csv(handle, BENCH_CSV_HEADER, bench_rows_as_csv(rows))
    with timings_path.open("w", encoding="utf-8", newline="") as handle:
        write_csv(handle, TIMINGS_CSV_HEADER, [[label, str(steps), str(spec.runs), repr(t)] for label, steps, t in timings])
    write_plot_data(plot_path, spec, rows)
    return BenchResult(
        rows=rows,
        timings=timings,
        results_path=str(results_path),
        timings_path=str(timings_path),
        plot_path=str(plot_path),
    )


def load_bench_spec(path: str) -> BenchSpec:
    return BenchSpec.model_validate_json(Path(path).read_text(encoding="utf-8"))


__all__ = [
    "BENCH_CSV_HEADER",
    "BenchResult",
    "BenchRow",
    "BenchSpec",
    "MethodSpec",
    "TIMINGS_CSV_HEADER",
    "bench_rows_as_csv",
    "load_bench_spec",
    "resolve_truth",
    "restricted_truth",
    "run_bench",
    "write_plot_data",
]
