"""命令行工具：估计、精确计数、α 表、评估网格、对照方法与相似度。

用法错误与缺失的输入文件返回 2，计算过程中的错误返回 1。
"""
from __future__ import annotations

import argparse
import io
import logging
from pathlib import Path
from typing import Iterable, List, Optional, Tuple

from pydantic import ValidationError

from .access import NeighborOracle
from .baselines import BaselineConfig, run_baseline
from .bench import load_bench_spec, run_bench
from .catalog import SUPPORTED_K, alpha_table
from .errors import GraphletError
from .estimate import EstimatorConfig, combine_reports, estimate_relationship_size, run_parallel, with_counts
from .graph import Graph, largest_connected_component, load_edge_list
from .logging_setup import configure_logging
from .metrics import similarity
from .oracle import exact_enumerate
from .report import load_concentration, render_csv, report_to_json, write_csv
from .settings import AppSettings, get_settings

logger = logging.getLogger(__name__)

PROG = "graphlet-walk"


class UsageError(Exception):
    """参数组合或输入文件有问题，对应退出码 2。"""


def _checkpoints(text: str) -> Tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"checkpoints 应为逗号分隔的整数：{text}") from None


def _existing(path: Path) -> Path:
    if not path.exists():
        raise UsageError(f"未找到输入文件：{path}")
    return path


def _load_graph(path: Path, lcc: bool) -> Graph:
    graph = load_edge_list(_existing(path))
    return largest_connected_component(graph) if lcc else graph


def _emit(text: str, output: Optional[Path]) -> None:
    if output is None:
        print(text, end="" if text.endswith("\n") else "\n")
    else:
        output.write_text(text, encoding="utf-8")
        logger.info("wrote %s", output)


def build_parser(settings: AppSettings) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=PROG, description="基于 G^(d) 随机游走的图元浓度估计")
    parser.add_argument("--log-level", default=settings.log_level, help="日志级别，默认取 GRAPHLET_LOG_LEVEL")
    commands = parser.add_subparsers(dest="command", required=True)

    estimate = commands.add_parser("estimate", help="随机游走估计图元浓度")
    estimate.add_argument("--graph", type=Path, required=True, help="边表文件")
    estimate.add_argument("--k", type=int, required=True, choices=SUPPORTED_K)
    estimate.add_argument("--d", type=int, required=True)
    estimate.add_argument("--method", choices=("base", "css"), default="base")
    estimate.add_argument("--walk", default="simple", help="simple/srw 或 nb/nbsrw")
    estimate.add_argument("--steps", type=int, required=True)
    estimate.add_argument("--seed", type=int, default=settings.default_seed)
    estimate.add_argument("--burn-in", type=int, default=settings.burn_in)
    estimate.add_argument("--start", type=int, help="起始节点的原始标签")
    estimate.add_argument("--chains", type=int, default=1, help="独立链数，结果合并后输出")
    estimate.add_argument("--checkpoints", type=_checkpoints, default=(), help="逗号分隔的检查点步数")
    estimate.add_argument("--counts", action="store_true", help="同时输出绝对数量估计")
    estimate.add_argument("--lcc", action=argparse.BooleanOptionalAction, default=True, help="只保留最大连通分量")
    estimate.add_argument("--memoize", action=argparse.BooleanOptionalAction, default=settings.memoize_neighbors)
    estimate.add_argument("--format", choices=("json", "csv"), default="json")
    estimate.add_argument("--output", type=Path)

    exact = commands.add_parser("exact", help="精确枚举真值")
    exact.add_argument("--graph", type=Path, required=True)
    exact.add_argument("--k", type=int, required=True, choices=SUPPORTED_K)
    exact.add_argument("--lcc", action=argparse.BooleanOptionalAction, default=True)
    exact.add_argument("--format", choices=("json", "csv"), default="json")
    exact.add_argument("--output", type=Path)

    alpha = commands.add_parser("alpha", help="输出状态对应系数 α")
    alpha.add_argument("--k", type=int, required=True, choices=SUPPORTED_K)
    alpha.add_argument("--d", type=int, required=True)
    alpha.add_argument("--half", action="store_true", help="输出 α/2（Hamilton 路径数）")

    bench = commands.add_parser("bench", help="按规格文件运行评估网格")
    bench.add_argument("--spec", type=Path, required=True, help="BenchSpec JSON")
    bench.add_argument("--threads", type=int, help="覆盖 GRAPHLET_THREADS")
    bench.add_argument("--output", help="覆盖规格中的输出目录")

    baseline = commands.add_parser("baseline", help="运行对照采样器")
    baseline.add_argument("--graph", type=Path, required=True)
    baseline.add_argument("--method", choices=("wedge", "path3", "mhrw-wedge"), required=True)
    baseline.add_argument("--samples", type=int, required=True)
    baseline.add_argument("--seed", type=int, default=settings.default_seed)
    baseline.add_argument("--acceptance", choices=("degree_minus_one", "binomial_ratio"), default="degree_minus_one")
    baseline.add_argument("--lcc", action=argparse.BooleanOptionalAction, default=True)
    baseline.add_argument("--format", choices=("json", "csv"), default="json")
    baseline.add_argument("--output", type=Path)

    similar = commands.add_parser("similarity", help="两个浓度向量的余弦相似度")
    similar.add_argument("--a", type=Path, required=True)
    similar.add_argument("--b", type=Path, required=True)
    return parser


def run_estimate_command(args: argparse.Namespace) -> str:
    graph = _load_graph(args.graph, args.lcc)
    cfg = EstimatorConfig(
        k=args.k,
        d=args.d,
        steps=args.steps,
        method=args.method,
        walk=args.walk,
        seed=args.seed,
        burn_in=args.burn_in,
        start=None if args.start is None else graph.index_of(args.start),
        checkpoints=args.checkpoints,
    )
    oracle = NeighborOracle(graph, memoize=args.memoize, latency_ms=get_settings().access_latency_ms)
    reports = run_parallel(cfg, oracle, args.chains, graph_name=str(args.graph))
    report = reports[0] if len(reports) == 1 else combine_reports(reports)
    if args.counts:
        report = with_counts(report, estimate_relationship_size(graph, args.d))
    return report_to_json(report) if args.format == "json" else render_csv(report)


def run_exact_command(args: argparse.Namespace) -> str:
    counts = exact_enumerate(_load_graph(args.graph, args.lcc), args.k, name=str(args.graph))
    return report_to_json(counts) if args.format == "json" else render_csv(counts)


def run_alpha_command(args: argparse.Namespace) -> str:
    table = alpha_table(args.k, args.d)
    values = table.half if args.half else table.alpha
    buffer = io.StringIO()
    header: List[str] = ["k", "d", *(str(i) for i in range(1, len(values) + 1))]
    write_csv(buffer, header, [[str(args.k), str(args.d), *(str(v) for v in values)]])
    return buffer.getvalue()


def run_bench_command(args: argparse.Namespace) -> str:
    spec = load_bench_spec(str(_existing(args.spec)))
    if args.output:
        spec = spec.model_copy(update={"output": args.output})
    if spec.truth != "exact":
        _existing(Path(spec.truth))
    result = run_bench(spec, threads=args.threads, graph=_load_graph(Path(spec.graph), False))
    return f"{result.results_path}\n{result.timings_path}\n{result.plot_path}\n"


def run_baseline_command(args: argparse.Namespace) -> str:
    graph = _load_graph(args.graph, args.lcc)
    cfg = BaselineConfig(method=args.method, samples=args.samples, seed=args.seed, acceptance=args.acceptance)
    report = run_baseline(cfg, graph, NeighborOracle.from_settings(graph))
    return report_to_json(report) if args.format == "json" else render_csv(report)


def run_similarity_command(args: argparse.Namespace) -> str:
    a = load_concentration(_existing(args.a))
    b = load_concentration(_existing(args.b))
    return f"{similarity(a, b)!r}\n"


_COMMANDS = {
    "estimate": run_estimate_command,
    "exact": run_exact_command,
    "alpha": run_alpha_command,
    "bench": run_bench_command,
    "baseline": run_baseline_command,
    "similarity": run_similarity_command,
}


def main(argv: Optional[Iterable[str]] = None) -> int:
    """命令行入口，返回进程退出码。"""

    try:
        settings = get_settings()
    except ValidationError as exc:
        argparse.ArgumentParser(prog=PROG).exit(status=1, message=f"error: 环境配置无效：{exc}\n")
    parser = build_parser(settings)
    args = parser.parse_args(args=None if argv is None else list(argv))
    try:
        configure_logging(args.log_level.upper())
        text = _COMMANDS[args.command](args)
        _emit(text, getattr(args, "output", None) if args.command != "bench" else None)
    except UsageError as exc:
        parser.exit(status=2, message=f"usage error: {exc}\n")
    except (GraphletError, ValidationError, ValueError, KeyError, IndexError) as exc:
        parser.exit(status=1, message=f"error: {exc}\n")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
