"""评估网格：规格校验、确定性输出与绘图数据。"""
from __future__ import annotations

import csv
from pathlib import Path

import pytest
from pydantic import ValidationError
from scipy.stats import spearmanr

from graphlet_walk.bench import BENCH_CSV_HEADER, BenchSpec, MethodSpec, restricted_truth, run_bench
from graphlet_walk.errors import ConfigError
from graphlet_walk.graph import write_edge_list
from graphlet_walk.oracle import ExactCounts, exact_enumerate

METHODS = [
    {"d": 1},
    {"d": 1, "method": "css", "walk": "nbsrw"},
    {"d": 2},
    {"baseline": "mhrw-wedge"},
]


@pytest.fixture
def square_file(tmp_path, square) -> Path:
    path = tmp_path / "square.txt"
    write_edge_list(square, path)
    return path


def _spec(square_file, output, **overrides) -> BenchSpec:
    payload = {
        "graph": str(square_file),
        "k": 3,
        "methods": METHODS,
        "steps": [300, 600],
        "runs": 3,
        "seed": 7,
        "output": str(output),
    }
    payload.update(overrides)
    return BenchSpec.model_validate(payload)


def test_method_labels():
    assert MethodSpec(d=2, method="css").label == "SRW2CSS"
    assert MethodSpec(d=1, method="css", walk="nb").label == "SRW1CSSNB"
    assert MethodSpec(baseline="mhrw-wedge").label == "MHRW-WEDGE"


def test_method_needs_exactly_one_kind():
    with pytest.raises(ValidationError):
        MethodSpec()
    with pytest.raises(ValidationError):
        MethodSpec(d=1, baseline="wedge")


@pytest.mark.parametrize(
    "overrides",
    [
        {"steps": [600, 300]},
        {"steps": [300, 300]},
        {"runs": 1},
        {"methods": [{"baseline": "path3"}]},
        {"methods": [{"d": 3}]},
        {"methods": [{"d": 1}, {"d": 1, "walk": "srw"}]},
    ],
)
def test_invalid_specs(tmp_path, square_file, overrides):
    with pytest.raises(ValidationError):
        _spec(square_file, tmp_path / "out", **overrides)


def test_restricted_truth_drops_unestimable_classes():
    truth = ExactCounts(k=4, counts=[2, 6, 0, 1, 1, 0])
    assert restricted_truth(truth, [2]) == [0.5, None, 0.0, 0.25, 0.25, 0.0]


def test_bench_outputs(tmp_path, square_file):
    spec = _spec(square_file, tmp_path / "out")
    result = run_bench(spec, threads=2)
    with open(result.results_path, encoding="utf-8") as handle:
        rows = list(csv.DictReader(handle))
    assert tuple(rows[0].keys()) == BENCH_CSV_HEADER
    assert len(rows) == len(METHODS) * 2 * 2
    mhrw = [r for r in rows if r["method"] == "MHRW-WEDGE"]
    assert {float(r["api_calls"]) / int(r["steps"]) for r in mhrw} == {3.0}
    assert {r["truth"] for r in rows} == {"0.5"}
    assert Path(result.timings_path).read_text(encoding="utf-8").startswith("method,steps,runs,wall_time_mean")
    plot = Path(result.plot_path).read_text(encoding="utf-8")
    assert plot.startswith("# class 1 wedge\n# steps SRW1 SRW1CSSNB SRW2 MHRW-WEDGE\n300 ")
    assert "# class 2 triangle" in plot


def test_bench_results_are_byte_identical(tmp_path, square_file):
    first = run_bench(_spec(square_file, tmp_path / "a"), threads=1)
    second = run_bench(_spec(square_file, tmp_path / "b"), threads=4)
    assert Path(first.results_path).read_bytes() == Path(second.results_path).read_bytes()
    assert Path(first.plot_path).read_bytes() == Path(second.plot_path).read_bytes()


def test_bench_with_truth_file(tmp_path, square_file, square):
    truth = tmp_path / "truth.json"
    truth.write_text(exact_enumerate(square, 3).model_dump_json(), encoding="utf-8")
    result = run_bench(_spec(square_file, tmp_path / "out", truth=str(truth), methods=[{"d": 1}], steps=[200]))
    assert all(row.truth == 0.5 for row in result.rows)


def test_bench_rejects_mismatched_truth(tmp_path, square_file, square):
    truth = tmp_path / "truth.json"
    truth.write_text(exact_enumerate(square, 4).model_dump_json(), encoding="utf-8")
    with pytest.raises(ConfigError):
        run_bench(_spec(square_file, tmp_path / "out", truth=str(truth), methods=[{"d": 1}], steps=[200]))


def test_nrmse_falls_as_steps_grow(tmp_path, er_graph):
    path = tmp_path / "er.txt"
    write_edge_list(er_graph, path)
    spec = BenchSpec.model_validate(
        {
            "graph": str(path),
            "k": 3,
            "methods": [{"d": 1}, {"d": 2, "method": "css"}, {"baseline": "mhrw-wedge"}],
            "steps": [250, 1000, 4000],
            "runs": 20,
            "seed": 3,
            "output": str(tmp_path / "out"),
        }
    )
    rows = run_bench(spec, graph=er_graph).rows
    for label in ("SRW1", "SRW2CSS", "MHRW-WEDGE"):
        for index in (1, 2):
            cell = [r for r in rows if r.method == label and r.class_index == index]
            rho, _ = spearmanr([r.steps for r in cell], [r.nrmse for r in cell])
            assert rho < 0, (label, index)


@pytest.mark.slow
def test_square_grid_means_are_close_to_truth(tmp_path, square_file):
    spec = _spec(square_file, tmp_path / "out", runs=500, steps=[10_000], methods=METHODS[:3])
    for row in run_bench(spec).rows:
        assert abs(row.mean - 0.5) <= 3 * row.se + 1e-9
