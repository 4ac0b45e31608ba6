"""docs/report_schema.md 必须覆盖所有输出字段。"""
from __future__ import annotations

from pathlib import Path

import pytest

from graphlet_walk.baselines import BaselineReport
from graphlet_walk.bench import BENCH_CSV_HEADER, TIMINGS_CSV_HEADER
from graphlet_walk.oracle import ExactCounts
from graphlet_walk.report import BASELINE_CSV_HEADER, ESTIMATE_CSV_HEADER, EXACT_CSV_HEADER, EstimateReport, TracePoint

SCHEMA_DOC = Path(__file__).resolve().parents[2] / "docs" / "report_schema.md"


def _fields(model) -> list:
    return [*model.model_fields, *model.model_computed_fields]


@pytest.mark.parametrize("model", [EstimateReport, TracePoint, ExactCounts, BaselineReport])
def test_model_fields_are_documented(model):
    text = SCHEMA_DOC.read_text(encoding="utf-8")
    missing = [name for name in _fields(model) if f"`{name}`" not in text]
    assert not missing, f"{model.__name__} 缺少说明：{missing}"


def test_bench_columns_are_documented():
    text = SCHEMA_DOC.read_text(encoding="utf-8")
    assert all(f"`{name}`" in text for name in BENCH_CSV_HEADER)
    assert ",".join(TIMINGS_CSV_HEADER) in text


@pytest.mark.parametrize("header", [ESTIMATE_CSV_HEADER, EXACT_CSV_HEADER, BASELINE_CSV_HEADER])
def test_csv_headers_are_quoted_verbatim(header):
    assert ",".join(header) in SCHEMA_DOC.read_text(encoding="utf-8")
