"""评估指标：NRMSE 及其偏差/方差分解、图元核相似度。"""
from __future__ import annotations

from typing import NamedTuple, Sequence, Tuple

import numpy as np


class ErrorDecomposition(NamedTuple):
    bias_squared: float
    variance: float
    nrmse: float


def _estimates(values: Sequence[float]) -> np.ndarray:
    array = np.asarray(values, dtype=np.float64)
    if array.ndim != 1 or len(array) < 2:
        raise ValueError("至少需要 2 个估计值")
    return array


def nrmse(estimates: Sequence[float], truth: float) -> float:
    """sqrt(E[(x - truth)²]) / truth。"""

    if truth == 0:
        raise ValueError("真值为 0 时 NRMSE 无定义")
    array = _estimates(estimates)
    return float(np.sqrt(np.mean((array - truth) ** 2)) / truth)


def error_decomposition(estimates: Sequence[float], truth: float) -> ErrorDecomposition:
    """均方误差 = 偏差² + 方差（总体方差，ddof=0）。"""

    array = _estimates(estimates)
    bias = float(array.mean() - truth)
    variance = float(array.var())
    return ErrorDecomposition(bias * bias, variance, nrmse(array, truth))


def similarity(c_a: Sequence[float], c_b: Sequence[float]) -> float:
    """余弦相似度 c_aᵀ c_b / (‖c_a‖ ‖c_b‖)。"""

    a = np.asarray(c_a, dtype=np.float64)
    b = np.asarray(c_b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"向量长度不同：{a.shape} vs {b.shape}")
    norm_a, norm_b = np.linalg.norm(a), np.linalg.norm(b)
    if norm_a == 0 or norm_b == 0:
        raise ValueError("零向量没有方向，相似度无定义")
    # 舍入可能让自相似度略大于 1
    return float(np.clip(a @ b / (norm_a * norm_b), -1.0, 1.0))


def similarity_stats(vectors_a: Sequence[Sequence[float]], vectors_b: Sequence[Sequence[float]]) -> Tuple[float, float]:
    """成对重复估计的相似度均值与标准差。"""

    if len(vectors_a) != len(vectors_b) or not vectors_a:
        raise ValueError("需要数量相同且非空的两组向量")
    values = np.array([similarity(a, b) for a, b in zip(vectors_a, vectors_b)])
    return float(values.mean()), float(values.std())


def standard_error(values: Sequence[float]) -> float:
    array = _estimates(values)
    return float(array.std(ddof=1) / np.sqrt(len(array)))


__all__ = ["ErrorDecomposition", "error_decomposition", "nrmse", "similarity", "similarity_stats", "standard_error"]
