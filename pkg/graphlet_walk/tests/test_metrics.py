from __future__ import annotations

import math

import pytest

from graphlet_walk.metrics import error_decomposition, nrmse, similarity, similarity_stats, standard_error


def test_nrmse_zero_when_exact():
    assert nrmse([0.3, 0.3, 0.3], 0.3) == 0.0


def test_nrmse_symmetric_spread():
    assert nrmse([0.4, 0.6], 0.5) == pytest.approx(0.2)


def test_nrmse_with_bias():
    # 均方误差 (0^2 + 0.2^2) / 2 = 0.02
    assert nrmse([0.5, 0.7], 0.5) == pytest.approx(math.sqrt(0.02) / 0.5)


def test_nrmse_errors():
    with pytest.raises(ValueError):
        nrmse([0.1, 0.2], 0.0)
    with pytest.raises(ValueError):
        nrmse([0.1], 0.1)


def test_error_decomposition_adds_up():
    estimates, truth = [0.5, 0.7, 0.65, 0.4], 0.5
    split = error_decomposition(estimates, truth)
    assert (split.bias_squared + split.variance) == pytest.approx((split.nrmse * truth) ** 2)


def test_similarity_examples():
    assert similarity([0.2, 0.3, 0.5], [0.2, 0.3, 0.5]) == pytest.approx(1.0)
    assert similarity([1, 0, 0], [0, 1, 0]) == 0.0
    assert similarity([0.5, 0.5], [0.8, 0.2]) == pytest.approx(0.857, abs=1e-3)


def test_similarity_errors():
    with pytest.raises(ValueError):
        similarity([0, 0], [1, 0])
    with pytest.raises(ValueError):
        similarity([1, 0], [1, 0, 0])


def test_similarity_stats():
    mean, std = similarity_stats([[1, 0], [0.5, 0.5]], [[1, 0], [0.5, 0.5]])
    assert mean == pytest.approx(1.0) and std == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        similarity_stats([[1, 0]], [])


def test_standard_error():
    assert standard_error([1.0, 3.0]) == pytest.approx(1.0)
