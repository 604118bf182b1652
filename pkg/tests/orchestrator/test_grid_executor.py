import math

import pytest

from eitcool.errors import NonUniqueSteadyState, RatioOutOfRange
from eitcool.orchestrator import GridExecutor
from eitcool.physics.spectroscopy import ratio_to_nbar


def _non_unique(_):
    raise NonUniqueSteadyState(3)


def test_sequential_keeps_order():
    assert GridExecutor(jobs=1).map(math.sqrt, [9.0, 1.0, 4.0]) == [3.0, 1.0, 2.0]


def test_empty_grid():
    assert GridExecutor(jobs=4, parallel=True).map(math.sqrt, []) == []


def test_numeric_failures_fill_their_slot():
    results = GridExecutor(jobs=1).map(ratio_to_nbar, [0.5, 1.5, 0.2])
    assert results[0] == pytest.approx(1.0)
    assert isinstance(results[1], RatioOutOfRange)
    assert results[2] == pytest.approx(0.25)


def test_other_errors_propagate():
    with pytest.raises(ValueError):
        GridExecutor(jobs=1).map(math.sqrt, [1.0, -1.0])


def test_parallel_matches_sequential():
    items = [float(i) for i in range(40)]
    parallel = GridExecutor(jobs=3, parallel=True).map(math.sqrt, items)
    sequential = GridExecutor(jobs=1).map(math.sqrt, items)
    assert parallel == sequential


def test_parallel_returns_failures_in_place():
    results = GridExecutor(jobs=2, parallel=True).map(ratio_to_nbar, [0.5, 2.0, 0.0, -1.0])
    assert results[0] == pytest.approx(1.0)
    assert isinstance(results[1], RatioOutOfRange)
    assert results[2] == 0.0
    assert isinstance(results[3], RatioOutOfRange)


def test_failure_keeps_exception_details():
    result = GridExecutor(jobs=2, parallel=True).map(_non_unique, [0, 1])[1]
    assert isinstance(result, NonUniqueSteadyState)
    assert result.dimension == 3


def test_settings_decide_by_default():
    # conftest turns the pool off for unit tests
    assert GridExecutor().parallel is False
    assert GridExecutor(jobs=0).jobs == 1
