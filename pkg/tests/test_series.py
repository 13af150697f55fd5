import math

import numpy as np
import pytest

from utils.errors import ConvergenceError
from utils.series import sum_power_series, tail_bound


def test_tail_bound_geometric() -> None:
    assert math.isclose(tail_bound([1.0, 0.5, 0.25]), 0.25)
    assert tail_bound([0.0, 0.0]) == 0.0
    assert tail_bound([1.0, 2.0]) is None
    assert tail_bound([0.0, 1.0]) is None


def test_geometric_sum() -> None:
    result = sum_power_series(lambda n: 0.5 ** n, 1, 1e-15)
    assert math.isclose(result.value.real, 2.0, rel_tol=1e-14)
    assert result.tail_bound <= 1e-14


def test_capped_sum_is_exact() -> None:
    result = sum_power_series(lambda n: np.ones(n.shape), 2, 1e-15, max_two_j=6)
    assert result.value == 4
    assert result.n_terms == 4
    assert result.tail_bound == 0.0


def test_divergent_sum_raises() -> None:
    with pytest.raises(ConvergenceError):
        sum_power_series(lambda n: np.ones(n.shape), 1, 1e-15, label="ones")
