import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from shrink.model import ErrorThresholds, TimeSeries  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def thresholds_for(x: TimeSeries, eps: float, eps_b_pct: float = 5.0) -> ErrorThresholds:
    r = x.value_range
    eps_b = (eps_b_pct / 100.0) * r if r > 0 else 0.05
    return ErrorThresholds(epsilon=eps, epsilon_b=eps_b, epsilon_r=eps)
