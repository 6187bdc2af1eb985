import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_nondecreasing(rng, M):
    """Non-decreasing positive weight with occasional flat stretches."""
    inc = rng.exponential(1.0, M) * (rng.random(M) < 0.7)
    inc[0] = rng.uniform(0.1, 2.0)
    return np.cumsum(inc)


def random_quasiconcave(rng, M):
    """Quasi-concave weight: non-decreasing with non-increasing eta(j)/j."""
    slopes = np.sort(rng.uniform(0.0, 1.0, M))[::-1]
    slopes[0] = rng.uniform(0.5, 2.0)
    v = np.cumsum(slopes * (rng.random(M) < 0.8) + 0.0)
    v[0] = slopes[0]
    j = np.arange(1, M + 1)
    # enforce eta(j)/j non-increasing on top of a concave-ish shape
    return j * np.minimum.accumulate(np.maximum(v, v[0]) / j)
