import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("ci", max_examples=50, deadline=None)
settings.load_profile("ci")

from admasim.channel import PathComponent, UserChannel, channel_matrix


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def los_channel(theta, gain=1.0 + 0.0j, n=16, spacing=0.5):
    """Single-path channel pointing at `theta`."""
    return UserChannel.from_paths(PathComponent(doa=theta, gain=gain), (), n, spacing)


def los_matrix(thetas, gains=None, n=16):
    """Stacked single-path channels."""
    if gains is None:
        gains = [1.0 + 0.0j] * len(thetas)
    return channel_matrix([los_channel(t, g, n) for t, g in zip(thetas, gains)])


def spaced_cosines(rng, k, n, min_gap, lo=-0.85, hi=0.85):
    """Ascending cos(theta) values with all adjacent gaps >= min_gap/n."""
    while True:
        c = np.sort(rng.uniform(lo, hi, k))
        if np.all(np.diff(c) >= min_gap / n):
            return c


def column_sine(u, v):
    """Sine of the angle between two complex vectors, accurate near zero."""
    un = u / np.linalg.norm(u)
    vn = v / np.linalg.norm(v)
    return float(np.linalg.norm(vn - (un.conj() @ vn) * un))


def max_column_sine(a, b):
    return max(column_sine(a.matrix[:, k], b.matrix[:, k])
               for k in range(a.matrix.shape[1]))
