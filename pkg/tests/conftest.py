import numpy as np
import pytest

from secregion import ChannelPair

# Published benchmark instances used across the suite.  ch22 is a dense
# 2x2 pair run at power 12; ch22b a second 2x2 pair at power 10; ch_row3
# has a two-row and a one-row user over three transmit antennas (run at
# powers 2, 4, 10); ch_vec2 is the classic two-scalar-user line pair.


@pytest.fixture(scope="session")
def ch22() -> ChannelPair:
    return ChannelPair([[0.3, 2.5], [2.2, 1.8]], [[1.3, 1.2], [1.5, 3.9]])


@pytest.fixture(scope="session")
def ch22b() -> ChannelPair:
    return ChannelPair(
        [[0.3861, 0.6355], [0.9995, 0.6259]],
        [[0.4977, 0.9658], [0.9245, 0.6116]],
    )


@pytest.fixture(scope="session")
def ch_row3() -> ChannelPair:
    return ChannelPair(
        [[0.1560, -0.6372, -0.4055], [-1.1450, -0.1417, 0.0708]],
        [[-1.5032, 0.5503, -0.0334]],
    )


@pytest.fixture(scope="session")
def ch_vec2() -> ChannelPair:
    return ChannelPair([[1.0, 0.4]], [[0.4, 1.0]])


def random_psd(rng: np.random.Generator, n: int, trace: float) -> np.ndarray:
    """Random PSD matrix scaled to the requested trace."""
    g = rng.standard_normal((n, n))
    b = g @ g.T
    return b * (trace / np.trace(b))


def random_channel(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.standard_normal((rows, cols))
