import numpy as np
import pytest

from mcce_motility.frames import Frame, FrameSequence


def const_frame(value, size=8, index=0, width=None):
    return Frame(np.full((size, width or size), value, dtype=np.uint8), index)


def seq_of(*arrays, fps=2.0):
    return FrameSequence.from_arrays([np.asarray(a, dtype=np.uint8) for a in arrays], fps)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def random_frame(rng):
    return Frame(rng.integers(0, 256, size=(480, 480), dtype=np.uint8))
