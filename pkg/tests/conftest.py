import numpy as np
import pytest

from vismem import ImageBuffer
from vismem.rng import make_generator


@pytest.fixture
def rng():
    return make_generator(12345)


def random_image(rng, size=32, channels=3, low=0, high=255):
    px = rng.integers(low, high + 1, size=(size, size, channels)).astype(np.uint8)
    return ImageBuffer(px)
