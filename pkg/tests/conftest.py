import numpy as np
import pytest

from nterm.spaces import parse_space

ALL_SPACE_LABELS = [
    "lp:1",
    "lp:1.5",
    "lp:2",
    "lplq:2,1",
    "fpr:0,2,2,1",
    "fpr:0.3,2,1.5,1",
    "lpq:2,4",
    "lpq:4,2",
    "orlicz:ulogu",
    "hyp:4,2",
    "bmo:2",
]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=ALL_SPACE_LABELS)
def any_space(request):
    return parse_space(request.param)
