import numpy as np
import pytest

from textvid import synth
from textvid.pipeline import FirstFrameBoxes, VideoSequence


@pytest.fixture(scope="session")
def translation_fixture(tmp_path_factory):
    d = tmp_path_factory.mktemp("translation")
    gt = synth.generate_fixture("translation", 100, str(d))
    return str(d), gt


@pytest.fixture(scope="session")
def zoom_fixture(tmp_path_factory):
    d = tmp_path_factory.mktemp("zoom")
    gt = synth.generate_fixture("zoom", 60, str(d))
    return str(d), gt


@pytest.fixture(scope="session")
def occlusion_fixture(tmp_path_factory):
    d = tmp_path_factory.mktemp("occlusion")
    gt = synth.generate_fixture("occlusion", 80, str(d))
    return str(d), gt


def open_fixture(fixture):
    directory, gt = fixture
    video = VideoSequence.open(directory)
    first = FirstFrameBoxes("manual", (gt.instances[0].entries[0].box,))
    return video, first, gt


@pytest.fixture
def rng():
    return np.random.default_rng(42)
