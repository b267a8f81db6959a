import numpy as np
import pytest

from wavelab.analysis import model_for_bank, model_for_classical
from wavelab.bump import build_p
from wavelab.classical import reference_filters
from wavelab.gmra import ScalingVector, WaveletHat, example_bank, journe_bank


@pytest.fixture(scope="session")
def p1():
    return build_p(1)


@pytest.fixture(scope="session")
def ex_bank(p1):
    return example_bank(p1)


@pytest.fixture(scope="session")
def jb():
    return journe_bank()


@pytest.fixture(scope="session")
def ex_sv(ex_bank):
    return ScalingVector(ex_bank)


@pytest.fixture(scope="session")
def ex_psi(ex_sv):
    return WaveletHat(ex_sv)


@pytest.fixture(scope="session")
def ex_model(ex_bank):
    return model_for_bank(ex_bank)


@pytest.fixture(scope="session")
def j_model(jb):
    return model_for_bank(jb)


@pytest.fixture(scope="session")
def haar_model():
    return model_for_classical(reference_filters("haar"))


@pytest.fixture(scope="session")
def shannon_model():
    return model_for_classical(reference_filters("shannon"))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
