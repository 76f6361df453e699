import numpy as np
import pytest

from src.config.settings import get_settings
from src.core.mlti import MltiSystem
from src.core.tensor import Tensor3
from tests.helpers import EXAMPLE_A, EXAMPLE_B, EXAMPLE_DESIRED


@pytest.fixture(autouse=True)
def fresh_settings():
    get_settings(reload=True)
    yield
    get_settings(reload=True)


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)


@pytest.fixture
def example_system() -> MltiSystem:
    return MltiSystem(a=Tensor3(np.array(EXAMPLE_A)), b=Tensor3(np.array(EXAMPLE_B)))


@pytest.fixture
def example_desired():
    return [[complex(re, im) for re, im in row] for row in EXAMPLE_DESIRED]
