import sys
import warnings
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hausdorff_h1.core import UniformGrid  # noqa: E402


@pytest.fixture(scope="session")
def grid():
    """The default experiment grid."""
    return UniformGrid(200.0, 1 << 16)


@pytest.fixture(scope="session")
def small_grid():
    return UniformGrid(50.0, 1 << 14)


@pytest.fixture
def quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        yield
