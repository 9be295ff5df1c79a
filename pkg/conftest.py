import sys
from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from utils.config import default_config  # noqa: E402
from utils.instance_io import load_instance  # noqa: E402

EXAMPLE_INSTANCE = ROOT / "instances" / "worked_example.json"


@pytest.fixture(scope="session")
def example_path() -> Path:
    return EXAMPLE_INSTANCE


@pytest.fixture(scope="session")
def example_instance():
    return load_instance(EXAMPLE_INSTANCE)


@pytest.fixture(scope="session")
def run_config():
    return default_config()


@pytest.fixture
def rng():
    return np.random.default_rng(0)
