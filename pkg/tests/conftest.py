import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from helpers import load  # noqa: E402


@pytest.fixture(scope="session")
def example():
    return load("example_F_G.json")
