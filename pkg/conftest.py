import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

# Local imports
from config.config import Config  # noqa: E402


@pytest.fixture(autouse=True)
def fresh_config():
    """Every test starts from the default settings."""
    Config.reset()
    yield
    Config.reset()
