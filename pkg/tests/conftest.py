import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from prodbasis import catalog  # noqa: E402


@pytest.fixture(scope="session")
def std2():
    return catalog.builtin("std-2x2").basis


@pytest.fixture(scope="session")
def domino():
    return catalog.builtin("domino-3x3").basis


@pytest.fixture(scope="session")
def tiles():
    return catalog.builtin("tiles-3x3").basis


@pytest.fixture(scope="session")
def shifts():
    return catalog.builtin("shifts-2x2x2").basis
