import numpy as np
import pytest

from splitnash import SearchBudget


@pytest.fixture
def budget() -> SearchBudget:
    return SearchBudget()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(0)
