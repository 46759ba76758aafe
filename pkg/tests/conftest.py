import numpy as np
import pytest

from projpsh import domains


@pytest.fixture
def rng():
    return np.random.default_rng(20260818)


# Domain instances are shared across the whole run: their patch atlases are
# expensive to build (seconds to half a minute each) and fully deterministic.


@pytest.fixture(scope="session")
def ball():
    return domains.builtin("ball", n=2, r=0.7)


@pytest.fixture(scope="session")
def lens():
    return domains.builtin("lens", n=2)


@pytest.fixture(scope="session")
def quarter():
    return domains.builtin("quarter", n=2)
