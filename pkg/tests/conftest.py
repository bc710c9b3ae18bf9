import mpmath as mp
import pytest

from qcoupling import QContext, TruncationPolicy


@pytest.fixture(scope="session")
def ctx05():
    return QContext("0.5")


@pytest.fixture(scope="session")
def ctx03():
    return QContext("0.3")


@pytest.fixture(scope="session")
def ctx07():
    return QContext("0.7")


@pytest.fixture()
def policy():
    return TruncationPolicy()


@pytest.fixture(autouse=True)
def _ambient_precision():
    # tests accumulate reference sums at a fixed generous precision
    with mp.workdps(45):
        yield
