import pytest

from occlusim.fixtures import fixture_path
from occlusim.model import load_scenario
from occlusim.profiler import plan_for_scenario


@pytest.fixture(scope="session")
def single_rv():
    return load_scenario(fixture_path("single_rv_50"))


@pytest.fixture(scope="session")
def three_rv():
    return load_scenario(fixture_path("unicaragil"))


@pytest.fixture(scope="session")
def empty_road():
    return load_scenario(fixture_path("empty"))


@pytest.fixture(scope="session")
def single_rv_plan(single_rv):
    """(limits, profile) for the single-RV fixture on a fine grid."""
    return plan_for_scenario(single_rv, ds=0.01)


@pytest.fixture(scope="session")
def three_rv_plan(three_rv):
    return plan_for_scenario(three_rv, ds=0.01)
