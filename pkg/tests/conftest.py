import pytest

from parley.app import Resources, load_resources
from parley.config import RunConfig


@pytest.fixture(scope="session")
def resources() -> Resources:
    return load_resources(RunConfig())


@pytest.fixture(scope="session")
def lexicon(resources):
    return resources.lexicon


@pytest.fixture(scope="session")
def inventory(resources):
    return resources.inventory


@pytest.fixture(scope="session")
def corpus(resources):
    return resources.corpus
