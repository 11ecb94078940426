import pytest

from finslerlab import catalog, randers


@pytest.fixture(scope="session")
def spaces():
    return {name: catalog.space(name) for name in catalog.NAMES}


@pytest.fixture(scope="session")
def structures(spaces):
    return {name: randers.finsler(sp) for name, sp in spaces.items()}
