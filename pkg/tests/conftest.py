import pytest

from dglinf.cli import resolve_fixture
from dglinf.dglparse import parse_dgl

FIXTURES = ["t0", "t1", "t2", "t3", "caso4", "product4", "example37"]


def load_fixture(name, cap=None):
    return parse_dgl(resolve_fixture(name)[0]).to_dgl(cap)


@pytest.fixture(scope="session")
def fixture_dgl():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = load_fixture(name)
        return cache[name]
    return get
