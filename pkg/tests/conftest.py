import pytest

from toricobs.catalog import builtin_catalog


@pytest.fixture(scope="session")
def entries():
    return {e.type_label: e for e in builtin_catalog()}


@pytest.fixture(scope="session")
def fans(entries):
    return {k: e.fan for k, e in entries.items()}

