import pytest

from pseudotrace.modekit import builtin


@pytest.fixture(scope="session")
def heis4():
    return builtin("heisenberg", 4)


@pytest.fixture(scope="session")
def heis5():
    return builtin("heisenberg", 5)


@pytest.fixture(scope="session")
def heis6():
    return builtin("heisenberg", 6)


@pytest.fixture(scope="session")
def trivial():
    return builtin("trivial")
