import pytest

from pgplan.fixtures import load_domain, load_problem


@pytest.fixture(scope="session")
def blocksworld():
    return load_domain("blocksworld")


@pytest.fixture(scope="session")
def hanoi():
    return load_domain("hanoi")


@pytest.fixture(scope="session")
def rockets():
    return load_domain("rockets")


@pytest.fixture
def bw01(blocksworld):
    return load_problem(blocksworld, "bw-01")
