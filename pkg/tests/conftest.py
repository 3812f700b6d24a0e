import pytest

from coherence_forge.bounds import Bound
from coherence_forge.stdlib import theory


@pytest.fixture(scope="session")
def b4():
    return Bound(4, 9, 16)


@pytest.fixture(scope="session")
def b5():
    return Bound(5, 11, 20)


@pytest.fixture(scope="session")
def b6():
    return Bound(6, 13, 20)


@pytest.fixture(scope="session")
def bin_theory():
    return theory("bin")


@pytest.fixture(scope="session")
def mon():
    return theory("mon_nounit")


@pytest.fixture(scope="session")
def smon():
    return theory("smon_nounit")


@pytest.fixture(scope="session")
def assoc():
    return theory("assoc")


@pytest.fixture(scope="session")
def strfsh():
    return theory("strfsh")
