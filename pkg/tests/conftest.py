import numpy as np
import pytest

from xychain import oracle
from xychain.model import ChainParams


def tfqim(L, g):
    return ChainParams(L, g, 1.0)


@pytest.fixture(scope="session")
def spectra_cache():
    """Parity-resolved dense spectra keyed by (L, g, gamma); shared across tests."""
    store = {}

    def get(L, g, gamma=1.0):
        key = (L, float(g), float(gamma))
        if key not in store:
            store[key] = oracle.sector_spectra(oracle.build_hamiltonian(ChainParams(L, g, gamma)))
        return store[key]

    return get


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
