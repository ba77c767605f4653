import math

import pytest

from supoptics import utils
from supoptics.oracle_api import OracleProvider, coherent_state, fock_state
from supoptics.states_api import ClosedFormProvider, makeState


@pytest.fixture(autouse=True)
def isolated_config(tmp_path, monkeypatch):
    """Never read the developer's ~/.config/supoptics.ini."""
    monkeypatch.setenv('SUPOPTICS_CONFIG', str(tmp_path / 'missing.ini'))
    monkeypatch.setenv('NO_COLOR', '1')
    utils.getConfig.cache_clear()
    yield
    utils.getConfig.cache_clear()


@pytest.fixture
def socs():
    return makeState('socs', 0.2, 1.0)


@pytest.fixture
def sots():
    return makeState('sots', 0.6, 1.0, t=0.8)


@pytest.fixture
def vacuum_provider():
    return OracleProvider.fromState(fock_state(0))


@pytest.fixture
def single_photon_provider():
    return OracleProvider.fromState(fock_state(1))


@pytest.fixture(params=[0.5, 1.0, 2.0])
def coherent_provider(request):
    return OracleProvider.fromState(coherent_state(request.param))


def closed_and_oracle(spec):
    return ClosedFormProvider(spec), OracleProvider(spec)


GRID = [
    makeState('socs', s, gamma, phase=phase, eta=eta)
    for s in (0.2, 0.5, 0.8) for gamma in (0.5, 1.0, 2.0) for phase in (0.0, math.pi / 4) for eta in (0.0, 0.5)
] + [
    makeState('sots', s, nbar, eta=eta)
    for s in (0.2, 0.5, 0.8) for nbar in (0.5, 1.0, 2.0) for eta in (0.0, 0.5)
]
