import math

import numpy as np
import pytest

from supoptics.errors import CutoffInfeasibleError, DegenerateStateError, InvalidArgumentError, OrderLimitError
from supoptics.oracle_api import (FockDiagonal, FockVector, OracleProvider, build_socs, build_sots, build_state,
                                  choose_cutoff, coherent_state, dump_state, fock_state, oracle_husimi,
                                  oracle_moment, oracle_photon_prob, oracle_quadrature_moment)
from supoptics.states_api import (ClosedFormProvider, CoherentSpec, DetectorSpec, SupParams, ThermalSpec, makeState,
                                  normalization_socs, normalization_sots)

from conftest import GRID


def test_cutoff_for_vacuum_is_small():
    assert choose_cutoff(makeState('socs', 0.5, 0.0), 4) <= 8


def test_cutoff_grows_with_intensity():
    small = choose_cutoff(makeState('socs', 0.2, 1.0), 6)
    large = choose_cutoff(makeState('socs', 0.2, 2.0), 6)
    thermal = choose_cutoff(makeState('sots', 0.2, 2.0), 6)
    assert small < large < 100
    assert thermal > 91


def test_cutoff_cap():
    with pytest.raises(CutoffInfeasibleError):
        choose_cutoff(makeState('sots', 0.5, 1e4), 6, max_cutoff=500)


def test_build_socs_vacuum():
    state = build_socs(SupParams.fromS(0.5), CoherentSpec(0), DetectorSpec(), 10)
    assert state.amplitudes[0] == pytest.approx(1)
    assert np.all(state.amplitudes[1:] == 0)


def test_build_socs_pre_norm_matches_closed_form():
    p, c = SupParams.fromS(0.5), CoherentSpec(1.0)
    state = build_socs(p, c, DetectorSpec(), 60)
    assert state.pre_norm == pytest.approx(normalization_socs(p, c), rel=1e-12)


def test_build_socs_number_conserving_case():
    # s=1, t=0: A = a a†, amplitudes ∝ (n+1) × coherent amplitudes
    alpha = 0.8
    state = build_socs(SupParams(1.0, 0.0), CoherentSpec(alpha), DetectorSpec(), 40)
    coherent = coherent_state(alpha, cutoff=40).amplitudes
    ratio = state.amplitudes[:10] / coherent[:10]
    np.testing.assert_allclose(ratio / ratio[0], np.arange(1, 11), rtol=1e-12)


def test_build_sots():
    state = build_sots(SupParams(0.0, 1.0), ThermalSpec(1.0), DetectorSpec(), 120)
    assert state.weights[0] == 0
    p, th = SupParams(0.6, 0.8), ThermalSpec(1.0)
    assert build_sots(p, th, DetectorSpec(), 200).pre_norm == pytest.approx(normalization_sots(p, th), rel=1e-12)
    vacuum = build_sots(p, ThermalSpec(0.0), DetectorSpec(), 10)
    assert vacuum.weights[0] == 1


def test_build_rejects_zero_vector():
    with pytest.raises(DegenerateStateError):
        build_socs(SupParams(0.0, 1.0), CoherentSpec(0), DetectorSpec(), 10)


def test_representations_validate():
    with pytest.raises(InvalidArgumentError):
        FockVector(2, [1, 1, 0])
    with pytest.raises(InvalidArgumentError):
        FockDiagonal(2, [0.5, 0.5])


def test_fock_and_coherent_moments():
    one = fock_state(1)
    assert oracle_moment(one, 0, 0) == pytest.approx(1)
    assert oracle_moment(one, 1, 1) == pytest.approx(1)
    assert oracle_moment(one, 2, 2) == 0
    coh = coherent_state(1.3)
    assert oracle_moment(coh, 1, 1) == pytest.approx(1.69, rel=1e-12)
    assert oracle_moment(coh, 2, 1) == pytest.approx(1.3 ** 3, rel=1e-12)


def test_order_limit():
    state = fock_state(0, cutoff=10)
    with pytest.raises(OrderLimitError):
        oracle_moment(state, 7, 0)


def test_photon_prob_and_quadrature():
    vacuum = fock_state(0)
    assert oracle_photon_prob(vacuum, 0) == 1
    assert oracle_photon_prob(vacuum, 10 ** 6) == 0
    assert oracle_quadrature_moment(vacuum, 2) == pytest.approx(0.5)
    assert oracle_quadrature_moment(vacuum, 4) == pytest.approx(0.75)
    with pytest.raises(OrderLimitError):
        oracle_quadrature_moment(vacuum, 13)


def test_husimi_vacuum_and_zero():
    assert oracle_husimi(fock_state(0), 0j) == pytest.approx(1 / math.pi)
    # s=1, t=0, alpha=1: s + alpha beta* = 0 at beta = -1
    state = build_state(makeState('socs', 1.0, 1.0, t=0.0))
    assert oracle_husimi(state, -1 + 0j) < 1e-15


@pytest.mark.parametrize('spec', GRID[::5])
def test_oracle_matches_closed_form(spec):
    closed, oracle = ClosedFormProvider(spec), OracleProvider(spec)
    for m in range(7):
        for n in range(7):
            ref = oracle.moment(m, n)
            assert abs(closed.moment(m, n) - ref) <= max(1e-9 * abs(ref), 1e-12)
    np.testing.assert_allclose(closed.photonDistribution(20), oracle.photonDistribution(20), rtol=1e-10, atol=1e-15)


@pytest.mark.parametrize('spec', [makeState('socs', 0.2, 2.0), makeState('sots', 0.5, 1.0, eta=0.25)])
def test_doubling_cutoff_changes_nothing(spec):
    base = build_state(spec)
    doubled = build_state(spec, cutoff=2 * base.cutoff)
    for m, n in [(1, 1), (3, 2), (6, 6)]:
        a, b = oracle_moment(base, m, n), oracle_moment(doubled, m, n)
        assert abs(a - b) <= 1e-12 * abs(b) + 1e-15


@pytest.mark.parametrize('spec', [makeState('socs', 0.5, 1.0, phase=math.pi / 4), makeState('sots', 0.8, 0.5)])
def test_oracle_hermiticity(spec):
    oracle = OracleProvider(spec)
    for m, n in [(1, 0), (3, 1), (4, 2)]:
        assert oracle.moment(m, n) == pytest.approx(oracle.moment(n, m).conjugate(), rel=1e-12, abs=1e-15)


def test_detector_literal_build_matches_effective_state():
    spec = makeState('sots', 0.5, 1.0, eta=0.5)
    oracle = OracleProvider(spec)
    closed = ClosedFormProvider(spec)
    assert oracle.moment(2, 2).real == pytest.approx(closed.moment(2, 2).real, rel=1e-10)


def test_dump_state():
    vec = dump_state(fock_state(1, cutoff=3))
    assert list(vec.columns) == ['n', 're(amp)', 'im(amp)']
    assert vec['re(amp)'].tolist() == [0, 1, 0, 0]
    diag = dump_state(build_state(makeState('sots', 0.0, 1.0, t=1.0)))
    assert list(diag.columns) == ['r', 'weight']
    assert diag['weight'].iloc[0] == 0


def test_provider_needs_input():
    with pytest.raises(InvalidArgumentError):
        OracleProvider()
