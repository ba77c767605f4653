import math

import numpy as np
import pytest

from supoptics.errors import InconsistentProviderError, InvalidArgumentError, OrderLimitError, UndefinedWitnessError
from supoptics.oracle_api import OracleProvider, fock_state
from supoptics.states_api import ClosedFormProvider, makeState
from supoptics.witness_api import (WitnessAPI, husimi, husimi_integral, husimi_zero_locus, klyshko_bracket,
                                   makeProvider)

from conftest import GRID


def api_for(family, s, gamma, backend='closed', **kw):
    return WitnessAPI(makeProvider(makeState(family, s, gamma, **kw), backend))


# -- NUMBER MOMENTS -- #
def test_number_moments_vacuum(vacuum_provider):
    mus, ms = WitnessAPI(vacuum_provider).numberMoments(5)
    assert mus == [1, 0, 0, 0, 0, 0]
    assert ms == [1, 0, 0, 0, 0, 0]


def test_number_moments_single_photon(single_photon_provider):
    mus, ms = WitnessAPI(single_photon_provider).numberMoments(6)
    assert mus == pytest.approx([1] * 7)
    assert ms == pytest.approx([1, 1, 0, 0, 0, 0, 0])


def test_number_moments_sots():
    mus, _ = api_for('sots', 0.0, 1.0, t=1.0).numberMoments(2)
    assert mus[1] == pytest.approx(13 / 3)


def test_number_moments_bound(vacuum_provider):
    with pytest.raises(OrderLimitError):
        WitnessAPI(vacuum_provider).numberMoments(17)


def test_central_moments(coherent_provider):
    api = WitnessAPI(coherent_provider)
    mean = api.numberMoments(1)[0][1]
    assert api.centralNumberMoment(1) == pytest.approx(0, abs=1e-12)
    assert api.centralNumberMoment(2) == pytest.approx(mean, rel=1e-10)
    assert api.centralNumberMoment(3) == pytest.approx(mean, rel=1e-10)


def test_central_moment_matches_direct_variance():
    spec = makeState('socs', 0.2, 1.0)
    oracle = OracleProvider(spec)
    p = oracle.state.weights
    n = np.arange(p.size)
    mean = np.sum(n * p)
    direct = np.sum((n - mean) ** 2 * p)
    assert WitnessAPI(ClosedFormProvider(spec)).centralNumberMoment(2) == pytest.approx(direct, abs=1e-10)


# -- COHERENT BOUNDARY -- #
def test_coherent_state_is_on_every_boundary(coherent_provider):
    api = WitnessAPI(coherent_provider)
    mean = api.numberMoments(1)[0][1]
    x2 = api.quadratureMoments(2)[2]
    for l in (2, 3):
        assert abs(api.mandelQ(l).value) <= 1e-10
    for l in range(2, 9):
        scale = max(1.0, mean ** l)
        assert abs(api.hoa(l).value) <= 1e-10 * scale
        assert abs(api.hosps(l).value) <= 1e-10 * scale
    for l in (2, 4, 6, 8):
        assert abs(api.hos(l).value) <= 1e-10 * max(1.0, x2 ** (l / 2))


def test_mandel_q_fourth_order_is_not_zero_for_poisson(coherent_provider):
    # <(dN)^4> = λ + 3λ^2 for a Poissonian
    api = WitnessAPI(coherent_provider)
    lam = api.numberMoments(1)[0][1]
    assert api.mandelQ(4).value == pytest.approx(3 * lam, rel=1e-8)


# -- INDIVIDUAL CRITERIA -- #
def test_mandel_q_undefined_for_vacuum():
    with pytest.raises(UndefinedWitnessError):
        api_for('socs', 0.5, 0.0).mandelQ(2)


def test_mandel_q_order_range(vacuum_provider):
    api = WitnessAPI(vacuum_provider)
    with pytest.raises(InvalidArgumentError):
        api.mandelQ(1)
    with pytest.raises(OrderLimitError):
        api.mandelQ(17)


def test_hoa_values(single_photon_provider):
    assert WitnessAPI(single_photon_provider).hoa(2).value == pytest.approx(-1)
    r = api_for('sots', 0.0, 1.0, t=1.0).hoa(2)
    assert r.value == pytest.approx(17 / 9, rel=1e-12)
    assert r.nonclassical is False


@pytest.mark.parametrize('spec', GRID[::3])
def test_cross_witness_identity(spec):
    api = WitnessAPI(ClosedFormProvider(spec))
    mean = api.numberMoments(1)[0][1]
    hoa = api.hoa(2).value
    scale = max(1.0, mean ** 2)
    assert abs(api.hosps(2).value - hoa) <= 1e-10 * scale
    assert abs(mean * api.mandelQ(2).value - hoa) <= 1e-10 * scale


def test_hosps_detects_socs():
    r = api_for('socs', 0.2, 0.2).hosps(3)
    assert r.value < 0
    assert r.nonclassical


def test_hos_rejects_odd_order(socs):
    with pytest.raises(InvalidArgumentError):
        WitnessAPI(ClosedFormProvider(socs)).hos(3)


def test_hos_vacuum_and_second_order():
    assert WitnessAPI(OracleProvider.fromState(fock_state(0))).hos(4).value == pytest.approx(0, abs=1e-12)
    assert api_for('socs', 0.5, 1.0).hos(2).value == pytest.approx(-0.21086, abs=1e-4)


@pytest.mark.parametrize('s', [0.2, 0.5, 0.8])
@pytest.mark.parametrize('gamma', np.linspace(0, 2, 9))
def test_sots_never_squeezed_at_second_order(s, gamma):
    api = api_for('sots', s, gamma)
    mean = api.numberMoments(1)[0][1]
    assert api.hos(2).value == pytest.approx(2 * mean, abs=1e-10)
    assert api.hos(2).value >= -1e-10


def test_hos_quadrature_paths_agree():
    spec = makeState('socs', 0.5, 1.0, phase=math.pi / 4)
    closed = WitnessAPI(ClosedFormProvider(spec)).quadratureMoments(8)
    oracle = OracleProvider(spec)
    for k in range(9):
        assert closed[k] == pytest.approx(oracle.quadratureMoment(k), rel=1e-10, abs=1e-10)


class ComplexProvider(ClosedFormProvider):
    def moment(self, m, n):
        return super().moment(m, n) + (1j if m == n == 1 else 0)


def test_imaginary_residue_is_rejected(socs):
    with pytest.raises(InconsistentProviderError):
        WitnessAPI(ComplexProvider(socs)).hoa(2)


def test_agarwal_tara_fock_states():
    for n in (2, 3):
        a3 = WitnessAPI(OracleProvider.fromState(fock_state(n))).agarwalTara()
        assert a3.value == pytest.approx(-1, abs=1e-10)
        assert a3.nonclassical


def test_agarwal_tara_single_photon_is_singular(single_photon_provider):
    a3 = WitnessAPI(single_photon_provider).agarwalTara()
    assert a3.note == 'singular'
    assert a3.nonclassical is None


def test_agarwal_tara_vacuum():
    a3 = api_for('socs', 0.3, 0.0).agarwalTara()
    assert a3.value == 0
    assert a3.nonclassical is False


def test_agarwal_tara_values():
    assert api_for('socs', 0.2, 1.0).agarwalTara().value == pytest.approx(-0.12612, abs=1e-4)
    assert api_for('sots', 0.2, 1.0).agarwalTara().value == pytest.approx(-0.02595, abs=1e-4)


def test_klyshko_vacuum_is_zero():
    api = api_for('socs', 1.0, 0.0, t=0.0)
    assert all(api.klyshko(m).value == 0 for m in range(5))
    assert api.klyshko(0).nonclassical is False


def test_klyshko_sots_sign_pattern():
    api = api_for('sots', 0.2, 2.0)
    signs = [api.klyshko(m).value < 0 for m in range(7)]
    assert signs == [True, True, False, False, False, False, False]


def test_klyshko_socs_always_negative():
    api = api_for('socs', 0.2, 2.0)
    assert all(api.klyshko(m).value < 0 for m in range(7))


def test_printed_socs_bracket_sign_pattern():
    spec = makeState('socs', 0.2, 2.0)
    signs = [klyshko_bracket(spec, m, printed=True) < 0 for m in range(7)]
    assert signs == [True, True, False, False, False, False, False]


@pytest.mark.parametrize('spec', GRID[::4])
def test_bracket_sign_equals_klyshko_sign(spec):
    api = WitnessAPI(ClosedFormProvider(spec))
    for m in range(6):
        assert np.sign(klyshko_bracket(spec, m)) == np.sign(api.klyshko(m).value)


def test_printed_sots_bracket_is_klyshko():
    spec = makeState('sots', 0.8, 1.0)
    b0 = api_for('sots', 0.8, 1.0).klyshko(0).value
    assert klyshko_bracket(spec, 0, printed=True) == pytest.approx(b0, rel=1e-10)
    assert b0 < 0


def test_klyshko_backends_agree():
    spec = makeState('sots', 0.5, 1.5)
    closed = WitnessAPI(ClosedFormProvider(spec))
    oracle = WitnessAPI(OracleProvider(spec))
    for m in range(8):
        assert closed.klyshko(m).value == pytest.approx(oracle.klyshko(m).value, rel=1e-9, abs=1e-14)


# -- HUSIMI -- #
def test_husimi_zero_of_socs():
    spec = makeState('socs', 0.2, 1.0)
    beta0 = husimi_zero_locus(spec)
    assert beta0 == pytest.approx(-0.2 / (0.2 + math.sqrt(0.96)))
    assert husimi(spec, beta0) < 1e-15
    assert husimi_zero_locus(makeState('socs', 1.0, 1.0, t=0.0)) == pytest.approx(-1)


def test_husimi_zero_absent():
    assert husimi_zero_locus(makeState('socs', 0.5, 0.0)) is None
    assert husimi_zero_locus(makeState('sots', 0.5, 1.0)) is None
    assert husimi_zero_locus(makeState('sots', 0.0, 1.0)) == 0


def test_husimi_vacuum_origin():
    assert husimi(makeState('sots', 1.0, 0.0, t=0.0), 0j) == pytest.approx(1 / math.pi)


@pytest.mark.parametrize('spec', GRID[::6])
def test_husimi_normalized_and_positive(spec):
    assert husimi_integral(spec) == pytest.approx(1, abs=1e-6)
    grid = np.linspace(-4, 4, 21)
    assert np.all(husimi(spec, grid[None, :] + 1j * grid[:, None]) >= 0)


def test_husimi_backends_agree():
    spec = makeState('socs', 0.5, 1.0, phase=0.3, eta=0.25)
    beta = np.array([0.2 + 0.1j, -1 + 0.5j, 1.5j])
    np.testing.assert_allclose(ClosedFormProvider(spec).husimi(beta), OracleProvider(spec).husimi(beta),
                               rtol=1e-10, atol=1e-15)


def test_husimi_witness_without_spec(single_photon_provider):
    r = WitnessAPI(single_photon_provider).husimiWitness()
    assert r.nonclassical
    assert r.value < 1e-12


# -- BACKEND EQUIVALENCE AND DISPATCH -- #
@pytest.mark.parametrize('spec', GRID[::7])
def test_witness_backends_agree(spec):
    closed = WitnessAPI(ClosedFormProvider(spec))
    oracle = WitnessAPI(OracleProvider(spec))
    for criterion, order in [('q', 2), ('q', 5), ('hoa', 4), ('hosps', 4), ('hos', 4), ('a3', 3)]:
        a, b = closed.evaluate(criterion, order).value, oracle.evaluate(criterion, order).value
        assert abs(a - b) <= 1e-9 * max(1.0, abs(b))


def test_evaluate_unknown_criterion(socs):
    with pytest.raises(InvalidArgumentError):
        WitnessAPI(ClosedFormProvider(socs)).evaluate('wigner', 2)


def test_make_provider_backends(socs):
    assert makeProvider(socs, 'closed').backend == 'closed'
    assert makeProvider(socs, 'oracle').backend == 'oracle'
    with pytest.raises(InvalidArgumentError):
        makeProvider(socs, 'both')
