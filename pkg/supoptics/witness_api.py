"""Nonclassicality witnesses evaluated on any MomentProvider.

A provider exposes moment(m, n) = <a†^m a^n>, photonProb(m),
photonDistribution(m_max), quadratureMean(), husimi(beta), an orderBound
and (optionally) the spec it was built from. ClosedFormProvider and
OracleProvider are interchangeable here.

Central moments and determinants are accumulated exactly in Fractions of the
provider's floats, so the alternating binomial sums lose no precision of
their own.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Optional
import logging
import math

import numpy as np
from scipy.integrate import trapezoid
from scipy.optimize import minimize, minimize_scalar

from .algebra_api import pochhammer_half, quadrature_power_expansion, stirling2
from .errors import (InconsistentProviderError, InvalidArgumentError, OrderLimitError,
                     UndefinedWitnessError)
from .oracle_api import OracleProvider
from .states_api import ClosedFormProvider, effective_state, husimi_socs, husimi_sots, normalization
from .utils import exact_to_float


log = logging.getLogger(__name__)

NUMBER_ORDER_BOUND = 16
QUADRATURE_ORDER_BOUND = 12
HOSPS_ORDER_BOUND = 12
KLYSHKO_BOUND = 4094
VACUUM_MEAN = 1e-12
IMAG_TOLERANCE = 1e-10
POLE_TOLERANCE = 1e-12
ZERO_TOLERANCE = 1e-12

CRITERIA = ('q', 'hoa', 'hosps', 'hos', 'a3', 'klyshko', 'husimi')
BACKENDS = ('closed', 'oracle')


@dataclass(frozen=True)
class WitnessResult:
    criterion: str
    order: int
    value: float
    nonclassical: Optional[bool]
    note: str = ''

    @property
    def defined(self):
        return self.nonclassical is not None and math.isfinite(self.value)


def makeProvider(spec, backend='closed'):
    """ClosedFormProvider or OracleProvider for a spec."""
    if backend == 'closed':
        return ClosedFormProvider(spec)
    if backend == 'oracle':
        return OracleProvider(spec)
    raise InvalidArgumentError(f'unknown backend "{backend}" (expected one of {BACKENDS})')


def _real(z, what):
    """Drop an imaginary part that is rounding noise; anything larger means a broken provider."""
    z = complex(z)
    if abs(z.imag) > IMAG_TOLERANCE * max(1.0, abs(z.real)):
        raise InconsistentProviderError(f'{what} has imaginary part {z.imag:.3g} (real part {z.real:.17g})')
    return z.real


def _check_range(order, low, high, what):
    if order < low:
        raise InvalidArgumentError(f'{what} order must be >= {low} (got {order})')
    if order > high:
        raise OrderLimitError(f'{what} order {order} exceeds bound {high}')


def _central(raw, mean, l):
    """Σ_k C(l,k) raw[k] (-mean)^{l-k}"""
    return sum(comb(l, k) * raw[k] * (-mean) ** (l - k) for k in range(l + 1))


def _det3(m):
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def _hankel3(seq):
    return [[seq[i + j] for j in range(3)] for i in range(3)]


class WitnessAPI(object):
    """
    Witness evaluation on one provider

    Usage:
        from supoptics.states_api import makeState
        from supoptics.witness_api import WitnessAPI, makeProvider

        w = WitnessAPI(makeProvider(makeState('socs', s=0.2, gamma=1.0)))
        w.mandelQ(5)
    """
    def __init__(self, provider):
        self.provider = provider
        self._factorial = {}

    # -- NUMBER MOMENTS -- #
    def _need(self, order):
        bound = self.provider.orderBound
        if order > bound:
            raise OrderLimitError(f'order {order} exceeds provider bound {bound}')

    def _factorialMoments(self, j_max):
        """Exact m_0..m_{j_max} with m_j = <a†^j a^j>."""
        self._need(j_max)
        for j in range(j_max + 1):
            if j not in self._factorial:
                self._factorial[j] = Fraction(_real(self.provider.moment(j, j), f'<a†^{j} a^{j}>'))
        return [self._factorial[j] for j in range(j_max + 1)]

    def _powerMoments(self, j_max):
        """Exact mu_j = <N^j> = Σ_n S(j,n) m_n."""
        ms = self._factorialMoments(j_max)
        return [sum(stirling2(j, n) * ms[n] for n in range(j + 1)) for j in range(j_max + 1)]

    def numberMoments(self, j_max):
        """(mu_0..mu_j, m_0..m_j) as floats."""
        _check_range(j_max, 0, NUMBER_ORDER_BOUND, 'number moment')
        mus = self._powerMoments(j_max)
        ms = self._factorialMoments(j_max)
        return [exact_to_float(x) for x in mus], [exact_to_float(x) for x in ms]

    def _centralExact(self, l):
        mus = self._powerMoments(l)
        return _central(mus, mus[1], l), mus

    def centralNumberMoment(self, l):
        """<(N - <N>)^l>"""
        _check_range(l, 1, NUMBER_ORDER_BOUND, 'central moment')
        return exact_to_float(self._centralExact(l)[0])

    # -- PHOTON-NUMBER WITNESSES -- #
    def mandelQ(self, l):
        """Q_M^(l) = <(dN)^l>/<N> - 1"""
        _check_range(l, 2, NUMBER_ORDER_BOUND, 'Mandel Q')
        central, mus = self._centralExact(l)
        if mus[1] <= VACUUM_MEAN:
            raise UndefinedWitnessError(f'Mandel Q undefined: <N> = {float(mus[1]):.3g}')
        value = exact_to_float(central / mus[1] - 1)
        return WitnessResult('q', l, value, value < 0)

    def hoa(self, l):
        """d_h^(l-1) = <a†^l a^l> - <a†a>^l"""
        _check_range(l, 2, NUMBER_ORDER_BOUND, 'HOA')
        ms = self._factorialMoments(l)
        value = exact_to_float(ms[l] - ms[1] ** l)
        return WitnessResult('hoa', l, value, value < 0)

    def hosps(self, l):
        """<(dN)^l> minus the same moment of a Poissonian with equal mean."""
        _check_range(l, 2, HOSPS_ORDER_BOUND, 'HOSPS')
        central, mus = self._centralExact(l)
        mean = mus[1]
        touchard = [sum(stirling2(j, n) * mean ** n for n in range(j + 1)) for j in range(l + 1)]
        value = exact_to_float(central - _central(touchard, mean, l))
        return WitnessResult('hosps', l, value, value < 0)

    # -- QUADRATURE -- #
    def quadratureMoments(self, k_max):
        """<X^k>, k = 0..k_max, from the normal-ordered expansion of X^k."""
        _check_range(k_max, 0, QUADRATURE_ORDER_BOUND, 'quadrature')
        self._need(k_max)
        return [_real(quadrature_power_expansion(k).expect(self.provider.moment), f'<X^{k}>')
                for k in range(k_max + 1)]

    def hos(self, l, quadrature_mean=None):
        """Hong-Mandel S^(l) = (<(dX)^l> - (1/2)_{l/2}) / (1/2)_{l/2}"""
        if l % 2:
            raise InvalidArgumentError(f'HOS needs an even order (got {l})')
        _check_range(l, 2, QUADRATURE_ORDER_BOUND, 'HOS')
        mean = quadrature_mean if quadrature_mean is not None else self.provider.quadratureMean()
        mean = Fraction(_real(mean, '<X>'))
        raw = [Fraction(x) for x in self.quadratureMoments(l)]
        coherent = pochhammer_half(l)
        value = exact_to_float((_central(raw, mean, l) - coherent) / coherent)
        return WitnessResult('hos', l, value, value < 0)

    # -- AGARWAL-TARA -- #
    def agarwalTara(self):
        """A_3 = det m / (det mu - det m) from 3x3 moment matrices."""
        ms = self._factorialMoments(4)
        mus = self._powerMoments(4)
        if ms[1] <= VACUUM_MEAN:
            return WitnessResult('a3', 3, 0.0, False, 'vacuum')
        det_m = _det3(_hankel3(ms))
        det_mu = _det3(_hankel3(mus))
        denom = det_mu - det_m
        if abs(denom) < POLE_TOLERANCE * max(abs(det_mu), abs(det_m), 1):
            log.warning(f'Agarwal-Tara pole: det mu - det m = {float(denom):.3g}')
            value = exact_to_float(det_m / denom) if denom else math.nan
            return WitnessResult('a3', 3, value, None, 'singular')
        value = exact_to_float(det_m / denom)
        return WitnessResult('a3', 3, value, value < 0)

    # -- KLYSHKO -- #
    def klyshko(self, m):
        """B(m) = (m+2) p_m p_{m+2} - (m+1) p_{m+1}^2"""
        _check_range(m, 0, KLYSHKO_BOUND, 'Klyshko')
        p = self.provider.photonDistribution(m + 2)
        value = float((m + 2) * p[m] * p[m + 2] - (m + 1) * p[m + 1] ** 2)
        return WitnessResult('klyshko', m, value, value < 0)

    # -- HUSIMI -- #
    def husimi(self, beta):
        return self.provider.husimi(beta)

    def husimiZeroLocus(self, search_radius=None):
        spec = getattr(self.provider, 'spec', None)
        if spec is not None:
            return husimi_zero_locus(spec, search_radius)
        return _planar_zero(self.provider.husimi, search_radius if search_radius is not None else 8.0)

    def husimiWitness(self, search_radius=None):
        """Zero found in the disc -> nonclassical; value is Q there (or the smallest Q sampled)."""
        beta0 = self.husimiZeroLocus(search_radius)
        if beta0 is not None:
            return WitnessResult('husimi', 0, float(self.husimi(beta0)), True, f'zero at {beta0:.17g}')
        spec = getattr(self.provider, 'spec', None)
        radius = search_radius if search_radius is not None else (_default_radius(spec) if spec else 8.0)
        grid = _square_grid(radius, 81)
        return WitnessResult('husimi', 0, float(np.min(self.husimi(grid))), False)

    def evaluate(self, criterion, order):
        """Dispatch by CLI criterion name."""
        if criterion == 'q':
            return self.mandelQ(order)
        if criterion == 'hoa':
            return self.hoa(order)
        if criterion == 'hosps':
            return self.hosps(order)
        if criterion == 'hos':
            return self.hos(order)
        if criterion == 'a3':
            return self.agarwalTara()
        if criterion == 'klyshko':
            return self.klyshko(order)
        if criterion == 'husimi':
            return self.husimiWitness()
        raise InvalidArgumentError(f'unknown criterion "{criterion}" (expected one of {CRITERIA})')


# -- SPEC-LEVEL HUSIMI -- #
def husimi(spec, beta):
    """Closed-form Husimi Q of a spec (detector folded in), >= 0."""
    eff = effective_state(spec)
    if eff.family == 'socs':
        return husimi_socs(eff.sup, eff.coherent, beta)
    return husimi_sots(eff.sup, eff.thermal, beta)


def _default_radius(spec):
    eff = effective_state(spec)
    if eff.family == 'socs':
        return 8 + 2 * abs(eff.coherent.alpha)
    return 8 * math.sqrt(1 + eff.thermal.nbar)


def _square_grid(radius, count):
    x = np.linspace(-radius, radius, count)
    return x[None, :] + 1j * x[:, None]


def _interior_minima(q):
    """Boolean mask of grid points no larger than their 8 neighbours; the rim is never a minimum."""
    padded = np.pad(q, 1, constant_values=np.inf)
    rows, cols = q.shape
    mask = np.ones_like(q, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di or dj:
                mask &= q <= padded[1 + di:1 + di + rows, 1 + dj:1 + dj + cols]
    mask[[0, -1], :] = False
    mask[:, [0, -1]] = False
    return mask


def _planar_zero(qfun, radius, count=81):
    # Gaussian tails fall below any relative tolerance, so only interior minima are candidates
    grid = _square_grid(radius, count)
    q = np.asarray(qfun(grid))
    q_max = float(np.max(q))
    minima = _interior_minima(q)
    if not minima.any():
        return None
    masked = np.where(minima, q, np.inf)
    i = np.unravel_index(np.argmin(masked), q.shape)
    best = complex(grid[i])
    if q[i] <= ZERO_TOLERANCE * q_max:
        return best
    res = minimize(lambda v: float(qfun(complex(v[0], v[1]))), [best.real, best.imag], method='Nelder-Mead',
                   options=dict(xatol=1e-12, fatol=1e-300, maxiter=4000))
    cand = complex(res.x[0], res.x[1])
    if abs(cand) <= radius and float(qfun(cand)) <= ZERO_TOLERANCE * q_max:
        return cand
    return None


def _radial_zero(bracket, radius, count=401):
    """Zero of a non-negative radial profile on [0, radius], envelope already divided out."""
    r = np.linspace(0, radius, count)
    q = np.asarray(bracket(r))
    q_max = float(np.max(q))
    i = int(np.argmin(q))
    if q[i] <= ZERO_TOLERANCE * q_max:
        return complex(r[i])
    lo, hi = r[max(i - 1, 0)], r[min(i + 1, count - 1)]
    res = minimize_scalar(lambda x: float(bracket(np.array([x]))[0]), bounds=(lo, hi), method='bounded',
                          options=dict(xatol=1e-14))
    if float(bracket(np.array([res.x]))[0]) <= ZERO_TOLERANCE * q_max:
        return complex(res.x)
    return None


def husimi_zero_locus(spec, search_radius=None):
    """A zero of Q inside |beta| <= search_radius, or None.

    SOCS: s + (s+t) α β* = 0 gives β0 = conj(-s/((s+t)α)) directly.
    SOTS: Q depends on |β| only; the bracket vanishes only at β = 0 with s = 0.
    """
    radius = search_radius if search_radius is not None else _default_radius(spec)
    normalization(spec)
    eff = effective_state(spec)
    p = eff.sup
    if eff.family == 'socs':
        alpha = eff.coherent.alpha
        if alpha == 0 or p.c == 0:
            return None
        beta0 = (-p.s / (p.c * alpha)).conjugate()
        return beta0 if abs(beta0) <= radius else None
    th = eff.thermal
    return _radial_zero(lambda r: husimi(eff, r + 0j) * np.exp(r ** 2 / (1 + th.nbar)), radius)


def husimi_integral(spec, step=0.1):
    """Trapezoidal integral of Q over a square wide enough to hold the state."""
    eff = effective_state(spec)
    if eff.family == 'socs':
        half = 8 + 2 * abs(eff.coherent.alpha)
        centre = eff.coherent.alpha
    else:
        half = 8 * math.sqrt(1 + eff.thermal.nbar)
        centre = 0j
    x = np.arange(-half, half + step / 2, step) + centre.real
    y = np.arange(-half, half + step / 2, step) + centre.imag
    q = husimi(eff, x[None, :] + 1j * y[:, None])
    return float(trapezoid(trapezoid(q, x, axis=1), y))


# -- KLYSHKO BRACKETS -- #
def klyshko_bracket(spec, m, printed=False):
    """B(m) stripped of positive factors, sign-equal to klyshko().

    printed=True evaluates the published closed forms instead, prefactors
    included; for SOCS that bracket carries (m+2), (m+1) weights that B(m)
    does not have.
    """
    if m < 0:
        raise InvalidArgumentError(f'Klyshko index must be >= 0 (got {m})')
    eff = effective_state(spec)
    p = eff.sup
    g0, g1, g2 = (p.g(m + k) for k in range(3))
    weighted = (m + 2) * g0 ** 2 * g2 ** 2 - (m + 1) * g1 ** 4
    if eff.family == 'socs':
        lam = eff.coherent.intensity
        if printed:
            return lam ** (2 * m + 2) * weighted / normalization(eff) ** 2
        return lam ** (2 * m + 2) * (g0 ** 2 * g2 ** 2 - g1 ** 4)
    mu = eff.thermal.mu
    if printed:
        return mu ** (2 * m + 2) * weighted / ((1 + eff.thermal.nbar) ** 2 * normalization(eff) ** 2)
    return mu ** (2 * m + 2) * weighted
