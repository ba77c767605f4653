"""Truncated Fock-space construction of SOCS/SOTS, straight from the state definitions.

The closed forms in states_api are checked against this module. Pure states
are amplitude vectors, SOTS stays diagonal (A and D(eta) are both functions of
the number operator), so no dense density matrix is ever built.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import cmath
import logging
import math

import numpy as np
import pandas as pd
from scipy.sparse import diags
from scipy.special import gammaln

from .errors import CutoffInfeasibleError, DegenerateStateError, InvalidArgumentError, OrderLimitError
from .states_api import DEGENERATE, SupParams, CoherentSpec, SOCS, effective_state
from .utils import configFloat, configInt


log = logging.getLogger(__name__)

ORDER_MARGIN = 4
DEFAULT_MAX_ORDER = 16
MAX_QUADRATURE_POWER = 12
NORM_TOLERANCE = 1e-12
SCAN_CHUNK = 256


@dataclass(frozen=True, eq=False)
class FockVector:
    """Normalized pure state truncated at photon number `cutoff`."""
    cutoff: int
    amplitudes: np.ndarray = field(repr=False)
    pre_norm: float = 1.0

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.cutoff + 1,):
            raise InvalidArgumentError(f'expected {self.cutoff + 1} amplitudes, got shape {amps.shape}')
        if abs(np.sum(np.abs(amps) ** 2) - 1) > NORM_TOLERANCE:
            raise InvalidArgumentError('amplitudes are not normalized')
        amps.setflags(write=False)
        object.__setattr__(self, 'amplitudes', amps)

    @property
    def weights(self):
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True, eq=False)
class FockDiagonal:
    """Density operator diagonal in the Fock basis, truncated at `cutoff`."""
    cutoff: int
    weights: np.ndarray = field(repr=False)
    pre_norm: float = 1.0

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (self.cutoff + 1,):
            raise InvalidArgumentError(f'expected {self.cutoff + 1} weights, got shape {w.shape}')
        if np.any(w < 0) or abs(np.sum(w) - 1) > NORM_TOLERANCE:
            raise InvalidArgumentError('weights must be non-negative and sum to 1')
        w.setflags(write=False)
        object.__setattr__(self, 'weights', w)


# -- CUTOFF -- #
def _log_weights(eff, r):
    """Un-normalized log p_r of an eta-free spec, plus the ratio p_{r+1}/p_r."""
    p = eff.sup
    with np.errstate(divide='ignore', invalid='ignore'):
        log_g2 = 2 * np.log(np.abs(p.g(r)))
        g_ratio = (p.g(r + 1) / p.g(r)) ** 2
    if eff.family == 'socs':
        lam = eff.coherent.intensity
        base = -lam + r * math.log(lam) - gammaln(r + 1)
        ratio = lam / (r + 1) * g_ratio
    else:
        mu = eff.thermal.mu
        base = -math.log1p(eff.thermal.nbar) + r * math.log(mu)
        ratio = mu * g_ratio
    return base + log_g2, ratio


def choose_cutoff(spec, max_order, tolerance=None, max_cutoff=None):
    """Smallest truncation whose tail is negligible for moments up to `max_order`.

    Weights are scanned with an extra (r+1)^max_order factor so the bound also
    covers the factorial growth in high moments. Past r_star the term ratio
    decreases, so w_K q_K / (1 - q_K) bounds the tail beyond K.

    Args:
        Required - spec (SOCS|SOTS)   - state
        Required - max_order (int)    - highest moment order that will be queried
        Optional - tolerance (float)  - relative tail bound (default: config tail_tolerance)
        Optional - max_cutoff (int)   - hard cap (default: config max_cutoff)
    Returns:
        int: N_c = K + max_order + 4
    """
    tol = configFloat('tail_tolerance', tolerance)
    cap = configInt('max_cutoff', max_cutoff)
    eff = effective_state(spec)
    strength = eff.coherent.intensity if eff.family == 'socs' else eff.thermal.nbar
    if strength == 0:
        return max_order + ORDER_MARGIN

    p = eff.sup
    r_star = 0 if p.c == 0 else max(0, math.ceil(-p.s / p.c) + 1)
    total = 0.0
    start = 0
    while start <= cap:
        r = np.arange(start, start + SCAN_CHUNK, dtype=float)
        logw, ratio = _log_weights(eff, r)
        logw = logw + max_order * np.log(r + 1)
        ratio = ratio * ((r + 2) / (r + 1)) ** max_order
        w = np.exp(logw)
        cum = total + np.cumsum(w)
        with np.errstate(invalid='ignore', divide='ignore'):
            tail = w * ratio / (1 - ratio)
            ok = (r >= r_star) & (ratio < 1) & (tail <= tol * cum)
        hits = np.flatnonzero(ok)
        if hits.size:
            cutoff = int(r[hits[0]]) + max_order + ORDER_MARGIN
            if cutoff > cap:
                break
            log.debug(f'cutoff {cutoff} for {spec.family} {spec.describe()} (max_order={max_order})')
            return cutoff
        total = cum[-1]
        start += SCAN_CHUNK
    raise CutoffInfeasibleError(f'no cutoff <= {cap} makes the tail negligible for {spec.describe()}')


# -- STATE CONSTRUCTION -- #
def _log_power(x, n):
    """n*log(x) with 0^0 = 1."""
    with np.errstate(divide='ignore'):
        return np.where(n == 0, 0.0, n * np.log(x) if x > 0 else -np.inf)


def build_socs(p: SupParams, c: CoherentSpec, d, cutoff):
    """D(eta) A |alpha>, term by term: e^{-|α|^2/2} α^n/sqrt(n!) g(n) (1-eta)^n."""
    n = np.arange(cutoff + 1, dtype=float)
    a = c.alpha * d.w
    log_mag = -c.intensity / 2 + _log_power(abs(a), n) - gammaln(n + 1) / 2
    amps = np.exp(log_mag) * np.exp(1j * n * cmath.phase(a)) * p.g(n)
    pre_norm = float(np.sum(np.abs(amps) ** 2))
    if not pre_norm > DEGENERATE:
        raise DegenerateStateError(f'SOCS vector vanishes (s={p.s:g}, alpha={c.alpha:g}, eta={d.eta:g})')
    return FockVector(cutoff, amps / math.sqrt(pre_norm), pre_norm)


def build_sots(p: SupParams, th, d, cutoff):
    """D A ρ_th A† D: weights a_r g(r)^2 (1-eta)^{2r}."""
    r = np.arange(cutoff + 1, dtype=float)
    log_w = -math.log1p(th.nbar) + _log_power(th.mu, r) + _log_power(d.w, 2 * r)
    weights = np.exp(log_w) * p.g(r) ** 2
    pre_norm = float(np.sum(weights))
    if not pre_norm > DEGENERATE:
        raise DegenerateStateError(f'SOTS weights vanish (s={p.s:g}, nbar={th.nbar:g}, eta={d.eta:g})')
    return FockDiagonal(cutoff, weights / pre_norm, pre_norm)


def build_state(spec, cutoff=None, max_order=DEFAULT_MAX_ORDER):
    cutoff = cutoff if cutoff is not None else choose_cutoff(spec, max_order)
    if spec.family == 'socs':
        return build_socs(spec.sup, spec.coherent, spec.detector, cutoff)
    return build_sots(spec.sup, spec.thermal, spec.detector, cutoff)


def fock_state(n, cutoff=None):
    """|n> as a FockVector; default cutoff leaves room for order-16 moments."""
    if n < 0:
        raise InvalidArgumentError(f'photon number must be >= 0 (got {n})')
    cutoff = cutoff if cutoff is not None else n + DEFAULT_MAX_ORDER + ORDER_MARGIN
    if cutoff < n:
        raise InvalidArgumentError(f'cutoff {cutoff} < photon number {n}')
    amps = np.zeros(cutoff + 1, dtype=complex)
    amps[n] = 1
    return FockVector(cutoff, amps)


def coherent_state(alpha, cutoff=None, max_order=DEFAULT_MAX_ORDER):
    """Unoperated |alpha>: a SOCS whose SUP operator is a multiple of the identity."""
    spec = SOCS(SupParams.identity(), CoherentSpec(alpha))
    return build_state(spec, cutoff, max_order)


# -- QUERIES -- #
def _check_order(state, *orders):
    bound = state.cutoff - ORDER_MARGIN
    for k in orders:
        if k < 0:
            raise InvalidArgumentError(f'moment orders must be >= 0 (got {k})')
        if k > bound:
            raise OrderLimitError(f'order {k} exceeds cutoff margin (cutoff {state.cutoff})')


def oracle_moment(state, m, n):
    """<a†^m a^n> by direct contraction on the truncated space."""
    _check_order(state, m, n)
    if isinstance(state, FockDiagonal):
        if m != n:
            return 0j
        r = np.arange(n, state.cutoff + 1, dtype=float)
        return complex(np.sum(state.weights[n:] * np.exp(gammaln(r + 1) - gammaln(r - n + 1))))
    k = np.arange(state.cutoff - max(m, n) + 1)
    kf = k.astype(float)
    amps = state.amplitudes
    scale = np.exp(0.5 * (gammaln(kf + m + 1) + gammaln(kf + n + 1)) - gammaln(kf + 1))
    return complex(np.sum(np.conj(amps[k + m]) * amps[k + n] * scale))


def oracle_photon_distribution(state, m_max):
    """p_0..p_{m_max}; zero above the cutoff."""
    weights = state.weights
    out = np.zeros(m_max + 1)
    top = min(m_max, state.cutoff)
    out[:top + 1] = weights[:top + 1]
    return out


def oracle_photon_prob(state, m):
    if m < 0:
        raise InvalidArgumentError(f'photon number must be >= 0 (got {m})')
    return float(state.weights[m]) if m <= state.cutoff else 0.0


def _coherent_overlaps(beta, cutoff):
    """<n|beta> for every n <= cutoff, broadcast over beta."""
    beta = np.asarray(beta, dtype=complex)[..., None]
    n = np.arange(cutoff + 1, dtype=float)
    b = np.abs(beta)
    with np.errstate(divide='ignore', invalid='ignore'):
        log_pow = np.where(n == 0, 0.0, n * np.log(b))
    mag = np.exp(log_pow - gammaln(n + 1) / 2 - b ** 2 / 2)
    return mag * np.exp(1j * n * np.angle(beta))


def oracle_husimi(state, beta):
    """(1/pi) <beta|rho|beta>"""
    overlaps = _coherent_overlaps(beta, state.cutoff)
    if isinstance(state, FockDiagonal):
        q = np.sum(state.weights * np.abs(overlaps) ** 2, axis=-1)
    else:
        q = np.abs(np.sum(np.conj(overlaps) * state.amplitudes, axis=-1)) ** 2
    q = q / math.pi
    return q if q.ndim else float(q)


def quadrature_matrix(cutoff):
    """Truncated X = (a + a†)/sqrt(2) as a sparse tridiagonal matrix."""
    off = np.sqrt(np.arange(1, cutoff + 1) / 2)
    return diags([off, off], [1, -1], format='csr')


def oracle_quadrature_moment(state, k):
    """<X^k> from powers of the truncated quadrature matrix."""
    if k < 0:
        raise InvalidArgumentError(f'quadrature power must be >= 0 (got {k})')
    if k > MAX_QUADRATURE_POWER:
        raise OrderLimitError(f'quadrature power {k} exceeds bound {MAX_QUADRATURE_POWER}')
    _check_order(state, k)
    x = quadrature_matrix(state.cutoff)
    if isinstance(state, FockDiagonal):
        xk = diags([np.ones(state.cutoff + 1)], [0], format='csr')
        for _ in range(k):
            xk = xk @ x
        return float(np.sum(state.weights * xk.diagonal()))
    left = right = state.amplitudes
    for _ in range(k // 2):
        left = x @ left
    for _ in range(k - k // 2):
        right = x @ right
    return float(np.vdot(left, right).real)


def dump_state(state):
    """Line-oriented view of a truncated state: (n, re(amp), im(amp)) or (r, weight)."""
    if isinstance(state, FockDiagonal):
        return pd.DataFrame({'r': np.arange(state.cutoff + 1), 'weight': state.weights})
    return pd.DataFrame({'n': np.arange(state.cutoff + 1),
                         're(amp)': state.amplitudes.real,
                         'im(amp)': state.amplitudes.imag})


class OracleProvider(object):
    """
    MomentProvider backed by a truncated Fock state

    Usage:
        from supoptics.oracle_api import OracleProvider
        from supoptics.states_api import makeState

        op = OracleProvider(makeState('sots', s=0.6, gamma=1.0))
        op.moment(2, 2)
    """
    backend = 'oracle'
    photonBound = 4096

    def __init__(self, spec=None, state=None, cutoff=None, max_order=DEFAULT_MAX_ORDER):
        """
        Args:
            Optional - spec (SOCS|SOTS)               - state description to build
            Optional - state (FockVector|FockDiagonal) - prebuilt truncated state (used when spec is None)
            Optional - cutoff (int)                   - override choose_cutoff()
            Optional - max_order (int)                - highest moment order to support
        """
        if state is None:
            if spec is None:
                raise InvalidArgumentError('OracleProvider needs a spec or a state')
            state = build_state(spec, cutoff, max_order)
        self.spec = spec
        self.state = state
        self.orderBound = state.cutoff - ORDER_MARGIN
        self._moments = {}

    @classmethod
    def fromState(cls, state):
        return cls(state=state)

    def moment(self, m, n):
        key = (m, n)
        if key not in self._moments:
            self._moments[key] = oracle_moment(self.state, m, n)
        return self._moments[key]

    def photonProb(self, m):
        return oracle_photon_prob(self.state, m)

    def photonDistribution(self, m_max):
        return oracle_photon_distribution(self.state, m_max)

    def quadratureMean(self):
        return (self.moment(1, 0) + self.moment(0, 1)) / math.sqrt(2)

    def quadratureMoment(self, k):
        return oracle_quadrature_moment(self.state, k)

    def husimi(self, beta):
        return oracle_husimi(self.state, beta)
