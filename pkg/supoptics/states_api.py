"""SUP-operated coherent (SOCS) and thermal (SOTS) states in closed form.

A = s a a† + t a† a is diagonal in the Fock basis, A|n> = g(n)|n> with
g(n) = s + (s+t) n. Everything here is expressed through g and the
unoperated field (coherent amplitude or thermal mean photon number).
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
import cmath
import logging
import math

import numpy as np
from scipy.special import gammaln

from .errors import (CutoffInfeasibleError, DegenerateDenominatorError, DegenerateStateError,
                     InvalidArgumentError, OrderLimitError)
from .utils import configFloat, configInt


log = logging.getLogger(__name__)

DEGENERATE = 1e-300
UNIT_TOLERANCE = 1e-12
MAX_MOMENT_ORDER = 64
MAX_PHOTON_NUMBER = 4096
SERIES_CHUNK = 512


# -- STATE DESCRIPTIONS -- #
@dataclass(frozen=True)
class SupParams:
    """SUP operator parameters (s, t) with s^2 + t^2 = 1; t is explicit because its sign matters."""
    s: float
    t: float

    def __post_init__(self):
        object.__setattr__(self, 's', float(self.s))
        object.__setattr__(self, 't', float(self.t))
        if not (math.isfinite(self.s) and math.isfinite(self.t)):
            raise InvalidArgumentError(f'SUP parameters must be finite (s={self.s}, t={self.t})')
        if abs(self.s ** 2 + self.t ** 2 - 1) > UNIT_TOLERANCE:
            raise InvalidArgumentError(f's^2 + t^2 must be 1 (s={self.s}, t={self.t})')

    @classmethod
    def fromS(cls, s, t=None):
        """t defaults to +sqrt(1 - s^2)."""
        if t is None:
            if abs(s) > 1:
                raise InvalidArgumentError(f'|s| must be <= 1 when t is derived (s={s})')
            t = math.sqrt(max(0.0, 1 - s * s))
        return cls(s, t)

    @classmethod
    def identity(cls):
        """s = -t = 1/sqrt(2): A = s·1, i.e. the unoperated state."""
        return cls(math.sqrt(0.5), -math.sqrt(0.5))

    @property
    def c(self):
        return self.s + self.t

    def g(self, n):
        """Eigenvalue of A on |n> (works on numpy arrays)."""
        return self.s + self.c * n


@dataclass(frozen=True)
class CoherentSpec:
    alpha: complex

    def __post_init__(self):
        object.__setattr__(self, 'alpha', complex(self.alpha))
        if not cmath.isfinite(self.alpha):
            raise InvalidArgumentError(f'alpha must be finite (got {self.alpha})')

    @property
    def intensity(self):
        """|alpha|^2"""
        return abs(self.alpha) ** 2


@dataclass(frozen=True)
class ThermalSpec:
    nbar: float

    def __post_init__(self):
        object.__setattr__(self, 'nbar', float(self.nbar))
        if not (math.isfinite(self.nbar) and self.nbar >= 0):
            raise InvalidArgumentError(f'nbar must be finite and >= 0 (got {self.nbar})')

    @property
    def mu(self):
        """Geometric ratio n̄/(1+n̄)."""
        return self.nbar / (1 + self.nbar)

    def weight(self, r):
        """a_r = (1/(1+n̄)) (n̄/(1+n̄))^r"""
        return self.mu ** r / (1 + self.nbar)


@dataclass(frozen=True)
class DetectorSpec:
    eta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, 'eta', float(self.eta))
        if not 0 <= self.eta <= 1:
            raise InvalidArgumentError(f'eta must lie in [0, 1] (got {self.eta})')

    @property
    def w(self):
        """Per-photon attenuation 1 - eta."""
        return 1 - self.eta


@dataclass(frozen=True)
class SOCS:
    sup: SupParams
    coherent: CoherentSpec
    detector: DetectorSpec = field(default_factory=DetectorSpec)
    family = 'socs'

    @property
    def gamma(self):
        return abs(self.coherent.alpha)

    def describe(self):
        return f's={self.sup.s:g} t={self.sup.t:g} alpha={self.coherent.alpha:g} eta={self.detector.eta:g}'


@dataclass(frozen=True)
class SOTS:
    sup: SupParams
    thermal: ThermalSpec
    detector: DetectorSpec = field(default_factory=DetectorSpec)
    family = 'sots'

    @property
    def gamma(self):
        return self.thermal.nbar

    def describe(self):
        return f's={self.sup.s:g} t={self.sup.t:g} nbar={self.thermal.nbar:g} eta={self.detector.eta:g}'


FAMILIES = ('socs', 'sots')


def makeState(family, s, gamma, t=None, phase=0.0, eta=0.0):
    """Build a StateSpec from the figures' conventions.

    Args:
        Required - family (str)  - "socs" or "sots"
        Required - s (float)     - SUP parameter s
        Required - gamma (float) - |alpha| (socs) or n̄ (sots)
        Optional - t (float)     - SUP parameter t (default +sqrt(1-s^2))
        Optional - phase (float) - phase of alpha in radians (socs only)
        Optional - eta (float)   - detector quantum efficiency parameter
    Returns:
        SOCS | SOTS
    """
    sup = SupParams.fromS(s, t)
    detector = DetectorSpec(eta)
    if family == 'socs':
        if gamma < 0:
            raise InvalidArgumentError(f'gamma = |alpha| must be >= 0 (got {gamma})')
        return SOCS(sup, CoherentSpec(cmath.rect(gamma, phase)), detector)
    if family == 'sots':
        return SOTS(sup, ThermalSpec(gamma), detector)
    raise InvalidArgumentError(f'unknown state family "{family}" (expected one of {FAMILIES})')


def _check_order(*orders, bound=MAX_MOMENT_ORDER):
    for k in orders:
        if k < 0:
            raise InvalidArgumentError(f'moment orders must be >= 0 (got {k})')
        if k > bound:
            raise OrderLimitError(f'moment order {k} exceeds bound {bound}')


def _check_normalization(value, what):
    if not value > DEGENERATE:
        raise DegenerateStateError(f'{what} = {value!r}: the state is the zero vector')
    return value


# -- NORMALIZATION -- #
def normalization_socs(p: SupParams, c: CoherentSpec):
    """N1 = s^2 + (1+2s^2+4st)|α|^2 + (1+2st)|α|^4, written with (s+t)^2 = 1+2st."""
    lam = c.intensity
    value = p.s ** 2 + (p.c ** 2 + 2 * p.s * p.c) * lam + p.c ** 2 * lam ** 2
    return _check_normalization(value, 'N1')


def normalization_sots(p: SupParams, th: ThermalSpec):
    """N2 = s^2(1+n̄)(1+2n̄) + 4st n̄(1+n̄) + t^2 n̄(1+2n̄) = Σ_r a_r g(r)^2"""
    nb = th.nbar
    value = p.s ** 2 * (1 + nb) * (1 + 2 * nb) + 4 * p.s * p.t * nb * (1 + nb) + p.t ** 2 * nb * (1 + 2 * nb)
    return _check_normalization(value, 'N2')


# -- THERMAL SERIES -- #
def thermal_series(p: SupParams, th: ThermalSpec, n, extra=None, tolerance=None, max_terms=None):
    """Σ_r a_r r!/(r-n)! g(r)^2 [extra(r)], summed until the geometric tail is negligible.

    extra, when given, must map an array of r to weights in [0, 1]; the tail
    bound is taken on the unweighted terms.
    """
    tol = configFloat('tail_tolerance', tolerance)
    cap = configInt('max_terms', max_terms)
    weigh = extra if extra is not None else np.ones_like

    if th.nbar == 0:
        return float(p.g(0) ** 2 * weigh(np.zeros(1))[0]) if n == 0 else 0.0

    mu = th.mu
    log_mu = math.log(mu)
    log_a0 = -math.log1p(th.nbar)
    # -- beyond r_star the consecutive-term ratio decreases monotonically
    r_star = n if p.c == 0 else max(n, math.ceil(-p.s / p.c) + 1)

    total = 0.0
    start = n
    while True:
        r = np.arange(start, start + SERIES_CHUNK, dtype=float)
        with np.errstate(divide='ignore'):
            log_g2 = 2 * np.log(np.abs(p.g(r)))
        terms = np.exp(log_a0 + r * log_mu + gammaln(r + 1) - gammaln(r - n + 1) + log_g2)
        total += float(np.sum(terms * weigh(r)))

        last = r[-1]
        g_last = p.g(last)
        if last >= r_star and g_last != 0:
            ratio = mu * (last + 1) / (last + 1 - n) * (p.g(last + 1) / g_last) ** 2
            if ratio < 1 and terms[-1] * ratio / (1 - ratio) <= tol * abs(total):
                log.debug(f'thermal series n={n} converged after {int(last) + 1} terms')
                return total

        start += SERIES_CHUNK
        if start > cap:
            raise CutoffInfeasibleError(f'thermal series did not converge within {cap} terms (nbar={th.nbar})')


# -- GENERALIZED MOMENTS -- #
def moment_socs(m, n, p: SupParams, c: CoherentSpec):
    """<a†^m a^n> for SOCS:

    N1^-1 α*^m α^n [(s+t)^2{mn + (m+n+1)|α|^2 + |α|^4} + s(s+t)(m+n+2|α|^2) + s^2]
    """
    _check_order(m, n)
    norm = normalization_socs(p, c)
    lam = c.intensity
    bracket = (p.c ** 2 * (m * n + (m + n + 1) * lam + lam ** 2)
               + p.s * p.c * (m + n + 2 * lam)
               + p.s ** 2)
    return c.alpha.conjugate() ** m * c.alpha ** n * bracket / norm


def moment_sots(m, n, p: SupParams, th: ThermalSpec):
    """<a†^m a^n> for SOTS: δ_mn N2^-1 Σ_r a_r r!/(r-n)! g(r)^2"""
    _check_order(m, n)
    norm = normalization_sots(p, th)
    if m != n:
        return 0.0
    return thermal_series(p, th, n) / norm


def effective_state(spec):
    """Fold the detector into the field: D(η) commutes with A.

    SOCS: α -> (1-η)α.  SOTS: μ -> μ(1-η)^2, i.e. n̄ -> n̄(1-η)^2 / (1 + n̄ - n̄(1-η)^2).
    """
    eta = spec.detector.eta
    if eta == 0:
        return spec
    w = 1 - eta
    if spec.family == 'socs':
        return replace(spec, coherent=CoherentSpec(w * spec.coherent.alpha), detector=DetectorSpec(0.0))
    nb = spec.thermal.nbar
    nb_eff = nb * w ** 2 / (1 + nb - nb * w ** 2)
    return replace(spec, thermal=ThermalSpec(nb_eff), detector=DetectorSpec(0.0))


def normalization(spec):
    """N1 or N2 of the η-free (effective) state."""
    eff = effective_state(spec)
    if eff.family == 'socs':
        return normalization_socs(eff.sup, eff.coherent)
    return normalization_sots(eff.sup, eff.thermal)


def moment(spec, m, n):
    eff = effective_state(spec)
    if eff.family == 'socs':
        return moment_socs(m, n, eff.sup, eff.coherent)
    return moment_sots(m, n, eff.sup, eff.thermal)


# -- PHOTON STATISTICS -- #
def photon_distribution(spec, m_max):
    """p_0 .. p_{m_max} as a numpy array."""
    _check_order(m_max, bound=MAX_PHOTON_NUMBER)
    eff = effective_state(spec)
    p = eff.sup
    m = np.arange(m_max + 1, dtype=float)
    with np.errstate(divide='ignore'):
        log_g2 = 2 * np.log(np.abs(p.g(m)))
    if eff.family == 'socs':
        norm = normalization_socs(p, eff.coherent)
        lam = eff.coherent.intensity
        if lam == 0:
            return np.where(m == 0, 1.0, 0.0)
        log_w = -lam + m * math.log(lam) - gammaln(m + 1)
    else:
        norm = normalization_sots(p, eff.thermal)
        if eff.thermal.nbar == 0:
            return np.where(m == 0, 1.0, 0.0)
        log_w = -math.log1p(eff.thermal.nbar) + m * math.log(eff.thermal.mu)
    return np.exp(log_w + log_g2 - math.log(norm))


def photon_probability(spec, m):
    """p_m = <m|ρ|m>.

    SOCS: N1^-1 e^{-|α|^2} |α|^{2m}/m! g(m)^2.  SOTS: N2^-1 a_m g(m)^2.
    """
    _check_order(m, bound=MAX_PHOTON_NUMBER)
    return float(photon_distribution(spec, m)[m])


# -- HUSIMI Q IN CLOSED FORM -- #
def husimi_socs(p: SupParams, c: CoherentSpec, beta):
    """Q1 = (1/π) N1^-1 |s + (s+t) α β*|^2 exp(-|α|^2 - |β|^2 + αβ* + α*β)"""
    beta = np.asarray(beta, dtype=complex)
    norm = normalization_socs(p, c)
    z = c.alpha * np.conj(beta)
    q = np.abs(p.s + p.c * z) ** 2 * np.exp(-c.intensity - np.abs(beta) ** 2 + 2 * z.real) / (math.pi * norm)
    return q if q.ndim else float(q)


def husimi_sots(p: SupParams, th: ThermalSpec, beta):
    """Q2 = e^{-|β|^2/(1+n̄)} [{s + (s+t)x}^2 + (s+t)^2 x] / (π (1+n̄) N2),  x = n̄|β|^2/(1+n̄)"""
    beta = np.asarray(beta, dtype=complex)
    norm = normalization_sots(p, th)
    b2 = np.abs(beta) ** 2
    x = th.mu * b2
    q = np.exp(-b2 / (1 + th.nbar)) * ((p.s + p.c * x) ** 2 + p.c ** 2 * x) / (math.pi * (1 + th.nbar) * norm)
    return q if q.ndim else float(q)


# -- PRINTED DETECTOR-EFFICIENCY FORMULAS (comparison path only) -- #
def _bracket_socs_eta(p, y):
    return (p.s + p.c * y) ** 2 + p.c ** 2 * y


def _bracket_sots_eta(p, y):
    return (p.s + p.c * y ** 2) ** 2 + p.c ** 2 * y ** 2


def paper_normalization_socs_eta(p: SupParams, c: CoherentSpec, d: DetectorSpec):
    """N1^η exactly as printed."""
    lam, w, eta = c.intensity, d.w, d.eta
    value = (_bracket_socs_eta(p, lam)
             + _bracket_socs_eta(p, w * lam) * math.exp(-eta * lam)
             + _bracket_socs_eta(p, w ** 2 * lam) * math.exp((eta ** 2 - 2 * eta) * lam))
    if not value > DEGENERATE:
        raise DegenerateDenominatorError(f'printed N1^eta = {value!r}')
    return value


def paper_moment_socs_eta(m, n, p: SupParams, c: CoherentSpec, d: DetectorSpec):
    """<a†^m a^n> for the detector-attenuated SOCS, using the printed closed form verbatim."""
    _check_order(m, n)
    norm = paper_normalization_socs_eta(p, c, d)
    lam, w, eta = c.intensity, d.w, d.eta
    bracket = (_bracket_socs_eta(p, lam)
               + (w ** m + w ** n) * _bracket_socs_eta(p, w * lam) * math.exp(-eta * lam)
               + w ** (m + n) * _bracket_socs_eta(p, w ** 2 * lam) * math.exp((eta ** 2 - 2 * eta) * lam))
    return c.alpha.conjugate() ** m * c.alpha ** n * bracket / norm


def paper_normalization_sots_eta(p: SupParams, th: ThermalSpec, d: DetectorSpec):
    """N2^η exactly as printed; it vanishes identically at η = 0."""
    mu = th.mu
    theta = mu * d.w
    zeta = mu * d.w ** 2
    value = (_bracket_sots_eta(p, mu) * math.exp(mu)
             - 2 * _bracket_sots_eta(p, theta) * math.exp(theta)
             + _bracket_sots_eta(p, zeta) * math.exp(zeta)) / (1 + th.nbar)
    if not value > DEGENERATE:
        raise DegenerateDenominatorError(f'printed N2^eta = {value!r} (eta={d.eta:g})')
    return value


def paper_moment_sots_eta(n, p: SupParams, th: ThermalSpec, d: DetectorSpec):
    """<a†^n a^n> for the detector-attenuated SOTS using the printed {1-(1-η)^r}^2 weights."""
    _check_order(n)
    norm = paper_normalization_sots_eta(p, th, d)
    w = d.w
    series = thermal_series(p, th, n, extra=lambda r: (1 - w ** r) ** 2)
    return series / norm


# -- MOMENT PROVIDER -- #
class ClosedFormProvider(object):
    """MomentProvider backed by the closed-form moments.

    Usage:
        from supoptics.states_api import ClosedFormProvider, makeState

        mp = ClosedFormProvider(makeState('socs', s=0.2, gamma=1.0))
        mp.moment(1, 1)
    """
    backend = 'closed'
    orderBound = MAX_MOMENT_ORDER
    photonBound = MAX_PHOTON_NUMBER

    def __init__(self, spec):
        self.spec = spec
        self.effective = effective_state(spec)
        self.norm = normalization(self.effective)
        self._moments = {}

    def moment(self, m, n):
        key = (m, n)
        if key not in self._moments:
            self._moments[key] = complex(moment(self.effective, m, n))
        return self._moments[key]

    def photonProb(self, m):
        return photon_probability(self.effective, m)

    def photonDistribution(self, m_max):
        return photon_distribution(self.effective, m_max)

    def quadratureMean(self):
        """<X> = (<a†> + <a>)/sqrt(2), complex as computed."""
        return (self.moment(1, 0) + self.moment(0, 1)) / math.sqrt(2)

    def husimi(self, beta):
        eff = self.effective
        if eff.family == 'socs':
            return husimi_socs(eff.sup, eff.coherent, beta)
        return husimi_sots(eff.sup, eff.thermal, beta)
