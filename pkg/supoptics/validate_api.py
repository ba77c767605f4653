"""Closed form vs. truncated Fock oracle, over the standard parameter grid."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List
import itertools
import logging
import math

import numpy as np
from rich.console import Console
from rich.table import Table

from .algebra_api import pochhammer_half
from .errors import UndefinedWitnessError
from .oracle_api import OracleProvider, coherent_state, fock_state
from .states_api import ClosedFormProvider, makeState
from .sweep_api import eta_report
from .utils import fmt_complex
from .witness_api import WitnessAPI, husimi, husimi_integral, husimi_zero_locus, klyshko_bracket


log = logging.getLogger(__name__)

GRID_S = (0.2, 0.5, 0.8)
GRID_ALPHA = (0.5, 1.0, 2.0)
GRID_PHASE = (0.0, math.pi / 4)
GRID_NBAR = (0.5, 1.0, 2.0)
GRID_ETA = (0.0, 0.25, 0.5)
GRID_ORDER = 6

REL_TOL = 1e-9
ABS_FLOOR = 1e-12
WITNESS_TOL = 1e-10


def rel_err(value, reference):
    """Error measured so that <= REL_TOL means |v - r| <= max(REL_TOL |r|, ABS_FLOOR)."""
    return abs(value - reference) / max(abs(reference), ABS_FLOOR / REL_TOL)


def standard_grid():
    """(spec, label) for every state of the standard grid."""
    for s, eta in itertools.product(GRID_S, GRID_ETA):
        for gamma, phase in itertools.product(GRID_ALPHA, GRID_PHASE):
            spec = makeState('socs', s, gamma, phase=phase, eta=eta)
            yield spec, _label(spec)
        for nbar in GRID_NBAR:
            spec = makeState('sots', s, nbar, eta=eta)
            yield spec, _label(spec)


def _label(spec):
    amplitude = (f'alpha={fmt_complex(spec.coherent.alpha)}' if spec.family == 'socs'
                 else f'nbar={spec.thermal.nbar:g}')
    eta = f' eta={spec.detector.eta:g}' if spec.detector.eta else ''
    return f'{spec.family} s={spec.sup.s:g} {amplitude}{eta}'


@dataclass
class CheckResult:
    name: str
    tolerance: float
    max_err: float = 0.0
    failures: List[str] = field(default_factory=list)
    info: str = ''

    @property
    def passed(self):
        return not self.failures

    def record(self, err, line, tolerance=None):
        tol = self.tolerance if tolerance is None else tolerance
        self.max_err = max(self.max_err, err)
        if not err <= tol:
            self.failures.append(f'{line} err={err:.3g}')


class Validator(object):
    """
    Run every cross-check; provider classes are injectable so a perturbed build can be tested

    Usage:
        from supoptics.validate_api import Validator

        v = Validator()
        ok = v.run()
        v.printSummary()
    """
    def __init__(self, closed_provider=ClosedFormProvider, oracle_provider=OracleProvider):
        self.closed_provider = closed_provider
        self.oracle_provider = oracle_provider
        self.results = []

    def _pairs(self):
        for spec, label in standard_grid():
            yield spec, label, self.closed_provider(spec), self.oracle_provider(spec)

    def run(self):
        self.results = [
            self.checkMoments(),
            self.checkNormalization(),
            self.checkCoherentBoundary(),
            self.checkCrossWitness(),
            self.checkQuadraturePaths(),
            self.checkKlyshko(),
            self.checkHusimi(),
            self.checkAgarwalTara(),
            self.checkLowerOrderSqueezing(),
            self.checkDetectorReduction(),
            self.checkEtaReport(),
            self.searchHigherOrderOnly(),
        ]
        for r in self.results:
            for line in r.failures:
                log.error(f'{r.name}: {line}')
        return all(r.passed for r in self.results)

    # -- CHECKS -- #
    def checkMoments(self):
        """Closed-form vs oracle <a†^m a^n>, m, n <= 6."""
        res = CheckResult('moments', REL_TOL)
        for spec, label, closed, oracle in self._pairs():
            for m, n in itertools.product(range(GRID_ORDER + 1), repeat=2):
                res.record(rel_err(closed.moment(m, n), oracle.moment(m, n)), f'{label} m={m} n={n}')
        return res

    def checkNormalization(self):
        res = CheckResult('normalization', 1e-12)
        for spec, label, closed, oracle in self._pairs():
            res.record(abs(closed.moment(0, 0) - 1), f'{label} m=0 n=0')
            total = float(np.sum(closed.photonDistribution(oracle.state.cutoff)))
            res.record(abs(total - 1), f'{label} sum(p)', 1e-10)
        return res

    def checkCoherentBoundary(self):
        """Unoperated coherent state sits on every boundary (Mandel Q only for l = 2, 3)."""
        res = CheckResult('coherent boundary', WITNESS_TOL)
        for alpha in GRID_ALPHA:
            api = WitnessAPI(OracleProvider.fromState(coherent_state(alpha)))
            mean = alpha ** 2
            x2 = api.quadratureMoments(2)[2]
            for l in range(2, 9):
                scale = max(1.0, mean ** l)
                label = f'coherent alpha={alpha:g} l={l}'
                if l <= 3:
                    res.record(abs(api.mandelQ(l).value) / scale, f'{label} q')
                res.record(abs(api.hoa(l).value) / scale, f'{label} hoa')
                res.record(abs(api.hosps(l).value) / scale, f'{label} hosps')
                if l % 2 == 0:
                    hos = api.hos(l)
                    spread = abs(hos.value) * float(pochhammer_half(l))
                    res.record(spread / max(1.0, x2 ** (l / 2)), f'{label} hos')
        return res

    def checkCrossWitness(self):
        """hosps(2) = hoa(2) = <N> Q(2)"""
        res = CheckResult('hosps(2)=hoa(2)=<N>Q(2)', WITNESS_TOL)
        for spec, label in standard_grid():
            api = WitnessAPI(self.closed_provider(spec))
            mean = api.numberMoments(1)[0][1]
            scale = max(1.0, mean ** 2)
            hoa = api.hoa(2).value
            res.record(abs(api.hosps(2).value - hoa) / scale, f'{label} hosps-hoa')
            res.record(abs(mean * api.mandelQ(2).value - hoa) / scale, f'{label} <N>Q-hoa')
        return res

    def checkQuadraturePaths(self):
        """Normal-ordered expansion vs quadrature-matrix powers, <X^k> for k <= 8."""
        res = CheckResult('quadrature paths', WITNESS_TOL)
        for spec, label, closed, oracle in self._pairs():
            expanded = WitnessAPI(closed).quadratureMoments(8)
            for k in range(9):
                reference = oracle.quadratureMoment(k)
                res.record(abs(expanded[k] - reference) / max(1.0, abs(reference)), f'{label} k={k}')
        return res

    def checkKlyshko(self):
        """Sign pattern at |alpha| = nbar = 2, s = 0.2, plus bracket/B(m) sign agreement."""
        res = CheckResult('klyshko', 0.0)
        pattern = [True, True] + [False] * 5
        for family in ('socs', 'sots'):
            spec = makeState(family, 0.2, 2.0)
            api = WitnessAPI(self.closed_provider(spec))
            for m, negative in enumerate(pattern):
                b = api.klyshko(m).value
                shown = b if family == 'sots' else klyshko_bracket(spec, m, printed=True)
                res.record(0.0 if (shown < 0) == negative else 1.0, f'{family} s=0.2 gamma=2 m={m} value={shown:.3g}')
        for spec, label in standard_grid():
            api = WitnessAPI(self.closed_provider(spec))
            for m in range(7):
                b = api.klyshko(m).value
                bracket = klyshko_bracket(spec, m)
                res.record(0.0 if np.sign(b) == np.sign(bracket) else 1.0, f'{label} m={m} sign')
        return res

    def checkHusimi(self):
        res = CheckResult('husimi', 1e-6)
        spec = makeState('socs', 0.2, 1.0)
        beta0 = husimi_zero_locus(spec)
        res.record(float(husimi(spec, beta0)), 'socs s=0.2 alpha=1 Q(beta0)', 1e-15)
        for spec, label in standard_grid():
            res.record(abs(husimi_integral(spec) - 1), f'{label} integral')
        return res

    def checkAgarwalTara(self):
        res = CheckResult('agarwal-tara', WITNESS_TOL)
        for spec, label in standard_grid():
            a3 = WitnessAPI(self.closed_provider(spec)).agarwalTara()
            if a3.note == 'singular':
                continue
            low = max(0.0, -1 - a3.value)
            high = max(0.0, a3.value) if spec.family == 'socs' else 0.0
            res.record(max(low, high), f'{label} A3={a3.value:.6g}')
        vacuum = WitnessAPI(self.closed_provider(makeState('socs', 0.5, 0.0))).agarwalTara()
        res.record(abs(vacuum.value), 'socs s=0.5 alpha=0+0i A3', 1e-12)
        for n in (2, 3):
            a3 = WitnessAPI(OracleProvider.fromState(fock_state(n))).agarwalTara()
            res.record(abs(a3.value + 1), f'fock n={n} A3')
        return res

    def checkLowerOrderSqueezing(self):
        """S^(2) >= 0 for SOTS on gamma in [0, 2]; SOCS minimum reported only."""
        res = CheckResult('hos l=2 (sots)', WITNESS_TOL)
        socs_min = math.inf
        for s in GRID_S:
            for gamma in np.linspace(0, 2, 41):
                sots = WitnessAPI(self.closed_provider(makeState('sots', s, gamma))).hos(2).value
                res.record(max(0.0, -sots), f'sots s={s:g} nbar={gamma:g} S2={sots:.3g}')
                socs_min = min(socs_min, WitnessAPI(self.closed_provider(makeState('socs', s, gamma))).hos(2).value)
        res.info = f'socs min S2 = {socs_min:.6g}'
        return res

    def checkDetectorReduction(self):
        """Folded detector (closed form) vs literal D(eta) (oracle), and the eta = 1 vacuum limit."""
        res = CheckResult('detector', 1e-12)
        for spec, label, closed, oracle in self._pairs():
            if not spec.detector.eta:
                continue
            folded, literal = WitnessAPI(closed), WitnessAPI(oracle)
            scale = max(1.0, folded.numberMoments(1)[0][1] ** 4)
            for l in (2, 3, 4):
                res.record(abs(folded.hoa(l).value - literal.hoa(l).value) / scale, f'{label} hoa l={l}', REL_TOL)
        for family, s in itertools.product(('socs', 'sots'), GRID_S):
            closed = self.closed_provider(makeState(family, s, 1.0, eta=1.0))
            res.record(abs(closed.photonProb(0) - 1), f'{family} s={s:g} eta=1 p0')
            res.record(abs(closed.moment(0, 0) - 1), f'{family} s={s:g} eta=1 m=0 n=0')
            try:
                WitnessAPI(closed).mandelQ(2)
                res.failures.append(f'{family} s={s:g} eta=1 Mandel Q should be undefined')
            except UndefinedWitnessError:
                pass
        return res

    def checkEtaReport(self):
        """The printed-formula report runs and flags the vanishing printed N2^eta at eta = 0."""
        res = CheckResult('eta report', 0.0)
        df = eta_report()
        rows = df.groupby(df['params'].str.split().str[0]).size()
        flagged = df[df['params'].str.startswith('sots') & df['params'].str.endswith('eta=0')]
        for family in ('socs', 'sots'):
            res.record(0.0 if rows.get(family, 0) // 3 >= 27 else 1.0, f'{family} grid points')
        res.record(0.0 if flagged['note'].str.startswith('degenerate').all() else 1.0, 'sots eta=0 flagged')
        res.info = f'max |printed - definition| = {df["abs_diff"].max():.3g}'
        return res

    def searchHigherOrderOnly(self):
        """Informational: gamma in (0, 4] with Q(5) < 0 <= Q(2)."""
        res = CheckResult('q5<0<=q2 search', math.inf)
        found = []
        for family in ('socs', 'sots'):
            for gamma in np.linspace(0.05, 4, 80):
                api = WitnessAPI(self.closed_provider(makeState(family, 0.2, gamma)))
                if api.mandelQ(5).value < 0 <= api.mandelQ(2).value:
                    found.append(f'{family} gamma={gamma:g}')
                    break
        res.info = ', '.join(found) if found else 'not found'
        return res

    def printSummary(self, console=None):
        console = console or Console()
        table = Table(title='closed form vs oracle')
        for col in ('check', 'max err', 'tolerance', 'status', 'info'):
            table.add_column(col)
        for r in self.results:
            tol = '-' if math.isinf(r.tolerance) else f'{r.tolerance:g}'
            table.add_row(r.name, f'{r.max_err:.3g}', tol, 'PASS' if r.passed else 'FAIL', r.info)
        console.print(table)
        for r in self.results:
            for line in r.failures:
                console.print(line, markup=False, highlight=False)
