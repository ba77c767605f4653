"""Parameter sweeps and the figure presets built on them.

A sweep walks one axis (gamma = |alpha| or nbar, or the SUP parameter s),
evaluates a set of (criterion, order) witnesses per point on one or both
backends, and returns a DataFrame in grid order.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple
import logging
import math

import numpy as np
import pandas as pd
from rich.console import Console
from rich.progress import BarColumn, Progress, TextColumn, TimeRemainingColumn

from .errors import DegenerateStateError, InvalidArgumentError, UndefinedWitnessError
from .states_api import (FAMILIES, ClosedFormProvider, makeState, paper_moment_socs_eta,
                         paper_moment_sots_eta)
from .utils import configInt, to_csv
from .witness_api import BACKENDS, CRITERIA, WitnessAPI, husimi, makeProvider


log = logging.getLogger(__name__)

AXES = ('gamma', 's')


@dataclass(frozen=True)
class SweepJob:
    """One sweep: `axis` runs over linspace(*span), the other parameter stays fixed."""
    family: str
    columns: Tuple[Tuple[str, int], ...]
    span: Tuple[float, float, int] = (0.0, 4.0, 81)
    s: float = 0.2
    gamma: float = 1.0
    t: Optional[float] = None
    phase: float = 0.0
    eta: float = 0.0
    backend: str = 'closed'
    axis: str = 'gamma'

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidArgumentError(f'unknown state family "{self.family}"')
        if self.axis not in AXES:
            raise InvalidArgumentError(f'unknown sweep axis "{self.axis}" (expected one of {AXES})')
        if self.backend not in BACKENDS + ('both',):
            raise InvalidArgumentError(f'unknown backend "{self.backend}"')
        start, stop, count = self.span
        if int(count) < 2:
            raise InvalidArgumentError(f'a sweep needs at least 2 points (got {count})')
        if not (math.isfinite(start) and math.isfinite(stop)):
            raise InvalidArgumentError('sweep range must be finite')
        if not self.columns:
            raise InvalidArgumentError('a sweep needs at least one criterion/order column')
        for criterion, _ in self.columns:
            if criterion not in CRITERIA:
                raise InvalidArgumentError(f'unknown criterion "{criterion}"')

    @property
    def backends(self):
        return BACKENDS if self.backend == 'both' else (self.backend,)

    @property
    def grid(self):
        start, stop, count = self.span
        return np.linspace(start, stop, int(count))

    def columnNames(self):
        return [f'{c}_l{o}_{b}' for b in self.backends for c, o in self.columns]

    def specAt(self, x):
        if self.axis == 'gamma':
            return makeState(self.family, self.s, x, self.t, self.phase, self.eta)
        return makeState(self.family, x, self.gamma, self.t, self.phase, self.eta)


class SweepAPI(object):
    """
    Evaluate a SweepJob, rows always in grid order

    Points run on a thread pool of `workers` threads (config default 1). The
    witnesses are pure-Python Fraction arithmetic and hold the GIL, so more
    workers only overlap numpy/scipy calls; they never reorder rows.

    Usage:
        from supoptics.sweep_api import SweepAPI, SweepJob

        job = SweepJob('socs', columns=(('q', 2), ('q', 5)), s=0.2)
        df = SweepAPI(job).run()
    """
    def __init__(self, job: SweepJob, workers=None, show_progress=True):
        self.job = job
        self.workers = configInt('workers', workers)
        self.show_progress = show_progress
        self.undefined = 0

    def point(self, x):
        """Row for one grid value; undefined witnesses are NaN (empty in CSV)."""
        job = self.job
        row = {job.axis: x}
        names = iter(job.columnNames())
        for backend in job.backends:
            try:
                api = WitnessAPI(makeProvider(job.specAt(x), backend))
            except DegenerateStateError as e:
                log.debug(f'{job.axis}={x:g}: {e}')
                api = None
            for criterion, order in job.columns:
                row[next(names)] = self._value(api, criterion, order, x)
        return row

    def _value(self, api, criterion, order, x):
        if api is None:
            return math.nan
        try:
            result = api.evaluate(criterion, order)
        except (UndefinedWitnessError, DegenerateStateError) as e:
            log.debug(f'{self.job.axis}={x:g} {criterion} l={order}: {e}')
            return math.nan
        return result.value if result.defined else math.nan

    def run(self):
        grid = self.job.grid
        progress = Progress(TextColumn('[bold blue]{task.description}'), BarColumn(bar_width=None),
                            TextColumn('[progress.percentage]{task.percentage:>3.1f}%'), TimeRemainingColumn(),
                            console=Console(stderr=True), transient=True, disable=not self.show_progress)
        rows = []
        with progress, ThreadPoolExecutor(max_workers=self.workers) as pool:
            task = progress.add_task(f'{self.job.family} sweep', total=len(grid))
            for row in pool.map(self.point, grid):
                rows.append(row)
                progress.update(task, advance=1)
        df = pd.DataFrame(rows, columns=[self.job.axis] + self.job.columnNames())
        self.undefined = int(df.iloc[:, 1:].isna().sum().sum())
        if self.undefined:
            log.warning(f'{self.undefined} undefined cell(s) written as empty')
        return df


# -- PRESET BUILDERS -- #
GAMMA_SPAN = (0.0, 4.0, 81)
S_SPAN = (0.0, 1.0, 101)
HUSIMI_SPAN = (-3.0, 3.0, 61)


def pair_sweep(columns, s=0.2, gamma=1.0, eta=0.0, axis='gamma', workers=None, show_progress=False):
    """SOCS and SOTS side by side, columns prefixed with the family."""
    span = GAMMA_SPAN if axis == 'gamma' else S_SPAN
    frames = []
    for family in FAMILIES:
        job = SweepJob(family, tuple(columns), span, s=s, gamma=gamma, eta=eta, axis=axis)
        df = SweepAPI(job, workers, show_progress).run().set_index(axis)
        frames.append(df.add_prefix(f'{family}_'))
    return pd.concat(frames, axis=1).reset_index()


def klyshko_table(gamma, s, eta=0.0, m_max=10):
    """B(m) for m = 0..m_max on both families."""
    out = {'m': np.arange(m_max + 1)}
    for family in FAMILIES:
        api = WitnessAPI(ClosedFormProvider(makeState(family, s, gamma, eta=eta)))
        out[f'{family}_klyshko'] = [api.klyshko(m).value for m in range(m_max + 1)]
    return pd.DataFrame(out)


def husimi_grid(gamma, s, eta=0.0, span=HUSIMI_SPAN):
    """Q on a square beta grid, one row per grid point."""
    x = np.linspace(*span[:2], int(span[2]))
    re, im = np.meshgrid(x, x)
    out = {'re_beta': re.ravel(), 'im_beta': im.ravel()}
    for family in FAMILIES:
        out[f'{family}_q'] = np.ravel(husimi(makeState(family, s, gamma, eta=eta), re + 1j * im))
    return pd.DataFrame(out)


ETA_REPORT_S = (0.2, 0.5, 0.8)
ETA_REPORT_GAMMA = (0.5, 1.0, 2.0)
ETA_REPORT_ETA = (0.0, 0.25, 0.5)
ETA_REPORT_MOMENTS = {'socs': ((0, 0), (1, 1), (2, 1)), 'sots': ((0, 0), (1, 1), (2, 2))}


def eta_report():
    """Printed detector-efficiency moments next to the effective-state values."""
    rows = []
    flagged = 0
    for family in FAMILIES:
        for s in ETA_REPORT_S:
            for gamma in ETA_REPORT_GAMMA:
                for eta in ETA_REPORT_ETA:
                    spec = makeState(family, s, gamma, eta=eta)
                    definition = ClosedFormProvider(spec)
                    params = f'{family} s={s:g} gamma={gamma:g} eta={eta:g}'
                    for m, n in ETA_REPORT_MOMENTS[family]:
                        note = ''
                        try:
                            if family == 'socs':
                                printed = paper_moment_socs_eta(m, n, spec.sup, spec.coherent, spec.detector).real
                            else:
                                printed = paper_moment_sots_eta(n, spec.sup, spec.thermal, spec.detector)
                        except DegenerateStateError as e:
                            printed, note = math.nan, f'degenerate: {e}'
                            flagged += 1
                        value = definition.moment(m, n).real
                        rows.append(dict(params=params, m=m, n=n, paper_value=printed, definition_value=value,
                                         abs_diff=abs(printed - value), note=note))
    if flagged:
        log.warning(f'{flagged} printed-formula evaluation(s) degenerate')
    return pd.DataFrame(rows, columns=['params', 'm', 'n', 'paper_value', 'definition_value', 'abs_diff', 'note'])


def _gamma_figure(criterion, orders, s_values=(0.2, 0.5, 0.8)):
    panels = {}
    letters = iter('abcdefghi')
    for s in s_values:
        for l in orders:
            panels[next(letters)] = lambda w, s=s, l=l: pair_sweep([(criterion, l)], s=s, workers=w)
    return panels


def _s_figure(criterion, panels_spec):
    return {letter: (lambda w, g=g, l=l: pair_sweep([(criterion, l)], gamma=g, axis='s', workers=w))
            for letter, (g, l) in zip('abc', panels_spec)}


def _eta_figure(criterion, panels_spec):
    return {letter: (lambda w, l=l, e=e: pair_sweep([(criterion, l)], s=0.2, eta=e, workers=w))
            for letter, (l, e) in zip('abc', panels_spec)}


ALL_CRITERIA_L4 = (('q', 4), ('hoa', 4), ('hosps', 4), ('hos', 4), ('a3', 3), ('klyshko', 4), ('husimi', 0))

PRESETS = {
    'fig1': ('Mandel Q vs gamma, s=0.2/0.5/0.8, l=2,5,7', _gamma_figure('q', (2, 5, 7))),
    'fig2': ('Mandel Q vs s', _s_figure('q', ((3.0, 2), (3.37, 5), (3.69, 7)))),
    'fig3': ('HOA vs gamma, l=2,3,4', _gamma_figure('hoa', (2, 3, 4))),
    'fig4': ('HOA vs s', _s_figure('hoa', ((0.1, 2), (0.2, 3), (0.3, 4)))),
    'fig5': ('HOSPS vs gamma, l=2,3,4', _gamma_figure('hosps', (2, 3, 4))),
    'fig6': ('HOSPS vs s, gamma=0.2', _s_figure('hosps', ((0.2, 2), (0.2, 3), (0.2, 4)))),
    'fig7': ('HOS vs gamma, l=2,4,6', _gamma_figure('hos', (2, 4, 6))),
    'fig8': ('HOS vs s, gamma=0.01', _s_figure('hos', ((0.01, 2), (0.01, 4), (0.01, 6)))),
    'fig9': ('Husimi Q on a beta grid', {
        letter: (lambda w, g=g, s=s: husimi_grid(g, s))
        for letter, (g, s) in zip('abc', ((1.0, 0.2), (0.1, 0.5), (0.01, 0.8)))}),
    'fig10': ('Agarwal-Tara vs gamma, s=0.01/0.1/0.2', {
        letter: (lambda w, s=s: pair_sweep([('a3', 3)], s=s, workers=w))
        for letter, s in zip('abc', (0.01, 0.1, 0.2))}),
    'fig11': ('Agarwal-Tara vs s', _s_figure('a3', ((0.1, 3), (0.5, 3), (0.7, 3)))),
    'fig12': ('Klyshko B(m), m=0..10', {
        letter: (lambda w, g=g, s=s: klyshko_table(g, s))
        for letter, (g, s) in zip('abc', ((2.0, 0.2), (1.5, 0.5), (1.0, 0.8)))}),
    'fig13': ('all criteria vs gamma, s=0.5, l=4, m=4', {
        'a': lambda w: pair_sweep(ALL_CRITERIA_L4, s=0.5, workers=w)}),
    'fig-eta1': ('Mandel Q with detector efficiency', _eta_figure('q', ((2, 0.25), (5, 0.5), (7, 0.75)))),
    'fig-eta2': ('HOA with detector efficiency', _eta_figure('hoa', ((2, 0.75), (3, 0.5), (4, 0.25)))),
    'fig-eta3': ('HOSPS with detector efficiency', _eta_figure('hosps', ((2, 0.3), (3, 0.6), (4, 0.9)))),
    'fig-eta4': ('HOS with detector efficiency', _eta_figure('hos', ((2, 0.4), (4, 0.6), (6, 0.8)))),
    'fig-eta5': ('Husimi Q with detector efficiency', {
        letter: (lambda w, g=g, s=s, e=e: husimi_grid(g, s, e))
        for letter, (g, s, e) in zip('abc', ((1.0, 0.2, 0.1), (0.1, 0.5, 0.4), (0.01, 0.8, 0.7)))}),
    'fig-eta6': ('Agarwal-Tara with detector efficiency', {
        letter: (lambda w, s=s, e=e: pair_sweep([('a3', 3)], s=s, eta=e, workers=w))
        for letter, (s, e) in zip('abc', ((0.01, 0.8), (0.1, 0.5), (0.2, 0.2)))}),
    'fig-eta7': ('Klyshko B(m) with detector efficiency', {
        letter: (lambda w, g=g, s=s, e=e: klyshko_table(g, s, e))
        for letter, (g, s, e) in zip('abc', ((2.0, 0.2, 0.4), (1.5, 0.5, 0.6), (1.0, 0.8, 0.8)))}),
    'eta-report': ('printed detector-efficiency moments vs effective-state path', {'': lambda w: eta_report()}),
}


def run_preset(name, output_dir='.', workers=None):
    """Write one CSV per panel; returns the written paths."""
    if name not in PRESETS:
        raise InvalidArgumentError(f'unknown preset "{name}" (known: {", ".join(PRESETS)})')
    _, panels = PRESETS[name]
    paths = []
    for letter, build in panels.items():
        path = Path(output_dir).joinpath(f'{name}_{letter}.csv' if letter else f'{name}.csv')
        log.info(f'preset {name}: writing {path}')
        to_csv(build(workers), path)
        paths.append(path)
    return paths
