"""supoptics command line: witness, sweep, preset, validate, dump.

CSV goes to stdout (or --output), diagnostics to stderr. Exit codes:
0 ok, 1 validation failure, 2 invalid arguments, 3 degenerate state or
undefined witness, 4 internal numerical failure, 5 output error.
"""
import argparse
import logging
import sys

import pandas as pd
from rich.console import Console
from rich.table import Table

from . import __version__
from .errors import SupOpticsError, ValidationFailure
from .oracle_api import build_state, dump_state
from .states_api import FAMILIES, makeState
from .sweep_api import PRESETS, SweepAPI, SweepJob, run_preset
from .utils import Logger, to_csv
from .validate_api import Validator
from .witness_api import BACKENDS, CRITERIA, WitnessAPI, makeProvider


log = logging.getLogger('supoptics')


def parse_orders(text):
    """'0..6' -> [0, ..., 6]; '2,5,7' -> [2, 5, 7]"""
    try:
        if '..' in text:
            lo, hi = text.split('..')
            orders = list(range(int(lo), int(hi) + 1))
        else:
            orders = [int(x) for x in text.split(',')]
    except ValueError:
        raise argparse.ArgumentTypeError(f'invalid order list "{text}" (use "2,5,7" or "0..6")')
    if not orders:
        raise argparse.ArgumentTypeError(f'empty order list "{text}"')
    return orders


def _state_args(p, gamma_required=True):
    p.add_argument('--state', choices=FAMILIES, required=True, help='state family')
    p.add_argument('--s', type=float, required=True, help='SUP parameter s')
    p.add_argument('--t', type=float, default=None, help='SUP parameter t (default +sqrt(1-s^2))')
    p.add_argument('--gamma', type=float, required=gamma_required, default=1.0, help='|alpha| (socs) or nbar (sots)')
    p.add_argument('--phase', type=float, default=0.0, help='phase of alpha in radians')
    p.add_argument('--eta', type=float, default=0.0, help='detector quantum efficiency parameter')


def build_parser():
    ap = argparse.ArgumentParser(prog='supoptics', description='Nonclassicality witnesses of SUP-operated coherent and thermal states')
    ap.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    ap.add_argument('--log-level', default=None, help='DEBUG, INFO, WARNING, ... (default: config)')
    sub = ap.add_subparsers(dest='command', required=True)

    p = sub.add_parser('witness', help='evaluate one criterion at one state')
    _state_args(p)
    p.add_argument('--criterion', choices=CRITERIA, required=True)
    p.add_argument('--order', type=parse_orders, default=[2], help='"2", "2,5,7" or "0..6"')
    p.add_argument('--backend', choices=BACKENDS + ('both',), default='closed')

    p = sub.add_parser('sweep', help='sweep gamma (or s) and write one column per criterion/order/backend')
    _state_args(p, gamma_required=False)
    p.add_argument('--axis', choices=('gamma', 's'), default='gamma')
    p.add_argument('--range', nargs=3, type=float, metavar=('START', 'STOP', 'COUNT'), default=(0.0, 4.0, 81))
    p.add_argument('--criterion', choices=CRITERIA, required=True)
    p.add_argument('--order', type=parse_orders, default=[2])
    p.add_argument('--backend', choices=BACKENDS + ('both',), default='closed')
    p.add_argument('--workers', type=int, default=None)
    p.add_argument('--output', default='-', help='CSV path, "-" for stdout')

    p = sub.add_parser('preset', help='reproduce a figure as CSV files')
    p.add_argument('name', nargs='?', help='preset name (see --list)')
    p.add_argument('--list', action='store_true', help='list presets and exit')
    p.add_argument('--output', default='.', help='directory for the CSV files')
    p.add_argument('--workers', type=int, default=None)

    sub.add_parser('validate', help='closed form vs truncated Fock oracle over the standard grid')

    p = sub.add_parser('dump', help='write the truncated oracle state')
    _state_args(p)
    p.add_argument('--cutoff', type=int, default=None)
    p.add_argument('--max-order', type=int, default=16)
    p.add_argument('--output', default='-')
    return ap


def _spec(args):
    return makeState(args.state, args.s, args.gamma, args.t, args.phase, args.eta)


def _emit(df, output='-'):
    to_csv(df, sys.stdout if output == '-' else output)


def cmd_witness(args):
    spec = _spec(args)
    backends = BACKENDS if args.backend == 'both' else (args.backend,)
    rows = []
    for backend in backends:
        api = WitnessAPI(makeProvider(spec, backend))
        orders = [3] if args.criterion == 'a3' else args.order
        for order in orders:
            r = api.evaluate(args.criterion, order)
            verdict = '' if r.nonclassical is None else str(r.nonclassical).lower()
            rows.append(dict(criterion=r.criterion, order=r.order, value=r.value if r.defined else None,
                             nonclassical=verdict, backend=backend))
            if r.note:
                log.warning(f'{r.criterion} order {r.order} ({backend}): {r.note}')
    _emit(pd.DataFrame(rows, columns=['criterion', 'order', 'value', 'nonclassical', 'backend']))
    return 0


def cmd_sweep(args):
    start, stop, count = args.range
    job = SweepJob(args.state, tuple((args.criterion, o) for o in args.order), (start, stop, int(count)),
                   s=args.s, gamma=args.gamma, t=args.t, phase=args.phase, eta=args.eta,
                   backend=args.backend, axis=args.axis)
    _emit(SweepAPI(job, args.workers).run(), args.output)
    return 0


def cmd_preset(args):
    if args.list or not args.name:
        table = Table(title='presets')
        table.add_column('name')
        table.add_column('panels')
        table.add_column('description')
        for name, (desc, panels) in PRESETS.items():
            table.add_row(name, ','.join(p for p in panels if p) or '-', desc)
        Console().print(table)
        return 0
    for path in run_preset(args.name, args.output, args.workers):
        print(path)
    return 0


def cmd_validate(args):
    v = Validator()
    ok = v.run()
    v.printSummary()
    if not ok:
        raise ValidationFailure('validation failed')
    return 0


def cmd_dump(args):
    state = build_state(_spec(args), args.cutoff, args.max_order)
    _emit(dump_state(state), args.output)
    return 0


COMMANDS = {
    'witness': cmd_witness,
    'sweep': cmd_sweep,
    'preset': cmd_preset,
    'validate': cmd_validate,
    'dump': cmd_dump,
}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code
    Logger(level=args.log_level).createLogger('supoptics')
    try:
        return COMMANDS[args.command](args)
    except SupOpticsError as e:
        log.error(str(e))
        return e.exit_code
    except Exception as e:
        log.exception(f'internal error: {e!r}')
        return SupOpticsError.exit_code


def run():
    sys.exit(main())
