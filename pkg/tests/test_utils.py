import io
import logging

import pandas as pd
import pytest

from supoptics import utils
from supoptics.errors import ArithmeticOverflowError, OutputError


def test_config_defaults():
    assert utils.configInt('workers') == 1
    assert utils.configFloat('tail_tolerance') == 1e-16
    assert utils.configInt('workers', 7) == 7


def test_config_file_overrides(tmp_path, monkeypatch):
    path = tmp_path / 'supoptics.ini'
    path.write_text('[supoptics]\nworkers = 2\nmax_cutoff = 500\n')
    monkeypatch.setenv('SUPOPTICS_CONFIG', str(path))
    utils.getConfig.cache_clear()
    assert utils.configInt('workers') == 2
    assert utils.configInt('max_cutoff') == 500
    assert utils.configInt('word_bound') == 32


def test_number_formatting():
    assert utils.fmt_complex(1) == '1+0i'
    assert utils.fmt_complex(0.5 - 2j) == '0.5-2i'
    assert float(utils.fmt_float(0.1)) == 0.1
    with pytest.raises(ArithmeticOverflowError):
        utils.exact_to_float(10 ** 400)


def test_to_csv_text_and_empty_cells():
    df = pd.DataFrame({'x': [0.0, 0.5], 'y': [float('nan'), 1 / 3]})
    assert utils.to_csv(df) == 'x,y\n0,\n0.5,0.33333333333333331\n'


def test_to_csv_unwritable(tmp_path):
    blocker = tmp_path / 'file'
    blocker.write_text('x')
    with pytest.raises(OutputError):
        utils.to_csv(pd.DataFrame({'x': [1]}), blocker / 'sub' / 'out.csv')


def test_logger_does_not_stack_handlers():
    stream = io.StringIO()
    for _ in range(3):
        log = utils.Logger(level='DEBUG', stream=stream).createLogger('supoptics.test')
    assert len(log.handlers) == 1
    log.debug('hello')
    assert stream.getvalue().count('hello') == 1
    log.handlers.clear()


def test_logger_file_handler(tmp_path):
    path = tmp_path / 'logs' / 'supoptics.log'
    log = utils.Logger(level='INFO', log_file=str(path), log_console=False).createLogger('supoptics.file')
    log.info('written')
    for handler in log.handlers:
        handler.flush()
    assert 'written' in path.read_text()
    for handler in list(log.handlers):
        handler.close()
        log.removeHandler(handler)
    assert logging.getLogger('supoptics.file').handlers == []
