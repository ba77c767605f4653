from configparser import ConfigParser
from functools import lru_cache
from io import StringIO
from logging.handlers import TimedRotatingFileHandler
from logging import StreamHandler
from pathlib import Path
import logging
import sys
import os

from coloredlogs import ColoredFormatter, find_program_name, ProgramNameFilter
import pandas as pd

from .errors import ArithmeticOverflowError, OutputError


# -- CONFIG DEFAULTS -- #
CONFIG_SECTION = 'supoptics'
CONFIG_DEFAULTS = {
    'log_level': 'INFO',
    'log_file': '',
    'word_bound': '32',
    'quadrature_bound': '16',
    'tail_tolerance': '1e-16',
    'max_terms': '1000000',
    'max_cutoff': '100000',
    'workers': '1',
}


def getConfigPath():
    """Path of the INI file: $SUPOPTICS_CONFIG or ~/.config/supoptics.ini"""
    env = os.environ.get('SUPOPTICS_CONFIG')
    return Path(env) if env else Path.home().joinpath(".config", "supoptics.ini")


@lru_cache(maxsize=None)
def getConfig():
    """Read the [supoptics] section, defaults filled in.

    Returns:
        configparser.SectionProxy
    """
    config = ConfigParser()
    config.read_dict({CONFIG_SECTION: CONFIG_DEFAULTS})
    config.read(getConfigPath())
    return config[CONFIG_SECTION]


def configInt(key, value=None):
    """Explicit value wins, else the config entry."""
    return int(value) if value is not None else getConfig().getint(key)


def configFloat(key, value=None):
    return float(value) if value is not None else getConfig().getfloat(key)


# -- NUMBER FORMATTING -- #
def fmt_float(x):
    """17 significant digits: round-trips every double exactly."""
    return '%.17g' % x


def fmt_complex(z):
    """`1+0i` style used in validation report lines."""
    z = complex(z)
    return f'{z.real:g}{z.imag:+g}i'


def exact_to_float(x):
    """Convert an exact int/Fraction to float, refusing silent overflow."""
    try:
        return float(x)
    except OverflowError as e:
        raise ArithmeticOverflowError(f'value does not fit a double: {e}') from e


# -- CSV TABLES -- #
def to_csv(df, path=None):
    """Write a table as CSV: header row, LF endings, UTF-8, %.17g floats, empty cell = undefined.

    Args:
        Required - df (DataFrame) - the table
        Optional - path (str|Path|file) - destination; None returns the text
    Returns:
        CSV text when path is None
    """
    kwargs = dict(index=False, float_format='%.17g', lineterminator='\n', na_rep='')
    if path is None:
        buf = StringIO()
        df.to_csv(buf, **kwargs)
        return buf.getvalue()
    if hasattr(path, 'write'):
        df.to_csv(path, **kwargs)
        return None
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8', newline='') as f:
            df.to_csv(f, **kwargs)
    except OSError as e:
        raise OutputError(f'cannot write "{path}": {e}') from e
    return None


def read_csv(path):
    """Read a table written by to_csv() with every cell kept as text (byte-exact re-emit)."""
    return pd.read_csv(path, dtype=str, keep_default_na=False)


# -- LOGGER CONFIGS -- #
field_styles = {
    'asctime': {'color': 221, 'bright': True},
    'programname': {'color': 45, 'faint': True},
    'funcName': {'color': 177, 'normal': True},
    'lineno': {'color': 'cyan', 'bright': True}
}
level_styles = {
    "debug": {'color': 'green', 'bright': True},
    "info": {'color': 'white', 'bright': True},
    "warning": {'color': "yellow", 'normal': True},
    "error": {'color': "red", 'bright': True},
    "critical": {'color': 'red', 'bold': True, 'background': 'red'}
}
log_format = "[%(asctime)s] [%(levelname)-8s] [%(programname)s: %(funcName)s();%(lineno)s] %(message)s"


class Logger(object):
    """
    Custom Wrapper for ColoredLogs

    Usage:
        from supoptics.utils import Logger

        log = Logger(level='DEBUG').createLogger('supoptics')
        log.debug('TEST DEBUG')
    """
    def __init__(self, level=None, log_file=None, log_console=True, stream=None):
        """
        Setup for logger

        Args:
            Optional - level (str|int)      - logging level for file and console (default: config log_level)
            Optional - log_file (str)       - rotate logs into this file (default: config log_file, empty = off)
            Optional - log_console (bool)   - log to the diagnostic stream
            Optional - stream (file)        - console stream (default: sys.stderr)
        """
        config = getConfig()
        level = level if level is not None else config.get('log_level')
        self.level = level.upper() if isinstance(level, str) else level
        self.log_file = log_file if log_file is not None else config.get('log_file')
        self.log_console = log_console
        self.stream = stream
        self.MODULE = find_program_name()
        self.no_color = 'NO_COLOR' in os.environ

    def createLogger(self, module='supoptics'):
        logger = logging.getLogger(module)
        logger.setLevel(self.level)

        # -- repeated createLogger() calls (tests, nested commands) must not stack handlers
        for handler in list(logger.handlers):
            if getattr(handler, '_supoptics', False):
                logger.removeHandler(handler)

        if self.log_file:
            Path(self.log_file).parent.mkdir(parents=True, exist_ok=True)
            logger.addHandler(self.getFileHandler())

        if self.log_console:
            logger.addHandler(self.getConsoleHandler())
        return logger

    def getFormatter(self):
        if self.no_color:
            return logging.Formatter(log_format)
        return ColoredFormatter(log_format, field_styles=field_styles, level_styles=level_styles)

    def getFileHandler(self):
        log_file_handler = TimedRotatingFileHandler(self.log_file, when='midnight')
        log_file_handler.setLevel(self.level)
        log_file_handler.addFilter(ProgramNameFilter())
        log_file_handler.setFormatter(logging.Formatter(log_format))
        log_file_handler._supoptics = True
        return log_file_handler

    def getConsoleHandler(self):
        console_handler = StreamHandler(self.stream or sys.stderr)
        console_handler.setLevel(self.level)
        console_handler.addFilter(ProgramNameFilter())
        console_handler.setFormatter(self.getFormatter())
        console_handler._supoptics = True
        return console_handler
