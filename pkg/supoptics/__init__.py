__version__ = '0.1.0'

from .algebra_api import NormalOrderedPolynomial, normal_order, stirling2
from .oracle_api import OracleProvider
from .states_api import SOCS, SOTS, ClosedFormProvider, makeState
from .sweep_api import SweepAPI, SweepJob
from .validate_api import Validator
from .witness_api import WitnessAPI, WitnessResult, makeProvider
