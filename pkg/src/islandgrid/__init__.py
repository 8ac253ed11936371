"""Quasi-steady-state model of an islanded PV + direct methanol fuel cell microgrid."""

from .dmfc import DmfcCell, FuelUtilization
from .droop import CouplingImpedance, DroopParams, PowerMeasurement
from .mppt import MpptState
from .pv_model import OperatingPoint, PvArray
from .scenario import MicrogridScenario, build_scenario

__version__ = "0.1.0"
