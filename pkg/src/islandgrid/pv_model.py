"""Ideal single-diode photovoltaic array.

The array is a photocurrent source in parallel with one diode, with no
series or shunt resistance::

    I(V) = i_pv - i_0 * (exp(V / v_t_eff) - 1)
    v_t_eff = (k * T / q) * ideality * n_cell
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from typing import Iterable, NamedTuple, TextIO

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ModelDomainError

BOLTZMANN = 1.380649e-23  # J/K
ELEMENTARY_CHARGE = 1.602176634e-19  # C
STC_IRRADIANCE = 1000.0  # W/m^2

# exp() overflows a double just above 709.78
_MAX_EXPONENT = 700.0

SWEEP_HEADER = ("voltage_v", "current_a", "power_w")


@dataclass(frozen=True)
class PvArray:
    """Parameters of the single-diode model.

    Attributes
    ----------
    i_pv : float
        Photocurrent [A].
    i_0 : float
        Diode reverse-saturation current [A].
    ideality : float
        Diode ideality factor.
    n_cell : int
        Number of series-connected cells.
    temperature : float
        Cell temperature [K].
    """

    i_pv: float = 8.0
    i_0: float = 1e-10
    ideality: float = 1.3
    n_cell: int = 54
    temperature: float = 298.15

    def __post_init__(self):
        checks = (
            ("i_pv", self.i_pv > 0),
            ("i_0", self.i_0 > 0),
            ("ideality", self.ideality >= 1),
            ("n_cell", self.n_cell >= 1 and int(self.n_cell) == self.n_cell),
            ("temperature", self.temperature > 0),
        )
        for name, ok in checks:
            value = getattr(self, name)
            if not (ok and math.isfinite(value)):
                raise ValueError(f"invalid PvArray.{name}: {value!r}")

    @property
    def v_t_eff(self) -> float:
        """Thermal voltage scaled by ideality and cell count [V]."""
        return BOLTZMANN * self.temperature / ELEMENTARY_CHARGE * self.ideality * self.n_cell


class OperatingPoint(NamedTuple):
    voltage: float
    current: float
    power: float

    @classmethod
    def at(cls, voltage: float, current: float) -> "OperatingPoint":
        return cls(voltage, current, voltage * current)


def with_irradiance(array: PvArray, irradiance: float) -> PvArray:
    """Scale the photocurrent linearly from its 1000 W/m^2 value."""
    if not (irradiance > 0 and math.isfinite(irradiance)):
        raise ValueError(f"irradiance must be positive, got {irradiance!r}")
    return replace(array, i_pv=array.i_pv * irradiance / STC_IRRADIANCE)


def scale_parallel(array: PvArray, n_parallel: int) -> PvArray:
    """Array of ``n_parallel`` identical strings; currents scale, voltages do not."""
    if n_parallel < 1:
        raise ValueError("n_parallel must be >= 1")
    return replace(array, i_pv=array.i_pv * n_parallel, i_0=array.i_0 * n_parallel)


def cell_current(array: PvArray, v: float) -> float:
    """Terminal current of the array at voltage ``v``."""
    if not math.isfinite(v) or v < 0:
        raise ModelDomainError(f"voltage must be finite and non-negative, got {v!r}")
    x = v / array.v_t_eff
    if x > _MAX_EXPONENT:
        raise ModelDomainError(
            f"diode exponent {x:.1f} overflows at v={v!r} V "
            f"(v_oc is {open_circuit_voltage(array):.6g} V)"
        )
    return array.i_pv - array.i_0 * math.expm1(x)


def open_circuit_voltage(array: PvArray) -> float:
    return array.v_t_eff * math.log1p(array.i_pv / array.i_0)


def iv_sweep(array: PvArray, n_points: int) -> list[OperatingPoint]:
    """Uniform sweep from short circuit to open circuit."""
    if n_points < 2:
        raise ValueError(f"n_points must be >= 2, got {n_points}")
    v_oc = open_circuit_voltage(array)
    voltages = np.linspace(0.0, v_oc, int(n_points))
    voltages[-1] = v_oc
    return [OperatingPoint.at(float(v), cell_current(array, float(v))) for v in voltages]


def power_at(array: PvArray, v: float) -> float:
    return v * cell_current(array, v)


def mpp_oracle(array: PvArray, tolerance: float = 1e-9) -> OperatingPoint:
    """Maximum power point by bounded scalar search on [0, v_oc].

    P(V) is unimodal on that interval, so Brent's bracketing method
    converges to the global maximum.
    """
    if not tolerance > 0:
        raise ValueError("tolerance must be positive")
    v_oc = open_circuit_voltage(array)
    res = minimize_scalar(
        lambda v: -power_at(array, v),
        bounds=(0.0, v_oc),
        method="bounded",
        options={"xatol": tolerance, "maxiter": 500},
    )
    v = float(res.x)
    return OperatingPoint.at(v, cell_current(array, v))


def write_sweep_csv(points: Iterable[OperatingPoint], fh: TextIO) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for p in points:
        writer.writerow([repr(float(x)) for x in p])
