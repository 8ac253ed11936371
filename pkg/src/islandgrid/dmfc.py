"""Direct methanol fuel cell: Nernst limit, Faraday limit and equivalent circuit.

The electrical model reduces the three-resistor circuit (ionic resistance,
crossover path, external load) to a closed form in the fuel utilization
``eta``::

    E = (E_max - r1 * eta * i_max_norm) / (r2 * (1 - eta) + 1)

``r1`` and ``r2`` are normalized resistances and ``i_max_norm`` is the
Faraday current limit expressed in the same normalized units. Physical
current density is ``eta * i_max`` in A/m^2.

The default parameter set is representative only; it is not fitted to any
measured polarization curve.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, TextIO

import numpy as np

GAS_CONSTANT = 8.314  # J/(mol K)
FARADAY = 96485.0  # C/mol

POLARIZATION_HEADER = ("current_density_a_per_m2", "voltage_v", "power_w_per_m2")


@dataclass(frozen=True)
class DmfcCell:
    temperature: float = 343.15
    p_h2_anode: float = 1.0e5
    # Equilibrium H2 pressure at an oxygen cathode is vanishingly small;
    # this value puts E_max near 0.75 V at 70 C.
    p_h2_cathode: float = 1.0e-17
    n_h2_flow: float = 5.18e-4
    area: float = 0.05
    r1: float = 0.3
    r2: float = 0.1
    i_max_norm: float = 1.0
    n_series: int = 1

    def __post_init__(self):
        positive = ("temperature", "p_h2_anode", "p_h2_cathode", "n_h2_flow", "area", "i_max_norm")
        for name in positive:
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"DmfcCell.{name} must be positive, got {value!r}")
        for name in ("r1", "r2"):
            value = getattr(self, name)
            if not (value >= 0 and math.isfinite(value)):
                raise ValueError(f"DmfcCell.{name} must be non-negative, got {value!r}")
        if self.n_series < 1 or int(self.n_series) != self.n_series:
            raise ValueError(f"DmfcCell.n_series must be an integer >= 1, got {self.n_series!r}")
        if self.p_h2_anode < self.p_h2_cathode:
            raise ValueError("p_h2_anode < p_h2_cathode gives a negative open-circuit voltage")


@dataclass(frozen=True)
class FuelUtilization:
    eta: float

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"fuel utilization must lie in [0, 1], got {self.eta!r}")


class PolarizationPoint(NamedTuple):
    current_density: float
    voltage: float
    power_density: float


def nernst_potential(temperature: float, p_anode: float, p_cathode: float) -> float:
    """Open-circuit limit RT/(2F) ln(p_anode / p_cathode), any pressure ordering."""
    # Difference of logs keeps the sign flip under swapped pressures exact.
    return GAS_CONSTANT * temperature / (2.0 * FARADAY) * (math.log(p_anode) - math.log(p_cathode))


def nernst_emax(cell: DmfcCell) -> float:
    return nernst_potential(cell.temperature, cell.p_h2_anode, cell.p_h2_cathode)


def faraday_imax(cell: DmfcCell) -> float:
    """Limiting current density [A/m^2] when all fuel is oxidized."""
    return 2.0 * FARADAY * cell.n_h2_flow / cell.area


def _as_eta(u) -> float:
    if isinstance(u, FuelUtilization):
        return u.eta
    return FuelUtilization(float(u)).eta


def cell_voltage(cell: DmfcCell, u: FuelUtilization | float) -> float:
    eta = _as_eta(u)
    e_max = nernst_emax(cell)
    return (e_max - cell.r1 * eta * cell.i_max_norm) / (cell.r2 * (1.0 - eta) + 1.0)


def stack_voltage(cell: DmfcCell, u: FuelUtilization | float) -> float:
    return cell.n_series * cell_voltage(cell, u)


def stack_current(cell: DmfcCell, u: FuelUtilization | float) -> float:
    """Series current [A] drawn at utilization ``u``."""
    return _as_eta(u) * faraday_imax(cell) * cell.area


def stack_power(cell: DmfcCell, u: FuelUtilization | float) -> float:
    return stack_voltage(cell, u) * stack_current(cell, u)


def polarization_curve(cell: DmfcCell, n_points: int) -> list[PolarizationPoint]:
    if n_points < 2:
        raise ValueError(f"n_points must be >= 2, got {n_points}")
    i_max = faraday_imax(cell)
    etas = np.linspace(0.0, 1.0, int(n_points))
    etas[-1] = 1.0
    rows = []
    for eta in etas:
        eta = float(eta)
        j = i_max if eta == 1.0 else eta * i_max
        v = cell_voltage(cell, eta)
        rows.append(PolarizationPoint(j, v, j * v))
    return rows


def write_polarization_csv(points: Iterable[PolarizationPoint], fh: TextIO) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(POLARIZATION_HEADER)
    for p in points:
        writer.writerow([repr(float(x)) for x in p])
