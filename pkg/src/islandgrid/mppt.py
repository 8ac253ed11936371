"""Fixed-step perturb-and-observe maximum power point tracker.

The DC-DC stage is treated as an ideal voltage actuator: the commanded
``v_ref`` is the voltage measured on the next sample.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from typing import Iterable, NamedTuple, TextIO

from .errors import ModelDomainError
from .pv_model import PvArray, cell_current

TRAJECTORY_HEADER = ("iter", "voltage_v", "current_a", "power_w")


@dataclass(frozen=True)
class MpptState:
    v_ref: float
    step: float
    v_max: float
    prev_voltage: float
    prev_power: float = 0.0
    direction: int = 1

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError(f"step must be positive, got {self.step!r}")
        if self.direction not in (1, -1):
            raise ValueError(f"direction must be +1 or -1, got {self.direction!r}")
        if not 0.0 <= self.v_ref <= self.v_max:
            raise ValueError(f"v_ref {self.v_ref!r} outside [0, {self.v_max!r}]")


class MpptSample(NamedTuple):
    iteration: int
    voltage: float
    current: float
    power: float


def mppt_init(v_start: float, step: float, v_max: float) -> MpptState:
    if not (math.isfinite(v_start) and math.isfinite(step) and math.isfinite(v_max)):
        raise ValueError("mppt_init arguments must be finite")
    if not 0.0 <= v_start <= v_max:
        raise ValueError(f"need 0 <= v_start <= v_max, got {v_start!r}, {v_max!r}")
    if not step > 0:
        raise ValueError(f"step must be positive, got {step!r}")
    return MpptState(v_ref=v_start, step=step, v_max=v_max, prev_voltage=v_start)


def mppt_step(state: MpptState, measured_v: float, measured_i: float) -> MpptState:
    """One P&O iteration.

    The new direction is the sign of dP*dV; a zero product keeps the
    previous direction.
    """
    if not (math.isfinite(measured_v) and math.isfinite(measured_i)):
        raise ModelDomainError("measurements must be finite")
    if measured_v < 0:
        raise ModelDomainError(f"measured voltage must be non-negative, got {measured_v!r}")
    p = measured_v * measured_i
    slope = (p - state.prev_power) * (measured_v - state.prev_voltage)
    direction = state.direction
    if slope > 0:
        direction = 1
    elif slope < 0:
        direction = -1
    v_ref = min(max(measured_v + direction * state.step, 0.0), state.v_max)
    return replace(state, v_ref=v_ref, prev_voltage=measured_v, prev_power=p, direction=direction)


def mppt_run(array: PvArray, state: MpptState, max_iters: int = 1000) -> list[MpptSample]:
    """Close the loop between the tracker and the array for ``max_iters`` samples."""
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    trajectory = []
    for k in range(max_iters):
        v = state.v_ref
        i = cell_current(array, v)
        trajectory.append(MpptSample(k, v, i, v * i))
        state = mppt_step(state, v, i)
    return trajectory


def settled_point(trajectory: list[MpptSample]) -> tuple[float, float]:
    """Centre voltage and mean power of the final P&O oscillation.

    The steady-state limit cycle visits three voltages in the pattern
    mid, high, mid, low; the median of the last three samples is the
    mid level and the last four samples span one full period.
    """
    if len(trajectory) < 4:
        last = trajectory[-1]
        return last.voltage, last.power
    v_mid = sorted(s.voltage for s in trajectory[-3:])[1]
    p_mean = sum(s.power for s in trajectory[-4:]) / 4.0
    return v_mid, p_mean


def write_trajectory_csv(trajectory: Iterable[MpptSample], fh: TextIO) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(TRAJECTORY_HEADER)
    for s in trajectory:
        writer.writerow([str(s.iteration), repr(float(s.voltage)), repr(float(s.current)), repr(float(s.power))])
