"""Power transfer across a coupling impedance and the P-f / Q-V droop law.

Powers are those received at the far (bus) end of the impedance; positive
P flows from the inverter into the bus.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class CouplingImpedance:
    magnitude: float
    angle: float = math.pi / 2

    def __post_init__(self):
        if not self.magnitude > 0:
            raise ValueError(f"impedance magnitude must be positive, got {self.magnitude!r}")
        if not 0.0 <= self.angle <= math.pi / 2:
            raise ValueError(f"impedance angle must lie in [0, pi/2], got {self.angle!r}")

    @classmethod
    def inductor(cls, inductance: float, frequency_hz: float) -> "CouplingImpedance":
        return cls(2.0 * math.pi * frequency_hz * inductance, math.pi / 2)


@dataclass(frozen=True)
class DroopParams:
    e_set: float
    w_set: float
    n_coef: float
    m_coef: float

    def __post_init__(self):
        if not (self.e_set > 0 and self.w_set > 0):
            raise ValueError("droop setpoints must be positive")
        if not (self.n_coef >= 0 and self.m_coef >= 0):
            raise ValueError("droop coefficients must be non-negative")

    @classmethod
    def sized_for(cls, e_set, w_set, rated_p, rated_q, freq_drop=0.01, volt_drop=0.05):
        """Coefficients giving ``freq_drop`` at rated P and ``volt_drop`` at rated Q."""
        return cls(e_set, w_set, volt_drop * e_set / rated_q, freq_drop * w_set / rated_p)


@dataclass(frozen=True)
class PowerMeasurement:
    p: float = 0.0
    q: float = 0.0
    filter_cutoff: float = 10.0

    def __post_init__(self):
        if not self.filter_cutoff > 0:
            raise ValueError(f"filter_cutoff must be positive, got {self.filter_cutoff!r}")


def cos_sin(angle: float) -> tuple[float, float]:
    # math.cos(pi/2) is 6e-17; a purely inductive line should carry no resistive term.
    if angle == math.pi / 2:
        return 0.0, 1.0
    return math.cos(angle), math.sin(angle)


def power_transfer(e: float, delta: float, v0: float, z: CouplingImpedance) -> tuple[float, float]:
    """P and Q delivered to a bus at ``v0`` (angle 0) from a source at ``e`` (angle ``delta``)."""
    if not (e > 0 and v0 > 0):
        raise ValueError("voltages must be positive")
    common = v0 * (e * math.cos(delta) - v0) / z.magnitude
    cross = e * v0 * math.sin(delta) / z.magnitude
    c, s = cos_sin(z.angle)
    return common * c + cross * s, common * s - cross * c


def power_transfer_inductive(e: float, delta: float, v0: float, z0: float) -> tuple[float, float]:
    """Purely inductive special case of :func:`power_transfer`."""
    if not (e > 0 and v0 > 0 and z0 > 0):
        raise ValueError("voltages and impedance must be positive")
    return e * v0 * math.sin(delta) / z0, v0 * (e * math.cos(delta) - v0) / z0


def droop_update(params: DroopParams, meas: PowerMeasurement) -> tuple[float, float]:
    """Voltage magnitude and angular frequency commanded for measured P, Q."""
    return params.e_set - params.n_coef * meas.q, params.w_set - params.m_coef * meas.p


def lpf_update(meas: PowerMeasurement, p_raw: float, q_raw: float, dt: float) -> PowerMeasurement:
    """Forward-Euler step of a first-order low-pass filter."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    alpha = meas.filter_cutoff * dt
    if alpha >= 2.0:
        raise ValueError(f"filter_cutoff*dt = {alpha:g} >= 2 makes the discrete filter unstable")
    return replace(meas, p=meas.p + alpha * (p_raw - meas.p), q=meas.q + alpha * (q_raw - meas.q))
