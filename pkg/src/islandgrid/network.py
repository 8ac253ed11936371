"""Quasi-steady-state simulation of two droop inverters feeding one load bus.

Each step solves the bus phasor algebraically, filters the resulting power
flows, applies the droop law and advances the inverter angles in a frame
rotating at the nominal frequency.
"""
from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass, replace
from typing import NamedTuple, TextIO

import numpy as np

from .droop import CouplingImpedance, PowerMeasurement, cos_sin, droop_update, lpf_update
from .errors import ReportingError, SizingError, SolverError
from .scenario import MicrogridScenario

STEADY_RATE_TOL = 1e-6  # per-unit per second
BUS_TOL_PU = 1e-9
MAX_NEWTON_ITERS = 50

TRACE_HEADER = (
    "t_s", "p1_w", "q1_var", "e1_v", "f1_hz", "delta1_rad",
    "p2_w", "q2_var", "e2_v", "f2_hz", "delta2_rad", "vbus_v", "phibus_rad",
)
DROOP_HEADER = ("t_s", "p1_w", "q1_var", "p2_w", "q2_var", "freq_hz", "vbus_v")


class BusSolution(NamedTuple):
    v_bus: float
    phi_bus: float
    p: tuple[float, float]
    q: tuple[float, float]
    p_send: tuple[float, float]
    iterations: int
    residual: float


def _injections(v, phi, sources):
    """Bus-side P, Q from each source and the Jacobian of their sums w.r.t. (V, phi)."""
    ps, qs = [], []
    jpv = jpphi = jqv = jqphi = 0.0
    for e, delta, z in sources:
        a = e / z.magnitude
        d = delta - phi
        cd, sd = math.cos(d), math.sin(d)
        ct, st = cos_sin(z.angle)
        common = v * (e * cd - v) / z.magnitude
        cross = v * e * sd / z.magnitude
        ps.append(common * ct + cross * st)
        qs.append(common * st - cross * ct)
        dcommon_dv = a * cd - 2.0 * v / z.magnitude
        jpv += dcommon_dv * ct + a * sd * st
        jqv += dcommon_dv * st - a * sd * ct
        # d/dphi = -d/dd; d(common)/dd = -cross, d(cross)/dd = a v cos d
        jpphi += cross * ct - a * v * cd * st
        jqphi += cross * st + a * v * cd * ct
    return ps, qs, (jpv, jpphi, jqv, jqphi)


def solve_bus(
    e1: float, delta1: float, e2: float, delta2: float,
    z1: CouplingImpedance, z2: CouplingImpedance,
    load_p: float, load_q: float,
    *, guess: tuple[float, float] | None = None, s_base: float = 1e3,
) -> BusSolution:
    """Bus voltage phasor at which both sources together supply a constant-power load.

    Damped Newton iteration on (V, phi). The residual is the complex power
    mismatch at the bus, converged to ``1e-9 * s_base``.
    """
    sources = ((e1, delta1, z1), (e2, delta2, z2))
    if guess is None:
        v, phi = 0.5 * (e1 + e2), 0.5 * (delta1 + delta2)
    else:
        v, phi = guess
    tol = BUS_TOL_PU * s_base

    def mismatch(v, phi):
        ps, qs, jac = _injections(v, phi, sources)
        fp, fq = ps[0] + ps[1] - load_p, qs[0] + qs[1] - load_q
        return ps, qs, jac, fp, fq, math.hypot(fp, fq)

    ps, qs, jac, fp, fq, norm = mismatch(v, phi)
    it = 0
    polished = norm == 0.0
    while not polished:
        if norm <= tol:
            # one extra full step takes a converged iterate to round-off level
            polished = True
        elif it >= MAX_NEWTON_ITERS:
            raise SolverError(
                f"bus solve did not converge in {MAX_NEWTON_ITERS} iterations "
                f"(residual {norm:.3e} VA); the load likely exceeds transferable power",
                residual=norm,
            )
        jpv, jpphi, jqv, jqphi = jac
        det = jpv * jqphi - jpphi * jqv
        if det == 0.0 or not math.isfinite(det):
            if polished:
                break
            raise SolverError("singular bus Jacobian", residual=norm)
        dv = -(jqphi * fp - jpphi * fq) / det
        dphi = -(-jqv * fp + jpv * fq) / det
        if polished:
            trial = mismatch(v + dv, phi + dphi)
            if trial[-1] < norm:
                v, phi = v + dv, phi + dphi
                ps, qs, jac, fp, fq, norm = trial
            break
        it += 1
        lam = 1.0
        for _ in range(30):
            v_new, phi_new = v + lam * dv, phi + lam * dphi
            if v_new > 0:
                trial = mismatch(v_new, phi_new)
                if trial[-1] < norm:
                    break
            lam *= 0.5
        else:
            raise SolverError(
                f"bus solve stalled at residual {norm:.3e} VA; the load likely exceeds "
                "transferable power",
                residual=norm,
            )
        v, phi = v_new, phi_new
        ps, qs, jac, fp, fq, norm = trial

    bus = cmath.rect(v, phi)
    p_send = tuple(
        (cmath.rect(e, d) * ((cmath.rect(e, d) - bus) / cmath.rect(z.magnitude, z.angle)).conjugate()).real
        for e, d, z in sources
    )
    return BusSolution(v, phi, (ps[0], ps[1]), (qs[0], qs[1]), p_send, it, norm)


@dataclass(frozen=True)
class SimState:
    t: float
    delta: tuple[float, float]
    e: tuple[float, float]
    w: tuple[float, float]
    meas: tuple[PowerMeasurement, PowerMeasurement]
    bus_guess: tuple[float, float] | None = None


def flat_start(scenario: MicrogridScenario) -> SimState:
    """Zero angles, setpoint voltages and frequencies, filters at zero."""
    srcs = (scenario.source_a, scenario.source_b)
    return SimState(
        t=0.0,
        delta=(0.0, 0.0),
        e=tuple(s.droop.e_set for s in srcs),
        w=tuple(s.droop.w_set for s in srcs),
        meas=tuple(PowerMeasurement(0.0, 0.0, s.filter_cutoff) for s in srcs),
    )


def solve_state(state: SimState, scenario: MicrogridScenario) -> BusSolution:
    z = scenario.coupling
    return solve_bus(
        state.e[0], state.delta[0], state.e[1], state.delta[1], z, z,
        scenario.load_p, scenario.load_q, guess=state.bus_guess, s_base=scenario.s_base,
    )


def advance(state: SimState, bus: BusSolution, scenario: MicrogridScenario) -> SimState:
    """Filter the solved flows, apply droop, and integrate the angles."""
    srcs = (scenario.source_a, scenario.source_b)
    meas, e, w, delta = [], [], [], []
    for k, src in enumerate(srcs):
        m = lpf_update(state.meas[k], bus.p[k], bus.q[k], scenario.dt)
        e_k, w_k = droop_update(src.droop, m)
        meas.append(m)
        e.append(e_k)
        w.append(w_k)
        delta.append(state.delta[k] + (w_k - scenario.w_nominal) * scenario.dt)
    return SimState(
        t=state.t + scenario.dt,
        delta=tuple(delta), e=tuple(e), w=tuple(w), meas=tuple(meas),
        bus_guess=(bus.v_bus, bus.phi_bus),
    )


def sim_step(state: SimState, scenario: MicrogridScenario) -> SimState:
    """One closed-loop iteration: solve bus, filter, droop, advance angle."""
    return advance(state, solve_state(state, scenario), scenario)


def state_rate(prev: SimState, new: SimState, scenario: MicrogridScenario) -> float:
    """Largest per-unit rate of change across the non-rotating state variables.

    Absolute angles drift at the steady-state frequency offset, so only the
    angle difference between the two inverters enters.
    """
    dt = new.t - prev.t
    s_base, w0 = scenario.s_base, scenario.w_nominal
    rates = [abs((new.delta[0] - new.delta[1]) - (prev.delta[0] - prev.delta[1])) / dt / w0]
    for k in range(2):
        e_set = (scenario.source_a, scenario.source_b)[k].droop.e_set
        rates.append(abs(new.meas[k].p - prev.meas[k].p) / dt / s_base)
        rates.append(abs(new.meas[k].q - prev.meas[k].q) / dt / s_base)
        rates.append(abs(new.e[k] - prev.e[k]) / dt / e_set)
        rates.append(abs(new.w[k] - prev.w[k]) / dt / w0)
    return max(rates)


@dataclass
class SimTrace:
    """Per-step record of a run; index 1 of the 2-column arrays is the second source."""

    t: np.ndarray
    p: np.ndarray
    q: np.ndarray
    e: np.ndarray
    w: np.ndarray
    delta: np.ndarray
    v_bus: np.ndarray
    phi_bus: np.ndarray
    p_send: np.ndarray
    steady: bool
    final_rate: float
    scenario: MicrogridScenario

    @property
    def freq(self) -> np.ndarray:
        return self.w / (2.0 * math.pi)

    @property
    def system_frequency(self) -> np.ndarray:
        return self.freq.mean(axis=1)

    def __len__(self):
        return len(self.t)


def check_dc_limits(trace: SimTrace) -> None:
    """Fail if the final dispatch exceeds what a source's DC side can supply."""
    srcs = (trace.scenario.source_a, trace.scenario.source_b)
    for k, src in enumerate(srcs):
        p_final = trace.p_send[-1, k]
        if p_final > src.dc_available * (1.0 + 1e-9):
            raise SizingError(
                f"source {src.name!r} is asked for {p_final:.6g} W but its DC side "
                f"supplies at most {src.dc_available:.6g} W"
            )


def run(scenario: MicrogridScenario, *, check_dc: bool = True) -> SimTrace:
    """Integrate from flat start to ``t_end``."""
    n = scenario.n_steps + 1
    cols = {name: np.empty((n, 2)) for name in ("p", "q", "e", "w", "delta", "p_send")}
    t = np.empty(n)
    v_bus = np.empty(n)
    phi_bus = np.empty(n)

    state = flat_start(scenario)
    prev = state
    for k in range(n):
        bus = solve_state(state, scenario)
        t[k] = k * scenario.dt
        cols["p"][k] = bus.p
        cols["q"][k] = bus.q
        cols["e"][k] = state.e
        cols["w"][k] = state.w
        cols["delta"][k] = state.delta
        cols["p_send"][k] = bus.p_send
        v_bus[k] = bus.v_bus
        phi_bus[k] = bus.phi_bus
        if k < n - 1:
            prev, state = state, advance(state, bus, scenario)

    final_rate = state_rate(prev, state, scenario) if n > 1 else math.inf
    trace = SimTrace(t=t, v_bus=v_bus, phi_bus=phi_bus, steady=final_rate < STEADY_RATE_TOL,
                     final_rate=final_rate, scenario=scenario, **cols)
    if check_dc and trace.steady:
        check_dc_limits(trace)
    return trace


@dataclass(frozen=True)
class SteadyStateReport:
    p: tuple[float, float]
    q: tuple[float, float]
    e: tuple[float, float]
    f: tuple[float, float]
    v_bus: float
    load_p_served: float
    load_q_served: float
    p_balance_residual: float
    transfer_losses: float

    def summary(self, names=("source 1", "source 2")) -> str:
        parts = [
            f"{name}: P={self.p[k] / 1e3:.4f} kW, Q={self.q[k] / 1e3:.4f} kvar, "
            f"E={self.e[k]:.3f} V, f={self.f[k]:.6f} Hz"
            for k, name in enumerate(names)
        ]
        return (
            "Steady state reached. " + "; ".join(parts)
            + f". Bus voltage {self.v_bus:.3f} V; load served "
            f"{self.load_p_served / 1e3:.4f} kW / {self.load_q_served / 1e3:.4f} kvar; "
            f"transfer losses {self.transfer_losses:.3g} W."
        )


def steady_state_report(trace: SimTrace) -> SteadyStateReport:
    """Averages over the last 10 % of a steady trace."""
    if not trace.steady:
        raise ReportingError(
            f"trace has not settled (state rate {trace.final_rate:.3e} pu/s at t_end); "
            "increase t_end"
        )
    n = len(trace)
    tail = slice(n - max(1, n // 10), n)
    p = trace.p[tail].mean(axis=0)
    q = trace.q[tail].mean(axis=0)
    p_send = trace.p_send[tail].mean(axis=0)
    sc = trace.scenario
    return SteadyStateReport(
        p=(float(p[0]), float(p[1])),
        q=(float(q[0]), float(q[1])),
        e=tuple(float(x) for x in trace.e[tail].mean(axis=0)),
        f=tuple(float(x) for x in trace.freq[tail].mean(axis=0)),
        v_bus=float(trace.v_bus[tail].mean()),
        load_p_served=float(p.sum()),
        load_q_served=float(q.sum()),
        p_balance_residual=float(p.sum() - sc.load_p),
        transfer_losses=float(p_send.sum() - sc.load_p),
    )


def _fmt(x) -> str:
    return repr(float(x))


def write_trace_csv(trace: SimTrace, fh: TextIO) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(TRACE_HEADER)
    for k in range(len(trace)):
        writer.writerow([
            _fmt(trace.t[k]),
            _fmt(trace.p[k, 0]), _fmt(trace.q[k, 0]), _fmt(trace.e[k, 0]),
            _fmt(trace.freq[k, 0]), _fmt(trace.delta[k, 0]),
            _fmt(trace.p[k, 1]), _fmt(trace.q[k, 1]), _fmt(trace.e[k, 1]),
            _fmt(trace.freq[k, 1]), _fmt(trace.delta[k, 1]),
            _fmt(trace.v_bus[k]), _fmt(trace.phi_bus[k]),
        ])


def write_droop_csv(trace: SimTrace, fh: TextIO) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(DROOP_HEADER)
    f_sys = trace.system_frequency
    for k in range(len(trace)):
        writer.writerow([
            _fmt(trace.t[k]), _fmt(trace.p[k, 0]), _fmt(trace.q[k, 0]),
            _fmt(trace.p[k, 1]), _fmt(trace.q[k, 1]), _fmt(f_sys[k]), _fmt(trace.v_bus[k]),
        ])
