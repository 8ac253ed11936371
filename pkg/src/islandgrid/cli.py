"""Command-line entry point.

Exit codes: 0 success, 1 simulation did not settle, 2 usage, 3 config,
4 solver, 5 sizing, 6 I/O.
"""
from __future__ import annotations

import argparse
import io
import os
import sys
from dataclasses import dataclass, field

from . import dmfc, mppt, network, pv_model
from .errors import ConfigError, ReportingError, SizingError, SolverError
from .scenario import apply_overrides, build_scenario, read_config, validate

EXIT_OK, EXIT_UNSETTLED, EXIT_USAGE, EXIT_CONFIG, EXIT_SOLVER, EXIT_SIZING, EXIT_IO = range(7)

SUBCOMMANDS = ("pv-curve", "mppt-run", "fc-polarization", "droop-sim", "microgrid-run")

# Section that bare (undotted) --set keys belong to.
_DEFAULT_SECTION = {
    "pv-curve": "source.pv",
    "mppt-run": "source.pv",
    "fc-polarization": "source.fc",
}


@dataclass
class Command:
    subcommand: str
    config_path: str | None = None
    output_path: str | None = None
    overrides: list[str] = field(default_factory=list)
    options: dict = field(default_factory=dict)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="islandgrid",
        description="Islanded PV + DMFC microgrid with droop-controlled inverters.",
    )
    sub = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--config", "-c", dest="config_path", help="scenario config file")
        p.add_argument("--output", "-o", dest="output_path", help="CSV output path (default: stdout)")
        p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config value; may repeat, last one wins")
        return p

    p = add("pv-curve", "I-V / P-V sweep of the PV array")
    p.add_argument("--points", type=int, default=101)
    p = add("mppt-run", "closed-loop perturb-and-observe tracking on the PV array")
    p.add_argument("--step", type=float, default=None, help="perturbation step [V] (default 0.5%% of v_oc)")
    p.add_argument("--v-start", type=float, default=None, help="starting voltage [V] (default 0.2*v_oc)")
    p.add_argument("--max-iters", type=int, default=1000)
    p = add("fc-polarization", "fuel cell polarization curve")
    p.add_argument("--points", type=int, default=101)
    add("droop-sim", "droop-controlled power sharing, no DC-side limits")
    add("microgrid-run", "full microgrid run to steady state")
    return parser


def parse_args(argv: list[str] | None = None) -> Command:
    ns = vars(_build_parser().parse_args(argv))
    base = {k: ns.pop(k) for k in ("subcommand", "config_path", "output_path", "overrides")}
    return Command(**base, options=ns)


def _load_config(cmd: Command) -> dict:
    cfg = read_config(cmd.config_path) if cmd.config_path else {}
    return apply_overrides(cfg, cmd.overrides, _DEFAULT_SECTION.get(cmd.subcommand))


def _pv_module(cfg) -> pv_model.PvArray:
    pv = validate(cfg)["source.pv"]
    try:
        array = pv_model.PvArray(pv["i_pv"], pv["i_0"], pv["ideality"], pv["n_cell"], pv["temperature"])
    except ValueError as exc:
        raise ConfigError("source.pv", str(exc)) from None
    return pv_model.with_irradiance(array, pv["irradiance"])


def _fc_cell(cfg) -> dmfc.DmfcCell:
    fc = validate(cfg)["source.fc"]
    try:
        return dmfc.DmfcCell(fc["temperature"], fc["p_h2_anode"], fc["p_h2_cathode"], fc["n_h2_flow"],
                             fc["area"], fc["r1"], fc["r2"], fc["i_max_norm"])
    except ValueError as exc:
        raise ConfigError("source.fc", str(exc)) from None


def _run(cmd: Command, out: io.StringIO) -> tuple[int, str]:
    cfg = _load_config(cmd)
    opts = cmd.options

    if cmd.subcommand == "pv-curve":
        array = _pv_module(cfg)
        if opts["points"] < 2:
            raise ConfigError("--points", "must be >= 2")
        pv_model.write_sweep_csv(pv_model.iv_sweep(array, opts["points"]), out)
        mpp = pv_model.mpp_oracle(array)
        return EXIT_OK, (
            f"PV array: v_oc={pv_model.open_circuit_voltage(array):.4f} V, i_sc={array.i_pv:.4f} A; "
            f"MPP at {mpp.voltage:.4f} V, {mpp.current:.4f} A, {mpp.power:.4f} W."
        )

    if cmd.subcommand == "mppt-run":
        array = _pv_module(cfg)
        v_oc = pv_model.open_circuit_voltage(array)
        step = opts["step"] if opts["step"] is not None else 0.005 * v_oc
        v_start = opts["v_start"] if opts["v_start"] is not None else 0.2 * v_oc
        try:
            state = mppt.mppt_init(v_start, step, v_oc)
            traj = mppt.mppt_run(array, state, opts["max_iters"])
        except ValueError as exc:
            raise ConfigError("mppt-run", str(exc)) from None
        mppt.write_trajectory_csv(traj, out)
        v_set, p_set = mppt.settled_point(traj)
        mpp = pv_model.mpp_oracle(array)
        return EXIT_OK, (
            f"P&O tracker settled around {v_set:.4f} V with {p_set:.4f} W after {len(traj)} samples; "
            f"true MPP is {mpp.voltage:.4f} V, {mpp.power:.4f} W ({100 * p_set / mpp.power:.3f} %)."
        )

    if cmd.subcommand == "fc-polarization":
        cell = _fc_cell(cfg)
        if opts["points"] < 2:
            raise ConfigError("--points", "must be >= 2")
        rows = dmfc.polarization_curve(cell, opts["points"])
        dmfc.write_polarization_csv(rows, out)
        best = max(rows, key=lambda r: r.power_density)
        return EXIT_OK, (
            f"DMFC cell: E_max={dmfc.nernst_emax(cell):.5f} V, i_max={dmfc.faraday_imax(cell):.4f} A/m2; "
            f"peak power density {best.power_density:.4f} W/m2 at {best.current_density:.4f} A/m2."
        )

    scenario = build_scenario(cfg)
    full = cmd.subcommand == "microgrid-run"
    trace = network.run(scenario, check_dc=full)
    if full:
        network.write_trace_csv(trace, out)
    else:
        network.write_droop_csv(trace, out)
    if not trace.steady:
        msg = (f"Run ended at t={trace.t[-1]:g} s without reaching steady state "
               f"(state rate {trace.final_rate:.3e} pu/s); increase sim.t_end.")
        return (EXIT_UNSETTLED if full else EXIT_OK), msg
    report = network.steady_state_report(trace)
    return EXIT_OK, report.summary((f"PV ({scenario.pv_strings} strings)",
                                    f"FC ({scenario.fc_cell.n_series} cells)"))


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def execute(cmd: Command) -> int:
    out = io.StringIO()
    if cmd.output_path is not None:
        target_dir = os.path.dirname(os.path.abspath(cmd.output_path))
        if not os.path.isdir(target_dir) or not os.access(target_dir, os.W_OK):
            print(f"error: cannot write {cmd.output_path}", file=sys.stderr)
            return EXIT_IO
    try:
        status, summary = _run(cmd, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except SizingError as exc:
        print(f"sizing error: {exc}", file=sys.stderr)
        return EXIT_SIZING
    except ReportingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSETTLED
    try:
        _emit(out.getvalue(), cmd.output_path)
    except OSError as exc:
        print(f"error: cannot write {cmd.output_path}: {exc}", file=sys.stderr)
        return EXIT_IO
    print(summary, file=sys.stderr)
    return status


def main(argv: list[str] | None = None) -> int:
    return execute(parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())
