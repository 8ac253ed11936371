"""Scenario configuration, schema validation and DC-side source sizing.

Config files are INI-style with the sections ``[system]``, ``[source.pv]``,
``[source.fc]``, ``[load]`` and ``[sim]``. Every key is optional; unknown
sections or keys are rejected.
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, replace
from typing import Mapping

from scipy.optimize import brentq, minimize_scalar

from . import dmfc, pv_model
from .droop import CouplingImpedance, DroopParams
from .errors import ConfigError, SizingError

POS, NONNEG, COUNT, OPTIONAL_POS, FRACTION = "pos", "nonneg", "count", "optional_pos", "fraction"

_SOURCE_KEYS = {
    "rated_p": (8000.0, POS),
    "rated_q": (1000.0, POS),
    "m_coef": (None, OPTIONAL_POS),
    "n_coef": (None, OPTIONAL_POS),
    "filter_cutoff": (10.0, POS),
}

SCHEMA: dict[str, dict[str, tuple]] = {
    "system": {
        "nominal_voltage_rms": (320.0, POS),
        # 5 Hz by default: at 50 Hz a 35 mH coupling cannot carry 8 kW per source.
        "nominal_frequency": (5.0, POS),
        "filter_inductance": (0.035, POS),
        "filter_capacitance": (3e-6, POS),
    },
    "source.pv": {
        **_SOURCE_KEYS,
        "i_pv": (8.0, POS),
        "i_0": (1e-10, POS),
        "ideality": (1.3, POS),
        "n_cell": (54, COUNT),
        "temperature": (298.15, POS),
        "irradiance": (1000.0, POS),
    },
    "source.fc": {
        **_SOURCE_KEYS,
        "temperature": (343.15, POS),
        "p_h2_anode": (1.0e5, POS),
        "p_h2_cathode": (1.0e-17, POS),
        "n_h2_flow": (5.18e-4, POS),
        "area": (0.05, POS),
        "r1": (0.3, NONNEG),
        "r2": (0.1, NONNEG),
        "i_max_norm": (1.0, POS),
        "eta_design": (0.5, FRACTION),
    },
    "load": {
        "p": (16000.0, NONNEG),
        "q": (2000.0, NONNEG),
    },
    "sim": {
        "dt": (1e-3, POS),
        "t_end": (10.0, POS),
    },
}


def _coerce(section: str, key: str, raw) -> float | int | None:
    field = f"{section}.{key}"
    default, kind = SCHEMA[section][key]
    if raw is None:
        return default
    try:
        value = float(raw)
    except (TypeError, ValueError):
        raise ConfigError(field, f"expected a number, got {raw!r}") from None
    if not math.isfinite(value):
        raise ConfigError(field, f"must be finite, got {raw!r}")
    if kind in (POS, OPTIONAL_POS) and not value > 0:
        raise ConfigError(field, f"must be positive, got {raw!r}")
    if kind == NONNEG and value < 0:
        raise ConfigError(field, f"must be non-negative, got {raw!r}")
    if kind == FRACTION and not 0 < value <= 1:
        raise ConfigError(field, f"must lie in (0, 1], got {raw!r}")
    if kind == COUNT:
        if value < 1 or value != int(value):
            raise ConfigError(field, f"must be an integer >= 1, got {raw!r}")
        return int(value)
    return value


def validate(config: Mapping[str, Mapping[str, object]]) -> dict[str, dict[str, object]]:
    """Fill defaults and check every field against the schema."""
    for section, values in config.items():
        if section not in SCHEMA:
            raise ConfigError(section, "unknown section")
        for key in values:
            if key not in SCHEMA[section]:
                raise ConfigError(f"{section}.{key}", "unknown key")
    return {
        section: {key: _coerce(section, key, config.get(section, {}).get(key)) for key in keys}
        for section, keys in SCHEMA.items()
    }


def read_config(path) -> dict[str, dict[str, str]]:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read config: {exc.strerror or exc}") from None
    except configparser.Error as exc:
        raise ConfigError(str(path), f"malformed config: {exc}") from None
    return {s: dict(parser.items(s)) for s in parser.sections()}


def apply_overrides(config, overrides, default_section=None):
    """Merge ``key=value`` overrides; dotted keys name ``section.key``.

    The last dot separates the key, so ``source.pv.rated_p=8000`` sets
    ``rated_p`` in ``[source.pv]``. Later overrides win.
    """
    merged = {s: dict(v) for s, v in config.items()}
    for item in overrides:
        name, sep, value = item.partition("=")
        name = name.strip()
        if not sep or not name:
            raise ConfigError(item, "override must look like key=value")
        section, dot, key = name.rpartition(".")
        if not dot:
            if default_section is None:
                raise ConfigError(name, "override needs a section prefix, e.g. load.p=1000")
            section = default_section
        merged.setdefault(section, {})[key] = value.strip()
    return merged


@dataclass(frozen=True)
class SourceSpec:
    """One inverter-interfaced source as seen by the network."""

    name: str
    droop: DroopParams
    rated_p: float
    rated_q: float
    filter_cutoff: float
    dc_available: float


@dataclass(frozen=True)
class MicrogridScenario:
    nominal_voltage_rms: float
    nominal_frequency: float
    filter_inductance: float
    filter_capacitance: float
    source_a: SourceSpec
    source_b: SourceSpec
    load_p: float
    load_q: float
    dt: float
    t_end: float
    pv_array: pv_model.PvArray | None = None
    pv_strings: int = 1
    fc_cell: dmfc.DmfcCell | None = None
    fc_eta_rated: float = float("nan")

    def __post_init__(self):
        if not self.t_end >= self.dt > 0:
            raise ConfigError("sim", f"need 0 < dt <= t_end, got dt={self.dt!r}, t_end={self.t_end!r}")

    @property
    def w_nominal(self) -> float:
        return 2.0 * math.pi * self.nominal_frequency

    @property
    def coupling(self) -> CouplingImpedance:
        # The filter capacitor's shunt reactance is megohms; it is left out.
        return CouplingImpedance.inductor(self.filter_inductance, self.nominal_frequency)

    @property
    def s_base(self) -> float:
        return self.source_a.rated_p + self.source_b.rated_p

    @property
    def n_steps(self) -> int:
        return int(math.floor(self.t_end / self.dt + 1e-9))

    def swapped(self) -> "MicrogridScenario":
        return replace(self, source_a=self.source_b, source_b=self.source_a)


def size_pv(array: pv_model.PvArray, rated_p: float) -> tuple[pv_model.PvArray, int]:
    """Smallest number of parallel strings whose MPP covers ``rated_p``."""
    p_module = pv_model.mpp_oracle(array).power
    n = max(1, math.ceil(rated_p / p_module))
    sized = pv_model.scale_parallel(array, n)
    if pv_model.mpp_oracle(sized).power < rated_p:
        n += 1
        sized = pv_model.scale_parallel(array, n)
    return sized, n


def fc_peak(cell: dmfc.DmfcCell) -> tuple[float, float]:
    """Utilization and stack power at the peak of the power curve."""
    res = minimize_scalar(
        lambda eta: -dmfc.stack_power(cell, eta),
        bounds=(0.0, 1.0), method="bounded", options={"xatol": 1e-12},
    )
    eta = float(res.x)
    # The peak may sit on the eta = 1 boundary.
    if dmfc.stack_power(cell, 1.0) >= dmfc.stack_power(cell, eta):
        eta = 1.0
    return eta, dmfc.stack_power(cell, eta)


def size_fc(cell: dmfc.DmfcCell, rated_p: float, eta_design: float) -> tuple[dmfc.DmfcCell, float]:
    """Series cell count for ``rated_p`` at ``eta_design``, and the exact rated utilization."""
    p_cell = dmfc.stack_power(replace(cell, n_series=1), eta_design)
    if not p_cell > 0:
        raise SizingError(f"fuel cell delivers no power at eta_design={eta_design:g}")
    sized = replace(cell, n_series=max(1, math.ceil(rated_p / p_cell)))
    eta_peak, p_peak = fc_peak(sized)
    if p_peak < rated_p:
        raise SizingError(f"fuel cell stack peaks at {p_peak:.6g} W, below rated {rated_p:.6g} W")
    eta_rated = brentq(lambda eta: dmfc.stack_power(sized, eta) - rated_p, 0.0, eta_peak, xtol=1e-14)
    return sized, float(eta_rated)


def _source(name, section, e_set, w_set, dc_available):
    droop = DroopParams.sized_for(e_set, w_set, section["rated_p"], section["rated_q"])
    if section["m_coef"] is not None:
        droop = replace(droop, m_coef=section["m_coef"])
    if section["n_coef"] is not None:
        droop = replace(droop, n_coef=section["n_coef"])
    return SourceSpec(name, droop, section["rated_p"], section["rated_q"],
                      section["filter_cutoff"], dc_available)


def build_scenario(config: Mapping[str, Mapping[str, object]] | None = None) -> MicrogridScenario:
    """Validated scenario with reference defaults and sized DC sources."""
    cfg = validate(config or {})
    system, pv_cfg, fc_cfg = cfg["system"], cfg["source.pv"], cfg["source.fc"]
    e_set = system["nominal_voltage_rms"]
    w_set = 2.0 * math.pi * system["nominal_frequency"]

    try:
        module = pv_model.PvArray(pv_cfg["i_pv"], pv_cfg["i_0"], pv_cfg["ideality"],
                                  pv_cfg["n_cell"], pv_cfg["temperature"])
    except ValueError as exc:
        raise ConfigError("source.pv", str(exc)) from None
    try:
        cell = dmfc.DmfcCell(fc_cfg["temperature"], fc_cfg["p_h2_anode"], fc_cfg["p_h2_cathode"],
                             fc_cfg["n_h2_flow"], fc_cfg["area"], fc_cfg["r1"], fc_cfg["r2"],
                             fc_cfg["i_max_norm"])
    except ValueError as exc:
        raise ConfigError("source.fc", str(exc)) from None
    module = pv_model.with_irradiance(module, pv_cfg["irradiance"])
    pv_array, strings = size_pv(module, pv_cfg["rated_p"])
    fc_cell, eta_rated = size_fc(cell, fc_cfg["rated_p"], fc_cfg["eta_design"])

    return MicrogridScenario(
        nominal_voltage_rms=e_set,
        nominal_frequency=system["nominal_frequency"],
        filter_inductance=system["filter_inductance"],
        filter_capacitance=system["filter_capacitance"],
        source_a=_source("pv", pv_cfg, e_set, w_set, pv_model.mpp_oracle(pv_array).power),
        source_b=_source("fc", fc_cfg, e_set, w_set, fc_peak(fc_cell)[1]),
        load_p=cfg["load"]["p"],
        load_q=cfg["load"]["q"],
        dt=cfg["sim"]["dt"],
        t_end=cfg["sim"]["t_end"],
        pv_array=pv_array,
        pv_strings=strings,
        fc_cell=fc_cell,
        fc_eta_rated=eta_rated,
    )
