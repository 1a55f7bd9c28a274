"""Scenario configuration files.

Configs are JSON objects. Physical quantities carry their unit in the key
name (``airgap_mm``, ``slot_angle_deg``) and are converted to SI here, so the
rest of the package only ever sees SI values.

Top-level keys: ``motor``, ``sim``, ``scenarios``, ``outputs``, ``output_dir``,
``workers`` and ``thresholds``. Every key is optional; an empty object runs
the default motor with one healthy scenario.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field, fields
from pathlib import Path

from .diagnosis import Thresholds
from .errors import ConfigError, SpmsmError
from .fault_model import FaultSpec, Healthy, fault_from_dict, fault_to_dict
from .motor_core import MotorSpec
from .synthesis import SimConfig

_MM = 1e-3
_DEG = math.pi / 180

# config key -> (MotorSpec field, factor to SI)
MOTOR_KEYS = {
    "stator_outer_diameter_mm": ("stator_outer_diameter", _MM),
    "stator_inner_diameter_mm": ("stator_inner_diameter", _MM),
    "rotor_outer_diameter_mm": ("rotor_outer_diameter", _MM),
    "core_length_mm": ("core_length", _MM),
    "airgap_mm": ("airgap", _MM),
    "magnet_height_mm": ("magnet_height", _MM),
    "magnet_count": ("magnet_count", None),
    "slot_count": ("slot_count", None),
    "pole_pairs": ("pole_pairs", None),
    "pole_count": ("pole_count", None),
    "terminal_current_peak_a": ("terminal_current_peak", 1.0),
    "supply_frequency_hz": ("supply_frequency", 1.0),
    "rated_speed_rpm": ("rated_speed", 1.0),
    "turns_per_phase": ("turns_per_phase", 1.0),
    "average_diameter_mm": ("average_diameter", _MM),
    "tooth_height_mm": ("tooth_height", _MM),
    "principal_tooth_angle_deg": ("principal_tooth_angle", _DEG),
    "inserted_tooth_angle_deg": ("inserted_tooth_angle", _DEG),
    "slot_angle_deg": ("slot_angle", _DEG),
    "airgap_flux_density_t": ("airgap_flux_density", 1.0),
    "stator_yoke_flux_density_t": ("stator_yoke_flux_density", 1.0),
    "fill_factor": ("fill_factor", 1.0),
    "magnet_remanence_20c_t": ("magnet_remanence_20C", 1.0),
    "magnet_temp_coeff_per_degc": ("magnet_temp_coeff", 1.0),
    "magnet_rel_permeability": ("magnet_rel_permeability", 1.0),
    "magnet_arc_angle_deg": ("magnet_arc_angle", _DEG),
    "leakage_coeff": ("leakage_coeff", 1.0),
}

SIM_KEYS = {
    "mechanical_periods": ("mechanical_periods", None),
    "samples_per_mechanical_period": ("samples_per_mechanical_period", None),
    "quadrature_points_per_tooth": ("quadrature_points_per_tooth", None),
    "current_phase_offset_deg": ("current_phase_offset", _DEG),
    "diagnostic_coil": ("diagnostic_coil", None),
    "permeance_model": ("permeance_model", "str"),
}

OUTPUT_KEYS = ("waveforms", "spectra", "harmonic_table", "report", "plots")
TOP_KEYS = ("motor", "sim", "scenarios", "outputs", "output_dir", "workers", "thresholds")
_NAME_RE = re.compile(r"^[A-Za-z0-9_.-]+$")


@dataclass(frozen=True)
class Outputs:
    waveforms: bool = True
    spectra: bool = True
    harmonic_table: bool = True
    report: bool = True
    plots: bool = False


@dataclass(frozen=True)
class Scenario:
    name: str
    fault: FaultSpec


@dataclass(frozen=True)
class ScenarioConfig:
    motor: MotorSpec = field(default_factory=MotorSpec)
    sim: SimConfig = field(default_factory=SimConfig)
    scenarios: tuple = (Scenario("healthy", Healthy()),)
    outputs: Outputs = field(default_factory=Outputs)
    output_dir: str = "output"
    workers: int = 1
    thresholds: Thresholds = field(default_factory=Thresholds)

    def __post_init__(self):
        if not self.scenarios:
            raise ConfigError("at least one scenario is required")
        names = [s.name for s in self.scenarios]
        dupes = sorted({n for n in names if names.count(n) > 1})
        if dupes:
            raise ConfigError(f"duplicate scenario names: {dupes}")
        if self.outputs.report and self.baseline is None:
            raise ConfigError("report output needs a healthy baseline scenario "
                              "(named 'healthy' or with fault 'healthy')")
        if int(self.workers) != self.workers or self.workers < 1:
            raise ConfigError(f"workers must be an integer >= 1, got {self.workers!r}")

    @property
    def baseline(self) -> Scenario | None:
        """The scenario named ``healthy``, else the first healthy-fault scenario."""
        for s in self.scenarios:
            if s.name == "healthy":
                return s
        for s in self.scenarios:
            if s.fault.tag == "healthy":
                return s
        return None

    def snapshot(self) -> dict:
        """Resolved configuration in SI units, for the run manifest."""
        motor = {f.name: getattr(self.motor, f.name) for f in fields(self.motor)}
        motor["average_diameter"] = self.motor.mean_diameter
        motor["magnet_arc_angle"] = self.motor.magnet_arc
        return {
            "motor": motor,
            "sim": {f.name: getattr(self.sim, f.name) for f in fields(self.sim)},
            "scenarios": [{"name": s.name, **fault_to_dict(s.fault)} for s in self.scenarios],
            "outputs": {k: getattr(self.outputs, k) for k in OUTPUT_KEYS},
            "output_dir": self.output_dir,
            "workers": self.workers,
            "thresholds": {f.name: getattr(self.thresholds, f.name)
                           for f in fields(self.thresholds)},
        }


def _reject_unknown(section: str, data: dict, allowed):
    for key in data:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in {section}; allowed: {sorted(allowed)}")


def _expect_object(section, value):
    if not isinstance(value, dict):
        raise ConfigError(f"{section} must be an object, got {type(value).__name__}")
    return value


def _convert(section, table, data):
    out = {}
    for key, value in data.items():
        name, factor = table[key]
        if factor == "str":
            if not isinstance(value, str):
                raise ConfigError(f"{section}.{key} must be a string")
            out[name] = value
            continue
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{section}.{key} must be a number, got {value!r}")
        if factor is None:
            if int(value) != value:
                raise ConfigError(f"{section}.{key} must be an integer, got {value!r}")
            out[name] = int(value)
        else:
            out[name] = float(value) * factor
    return out


def parse_config(data: dict, base_dir: Path | None = None) -> ScenarioConfig:
    """Build a :class:`ScenarioConfig` from an already-decoded JSON object."""
    _expect_object("config", data)
    _reject_unknown("config", data, TOP_KEYS)
    try:
        motor_raw = _expect_object("motor", data.get("motor", {}))
        _reject_unknown("motor", motor_raw, MOTOR_KEYS)
        motor = MotorSpec(**_convert("motor", MOTOR_KEYS, motor_raw))

        sim_raw = _expect_object("sim", data.get("sim", {}))
        _reject_unknown("sim", sim_raw, SIM_KEYS)
        sim = SimConfig(**_convert("sim", SIM_KEYS, sim_raw))

        out_raw = _expect_object("outputs", data.get("outputs", {}))
        _reject_unknown("outputs", out_raw, OUTPUT_KEYS)
        for key, value in out_raw.items():
            if not isinstance(value, bool):
                raise ConfigError(f"outputs.{key} must be true or false")
        outputs = Outputs(**out_raw)

        thr_raw = _expect_object("thresholds", data.get("thresholds", {}))
        _reject_unknown("thresholds", thr_raw, [f.name for f in fields(Thresholds)])
        thresholds = Thresholds(**{k: float(v) for k, v in thr_raw.items()})

        raw_scen = data.get("scenarios", [{"name": "healthy", "fault": "healthy"}])
        if not isinstance(raw_scen, list):
            raise ConfigError("scenarios must be a list")
        scenarios = []
        for i, entry in enumerate(raw_scen):
            entry = dict(_expect_object(f"scenarios[{i}]", entry))
            name = entry.pop("name", None)
            if not isinstance(name, str) or not _NAME_RE.match(name):
                raise ConfigError(f"scenarios[{i}].name must match {_NAME_RE.pattern}, "
                                  f"got {name!r}")
            try:
                fault = fault_from_dict(entry)
            except SpmsmError as exc:
                raise ConfigError(f"scenario {name!r}: {exc}") from None
            scenarios.append(Scenario(name, fault))

        output_dir = data.get("output_dir", "output")
        if not isinstance(output_dir, str) or not output_dir:
            raise ConfigError("output_dir must be a non-empty string")
        if base_dir is not None and not Path(output_dir).is_absolute():
            output_dir = str(base_dir / output_dir)
        workers = data.get("workers", 1)
        if isinstance(workers, bool) or not isinstance(workers, int):
            raise ConfigError(f"workers must be an integer, got {workers!r}")
        return ScenarioConfig(motor, sim, tuple(scenarios), outputs, output_dir, workers,
                              thresholds)
    except ConfigError:
        raise
    except (SpmsmError, TypeError) as exc:
        raise ConfigError(str(exc)) from None


def load_scenario(path) -> ScenarioConfig:
    """Read and validate a scenario file.

    A relative ``output_dir`` is resolved against the config file's folder.

    Raises
    ------
    ConfigError
        On unreadable files, JSON syntax errors (with line and column),
        unknown keys or out-of-range values.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return parse_config(data, path.parent)
