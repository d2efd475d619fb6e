"""Plain-text key=value configuration for a whole mission.

Bare keys configure the vehicle physics (VehicleParams field names);
`sensor.*`, `control.*` and `sim.*` namespaces configure the sensor suite,
the controller and the run harness. Unknown keys are errors so a typo
cannot silently miscalibrate a run. `--set key=value` overrides use the
same grammar and win over file values.
"""

from __future__ import annotations

import types
import typing
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Sequence

from .control import ControlConfig
from .dynamics import VehicleParams
from .sensors import SensorConfig


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class SimConfig:
    """Harness settings: integration step, log cadence, GPS model."""

    dt_s: float = 0.02
    telemetry_decimation: int = 5  # frame every Nth control period
    gps_fix_hz: float = 1.0
    gps_noise_std_m: float = 1.5
    max_mission_s: float = 3600.0  # hard stop for runaway missions
    gps_anchor_lat: float | None = None
    gps_anchor_lon: float | None = None

    def __post_init__(self) -> None:
        if not 0 < self.dt_s <= 0.1:
            raise ValueError("dt_s must be in (0, 0.1]")
        if self.telemetry_decimation < 1:
            raise ValueError("telemetry_decimation must be >= 1")
        if self.gps_fix_hz <= 0:
            raise ValueError("gps_fix_hz must be positive")
        if self.gps_noise_std_m < 0:
            raise ValueError("gps_noise_std_m must be nonnegative")
        if self.max_mission_s <= 0:
            raise ValueError("max_mission_s must be positive")
        if (self.gps_anchor_lat is None) != (self.gps_anchor_lon is None):
            raise ValueError("gps anchor needs both lat and lon")

    @property
    def gps_anchor(self) -> tuple[float, float] | None:
        if self.gps_anchor_lat is None or self.gps_anchor_lon is None:
            return None
        return (self.gps_anchor_lat, self.gps_anchor_lon)


@dataclass(frozen=True)
class MissionConfig:
    params: VehicleParams
    sensors: SensorConfig
    control: ControlConfig
    sim: SimConfig

    def __post_init__(self) -> None:
        if self.control.surface_depth_m < self.params.sensor_mount_offset_m:
            raise ValueError(
                "control.surface_depth_m below the sensor mount offset: the vehicle could never read as surfaced"
            )
        ratio = self.control.control_period_s / self.sim.dt_s
        if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
            raise ValueError("control_period_s must be a whole multiple of sim.dt_s")

    @property
    def substeps(self) -> int:
        return round(self.control.control_period_s / self.sim.dt_s)


def default_config() -> MissionConfig:
    params = VehicleParams()
    return MissionConfig(
        params=params,
        sensors=SensorConfig(),
        control=replace(ControlConfig(), sensor_mount_offset_m=params.sensor_mount_offset_m),
        sim=SimConfig(),
    )


# ---------------------------------------------------------------- parsing

def _coerce(name: str, hint: object, raw: str) -> object:
    raw = raw.strip()
    origin = typing.get_origin(hint)
    if origin is typing.Union or origin is types.UnionType:  # Optional[...] and int|str unions
        args = [a for a in typing.get_args(hint) if a is not type(None)]
        if raw.lower() in ("none", ""):
            if type(None) in typing.get_args(hint):
                return None
            raise ConfigError(f"{name} must not be empty")
        for arg in args:
            try:
                return _coerce(name, arg, raw)
            except ConfigError:
                continue
        raise ConfigError(f"bad value for {name}: {raw!r}")
    if origin is tuple:
        parts = [p for p in raw.split(",") if p.strip()]
        elems = typing.get_args(hint)
        n = len(elems)
        if len(parts) != n:
            raise ConfigError(f"{name} needs {n} comma-separated values, got {len(parts)}")
        return tuple(_coerce(name, elems[i], parts[i]) for i in range(n))
    if hint is float:
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"bad number for {name}: {raw!r}") from None
    if hint is int:
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"bad integer for {name}: {raw!r}") from None
    if hint is str:
        return raw
    raise ConfigError(f"unsupported config field type for {name}")


def _section_updates(cls: type, section: str, items: dict[str, str]) -> dict[str, object]:
    hints = typing.get_type_hints(cls)
    known = {f.name for f in fields(cls)}
    updates: dict[str, object] = {}
    for key, raw in items.items():
        if key not in known:
            raise ConfigError(f"unknown config key: {section}{key}")
        updates[key] = _coerce(f"{section}{key}", hints[key], raw)
    return updates


def parse_config_text(text: str, source: str = "<config>") -> dict[str, dict[str, str]]:
    """Split a config document into namespace buckets of raw strings."""
    buckets: dict[str, dict[str, str]] = {"": {}, "sensor": {}, "control": {}, "sim": {}}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key = value")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise ConfigError(f"{source}:{lineno}: expected key = value")
        if "." in key:
            ns, _, field_name = key.partition(".")
            if ns not in ("sensor", "control", "sim"):
                raise ConfigError(f"{source}:{lineno}: unknown namespace {ns!r}")
            buckets[ns][field_name] = value
        else:
            buckets[""][key] = value
    return buckets


def load_config(path: str | Path | None = None, overrides: Sequence[str] = ()) -> MissionConfig:
    """Build a MissionConfig from an optional file plus --set overrides."""
    buckets = {"": {}, "sensor": {}, "control": {}, "sim": {}}
    if path is not None:
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        buckets = parse_config_text(text, source=str(path))
    for i, item in enumerate(overrides):
        if "=" not in item:
            raise ConfigError(f"override {i}: expected key=value, got {item!r}")
        extra = parse_config_text(item, source=f"--set[{i}]")
        for ns in buckets:
            buckets[ns].update(extra[ns])

    if "sensor_mount_offset_m" in buckets["control"]:
        raise ConfigError("set the bare sensor_mount_offset_m key; the controller copy is synced from it")

    try:
        params = replace(VehicleParams(), **_section_updates(VehicleParams, "", buckets[""]))
        sensors = replace(SensorConfig(), **_section_updates(SensorConfig, "sensor.", buckets["sensor"]))
        control = replace(ControlConfig(), **_section_updates(ControlConfig, "control.", buckets["control"]))
        control = replace(control, sensor_mount_offset_m=params.sensor_mount_offset_m)
        sim = replace(SimConfig(), **_section_updates(SimConfig, "sim.", buckets["sim"]))
        return MissionConfig(params=params, sensors=sensors, control=control, sim=sim)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def config_to_dict(cfg: MissionConfig) -> dict:
    """Nested plain-dict view, used by the config endpoint and banners."""
    from dataclasses import asdict

    return {
        "dynamics": asdict(cfg.params),
        "sensor": asdict(cfg.sensors),
        "control": asdict(cfg.control),
        "sim": asdict(cfg.sim),
    }
