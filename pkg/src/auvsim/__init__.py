"""Deterministic software twin of a small tethered AUV.

Fixed-step vehicle and sensor simulation, the layered mission controller,
a surface-gated command link, and mission logging/analysis tools.
"""

__version__ = "0.1.0"

from .config import MissionConfig, default_config, load_config
from .control import ControlConfig, MissionPhase, forward_step, heading_error, mission_tick
from .dynamics import (
    ALL_STOP,
    ThrusterCommand,
    VehicleParams,
    VehicleState,
    float_position,
    net_buoyancy_force,
    step,
    thrust_forces,
)
from .mission import analyze, run_headless, run_scripted
from .missionlog import MissionLog, depth_profile, track_length
from .protocol import link_available, parse_command
from .sensors import Calibration, SensorConfig, SensorSuite, calibrate, pressure_to_depth

__all__ = [
    "__version__",
    "ALL_STOP",
    "Calibration",
    "ControlConfig",
    "MissionConfig",
    "MissionLog",
    "MissionPhase",
    "SensorConfig",
    "SensorSuite",
    "ThrusterCommand",
    "VehicleParams",
    "VehicleState",
    "analyze",
    "calibrate",
    "default_config",
    "depth_profile",
    "float_position",
    "forward_step",
    "heading_error",
    "link_available",
    "load_config",
    "mission_tick",
    "net_buoyancy_force",
    "parse_command",
    "pressure_to_depth",
    "run_headless",
    "run_scripted",
    "step",
    "thrust_forces",
    "track_length",
]
