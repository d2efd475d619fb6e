"""Layered mission control: command dispatch plus the forward-movement ladder.

The forward routine evaluates exactly one branch per period, in priority
order pitch, then depth, then heading, then cruise. Depth comparisons are
in sensed-depth space (target plus the sensor mount offset) because the
controller only ever sees the pressure sensor. Corrections are fixed-duty
bang-bang moves; the deadband exists so they do not chatter.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace
from typing import NamedTuple, Union

from .dynamics import ALL_STOP, ThrusterCommand
from .sensors import SensorSnapshot, heading_error

# sentinel for heading_target_deg: latch the current heading when Forward starts
LATCH_HEADING = -1.0

# runtime-settable ControlConfig fields (SET <key> <value>)
SET_KEYS = (
    "target_depth_m",
    "depth_band_m",
    "pitch_limit_deg",
    "heading_tolerance_deg",
    "heading_target_deg",
    "cruise_duty",
)


# ---------------------------------------------------------------- commands

@dataclass(frozen=True)
class Calibrate:
    pass


@dataclass(frozen=True)
class SetParams:
    key: str
    value: float


@dataclass(frozen=True)
class TestConnection:
    pass


@dataclass(frozen=True)
class Descend:
    target_depth_m: float


@dataclass(frozen=True)
class Forward:
    duration_s: float


@dataclass(frozen=True)
class Surface:
    pass


@dataclass(frozen=True)
class End:
    pass


Command = Union[Calibrate, SetParams, TestConnection, Descend, Forward, Surface, End]


@dataclass(frozen=True)
class ParseError:
    line: str
    reason: str


# ---------------------------------------------------------------- config

@dataclass(frozen=True)
class ControlConfig:
    target_depth_m: float = 1.0
    depth_band_m: float = 0.25
    pitch_limit_deg: float = 30.0
    heading_tolerance_deg: float = 10.0
    surface_depth_m: float = 0.25  # sensed depth at which the vehicle counts as surfaced
    control_period_s: float = 0.1
    cruise_duty: float = 0.6
    correction_duty: float = 0.8
    descend_timeout_s: float = 120.0
    surface_timeout_s: float = 120.0
    heading_target_deg: float = LATCH_HEADING
    sensor_mount_offset_m: float = 0.2  # mirrors the dynamics mount offset; see band note
    correction_pitch_deg: float = 18.0  # attitude held while driving up or down
    trim_duty: float = 0.10  # gentle re-level duty used in cruise
    trim_deadband_deg: float = 0.2
    heading_differential_duty: float = 0.3
    calibrate_samples: int = 50

    def __post_init__(self) -> None:
        if self.target_depth_m <= 0:
            raise ValueError("target_depth_m must be positive")
        if self.depth_band_m <= 0:
            raise ValueError("depth_band_m must be positive")
        if not 0 < self.control_period_s <= 1:
            raise ValueError("control_period_s must be in (0, 1]")
        for name in ("cruise_duty", "correction_duty", "trim_duty"):
            if not 0 < getattr(self, name) <= 1:
                raise ValueError(f"{name} must be in (0, 1]")
        if not 0 < self.heading_differential_duty < self.cruise_duty:
            raise ValueError("heading_differential_duty must be in (0, cruise_duty)")
        if self.cruise_duty + self.heading_differential_duty > 1:
            raise ValueError("cruise_duty + heading_differential_duty must not exceed 1")
        if not 0 < self.pitch_limit_deg <= 90:
            raise ValueError("pitch_limit_deg must be in (0, 90]")
        if not 0 < self.correction_pitch_deg < self.pitch_limit_deg:
            raise ValueError("correction_pitch_deg must be in (0, pitch_limit_deg)")
        if self.trim_deadband_deg < 0:
            raise ValueError("trim_deadband_deg must be nonnegative")
        if self.heading_tolerance_deg <= 0:
            raise ValueError("heading_tolerance_deg must be positive")
        if self.surface_depth_m <= 0:
            raise ValueError("surface_depth_m must be positive")
        if self.descend_timeout_s <= 0 or self.surface_timeout_s <= 0:
            raise ValueError("timeouts must be positive")
        if self.sensor_mount_offset_m < 0:
            raise ValueError("sensor_mount_offset_m must be nonnegative")
        if self.surface_depth_m < self.sensor_mount_offset_m:
            # a surfaced hull already reads about the mount offset, so a
            # smaller threshold could never be reached
            raise ValueError("surface_depth_m must be at least sensor_mount_offset_m")
        if self.calibrate_samples < 1:
            raise ValueError("calibrate_samples must be >= 1")
        if self.heading_target_deg >= 0 and not self.heading_target_deg < 360:
            raise ValueError("heading_target_deg must be in [0, 360) or the latch sentinel")


def band_edges(cfg: ControlConfig) -> tuple[float, float]:
    """Depth band in sensed space: target + mount offset, plus/minus band."""
    center = cfg.target_depth_m + cfg.sensor_mount_offset_m
    return center - cfg.depth_band_m, center + cfg.depth_band_m


def apply_set_params(cfg: ControlConfig, key: str, value: float) -> ControlConfig:
    """Whitelisted runtime mutation; raises ValueError on bad key or value."""
    if key not in SET_KEYS:
        raise ValueError(f"parameter {key!r} is not settable")
    return replace(cfg, **{key: value})


# ---------------------------------------------------------------- phases

PHASES = ("AwaitingCommand", "Calibrating", "Descending", "Forward", "Surfacing", "Ended")


@dataclass(frozen=True)
class MissionPhase:
    name: str
    remaining_s: float = 0.0  # Forward countdown
    heading_target_deg: float = LATCH_HEADING  # resolved latch while Forward
    elapsed_s: float = 0.0  # time spent in phase, drives timeouts

    def __post_init__(self) -> None:
        if self.name not in PHASES:
            raise ValueError(f"unknown phase {self.name!r}")


AWAITING = MissionPhase("AwaitingCommand")
ENDED = MissionPhase("Ended")


# ---------------------------------------------------------------- events

@dataclass(frozen=True)
class CommandAccepted:
    command: Command


@dataclass(frozen=True)
class UnknownCommand:
    reason: str


@dataclass(frozen=True)
class FlushLog:
    pass


@dataclass(frozen=True)
class TerminateLink:
    pass


@dataclass(frozen=True)
class DescendTimeout:
    pass


@dataclass(frozen=True)
class SurfaceTimeout:
    pass


# ---------------------------------------------------------------- steps

def _pitch_seek(pitch_deg: float, hold_deg: float, duty: float, deadband_deg: float) -> float:
    """Bang-bang front duty driving pitch toward hold_deg."""
    if pitch_deg > hold_deg + deadband_deg:
        return -duty
    if pitch_deg < hold_deg - deadband_deg:
        return duty
    return 0.0


class LadderStep(NamedTuple):
    thrusters: ThrusterCommand
    tag: str


def forward_step(snapshot: SensorSnapshot, cfg: ControlConfig) -> LadderStep:
    """One forward-movement decision; exactly one branch fires.

    Branch order: pitch limit, depth band, heading tolerance, cruise. Every
    branch keeps the rear pair running (the routine always moves forward).
    The heading target is read from cfg.heading_target_deg; a sentinel value
    (< 0) disables heading correction for this call.
    """
    rear = cfg.cruise_duty
    if abs(snapshot.pitch_deg) > cfg.pitch_limit_deg:
        front = _pitch_seek(snapshot.pitch_deg, 0.0, cfg.correction_duty, 0.0)
        return LadderStep(ThrusterCommand(front, front, rear, rear), "PitchCorrection")

    lo, hi = band_edges(cfg)
    if snapshot.sensed_depth_m < lo or snapshot.sensed_depth_m > hi:
        hold = -cfg.correction_pitch_deg if snapshot.sensed_depth_m < lo else cfg.correction_pitch_deg
        front = _pitch_seek(snapshot.pitch_deg, hold, cfg.correction_duty, 0.0)
        return LadderStep(ThrusterCommand(front, front, rear, rear), "DepthCorrection")

    front = _pitch_seek(snapshot.pitch_deg, 0.0, cfg.trim_duty, cfg.trim_deadband_deg)
    if cfg.heading_target_deg >= 0:
        err = heading_error(snapshot.heading_deg, cfg.heading_target_deg)
        if abs(err) > cfg.heading_tolerance_deg:
            d = cfg.heading_differential_duty
            if err > 0:  # clockwise: port rear runs faster
                rl, rr = rear + d, rear - d
            else:
                rl, rr = rear - d, rear + d
            return LadderStep(ThrusterCommand(front, front, rl, rr), "HeadingCorrection")
    return LadderStep(ThrusterCommand(front, front, rear, rear), "Cruise")


class PhaseStep(NamedTuple):
    thrusters: ThrusterCommand
    done: bool


def descend_step(snapshot: SensorSnapshot, cfg: ControlConfig) -> PhaseStep:
    """Nose-down drive until the sensed depth reaches the band's lower edge."""
    lo, _ = band_edges(cfg)
    if snapshot.sensed_depth_m >= lo:
        return PhaseStep(ALL_STOP, True)
    front = _pitch_seek(snapshot.pitch_deg, -cfg.correction_pitch_deg, cfg.correction_duty, 0.0)
    return PhaseStep(ThrusterCommand(front, front, cfg.cruise_duty, cfg.cruise_duty), False)


def surface_step(snapshot: SensorSnapshot, cfg: ControlConfig) -> PhaseStep:
    """Nose-up drive until the sensed depth says surfaced, then all-stop."""
    if snapshot.sensed_depth_m <= cfg.surface_depth_m:
        return PhaseStep(ALL_STOP, True)
    front = _pitch_seek(snapshot.pitch_deg, cfg.correction_pitch_deg, cfg.correction_duty, 0.0)
    return PhaseStep(ThrusterCommand(front, front, cfg.cruise_duty, cfg.cruise_duty), False)


# ---------------------------------------------------------------- dispatch

class TickResult(NamedTuple):
    phase: MissionPhase
    thrusters: ThrusterCommand
    events: list[object]
    tag: str


def mission_tick(
    phase: MissionPhase,
    snapshot: SensorSnapshot,
    cfg: ControlConfig,
    link_events: deque[Command | ParseError],
) -> TickResult:
    """Advance the main-loop state machine by one control period.

    AwaitingCommand consumes at most one queued item per tick. Every
    executing phase except Ended hands off to Surfacing when done, and
    Surfacing returns to AwaitingCommand, so the vehicle always comes back
    up for the next command. End is terminal and asks the caller to flush
    the log and tear down the link.
    """
    events: list[object] = []
    dt = cfg.control_period_s

    if phase.name == "Ended":
        return TickResult(phase, ALL_STOP, events, "")

    if phase.name == "AwaitingCommand":
        if not link_events:
            return TickResult(phase, ALL_STOP, events, "")
        item = link_events.popleft()
        if isinstance(item, ParseError):
            events.append(UnknownCommand(item.reason))
            return TickResult(phase, ALL_STOP, events, "")
        events.append(CommandAccepted(item))
        if isinstance(item, End):
            events.append(FlushLog())
            events.append(TerminateLink())
            return TickResult(ENDED, ALL_STOP, events, "")
        if isinstance(item, Calibrate):
            return TickResult(MissionPhase("Calibrating"), ALL_STOP, events, "")
        if isinstance(item, Descend):
            # the caller applies the new target depth before the next tick
            return TickResult(MissionPhase("Descending"), ALL_STOP, events, "")
        if isinstance(item, Forward):
            target = cfg.heading_target_deg if cfg.heading_target_deg >= 0 else snapshot.heading_deg
            next_phase = MissionPhase("Forward", remaining_s=item.duration_s, heading_target_deg=target)
            return TickResult(next_phase, ALL_STOP, events, "")
        if isinstance(item, Surface):
            return TickResult(MissionPhase("Surfacing"), ALL_STOP, events, "")
        # SetParams and TestConnection act instantly; no phase of their own
        return TickResult(phase, ALL_STOP, events, "")

    elapsed = phase.elapsed_s + dt

    if phase.name == "Calibrating":
        # epsilon guards the accumulated float sum at the final sample
        if elapsed + 1e-9 >= cfg.calibrate_samples * dt:
            return TickResult(MissionPhase("Surfacing"), ALL_STOP, events, "")
        return TickResult(replace(phase, elapsed_s=elapsed), ALL_STOP, events, "")

    if phase.name == "Descending":
        thrusters, done = descend_step(snapshot, cfg)
        if done:
            return TickResult(MissionPhase("Surfacing"), thrusters, events, "")
        if elapsed > cfg.descend_timeout_s:
            events.append(DescendTimeout())
            return TickResult(MissionPhase("Surfacing"), ALL_STOP, events, "")
        return TickResult(replace(phase, elapsed_s=elapsed), thrusters, events, "Descend")

    if phase.name == "Forward":
        if phase.remaining_s <= 0:
            return TickResult(MissionPhase("Surfacing"), ALL_STOP, events, "")
        effective = cfg if cfg.heading_target_deg == phase.heading_target_deg else replace(
            cfg, heading_target_deg=phase.heading_target_deg
        )
        thrusters, tag = forward_step(snapshot, effective)
        next_phase = replace(phase, remaining_s=phase.remaining_s - dt, elapsed_s=elapsed)
        return TickResult(next_phase, thrusters, events, tag)

    # Surfacing
    thrusters, done = surface_step(snapshot, cfg)
    if done:
        return TickResult(AWAITING, thrusters, events, "")
    if elapsed > cfg.surface_timeout_s:
        events.append(SurfaceTimeout())
        return TickResult(AWAITING, ALL_STOP, events, "")
    return TickResult(replace(phase, elapsed_s=elapsed), thrusters, events, "Surface")
