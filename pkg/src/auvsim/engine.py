"""The simulation loop: dynamics, sensors, controller, link gate, log.

One MissionEngine owns all mutable mission state and advances it one
control period per tick(). Transports deliver bytes concurrently, but every
decision happens inside tick(), so the mission itself is single-threaded
and, with a fixed seed and scripted input, bit-deterministic.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import replace
from pathlib import Path

from .config import MissionConfig
from .control import (
    AWAITING,
    Calibrate,
    Command,
    CommandAccepted,
    Descend,
    DescendTimeout,
    FlushLog,
    ParseError,
    SetParams,
    SurfaceTimeout,
    TerminateLink,
    apply_set_params,
    mission_tick,
)
from .dynamics import VehicleState, float_position, rope_taut, step
from .missionlog import MissionLog, TelemetryRecord, anchor_fix
from .protocol import (
    ack_frame,
    banner_frame,
    error_frame,
    frame_line,
    link_available,
    parse_command,
    telemetry_frame,
)
from .sensors import SensorSnapshot, SensorSuite, calibrate


class MissionEngine:
    """Advances the whole mission one control period at a time."""

    def __init__(self, config: MissionConfig, link, out_dir: str | Path, seed: int = 0) -> None:
        self.config = config
        self.params = config.params
        self.control = config.control  # live copy: SET and DIVE mutate it
        self.sim = config.sim
        self.link = link
        self.suite = SensorSuite(replace(config.sensors, rng_seed=f"{seed}/sensors"), config.params)
        self._gps_rng = random.Random(f"{seed}/gps")
        self.state = VehicleState()
        self.phase = AWAITING
        self.log = MissionLog(out_dir)
        self.queue: deque[Command | ParseError] = deque()
        self.tick_index = 0
        self.timeouts: list[str] = []
        self.aborted = False
        self._cal_buffer: list[SensorSnapshot] = []
        self._done = False
        self._last_snapshot: SensorSnapshot | None = None
        self._gps_every = max(1, round(1.0 / (config.sim.gps_fix_hz * config.control.control_period_s)))
        link.set_banner(self._banner)

    # ------------------------------------------------------------- banner

    def _banner(self) -> dict:
        echo = {
            "target_depth_m": self.control.target_depth_m,
            "depth_band_m": self.control.depth_band_m,
            "sensor_mount_offset_m": self.control.sensor_mount_offset_m,
            "surface_depth_m": self.control.surface_depth_m,
            "control_period_s": self.control.control_period_s,
            "heading_target_deg": self.control.heading_target_deg,
        }
        return banner_frame(self.phase.name, self.state.t_s, echo)

    # ------------------------------------------------------------- one tick

    def tick(self) -> bool:
        """Run one control period; returns False once the mission has ended."""
        if self._done:
            return False

        snap = self.suite.sample(self.state)
        self._last_snapshot = snap
        if self.phase.name == "Calibrating" and self.suite.last_raw is not None:
            self._cal_buffer.append(self.suite.last_raw)

        self.link.set_available(link_available(snap, self.control))

        for channel, line in self.link.take_lines():
            self._ingest_line(channel, line)

        prev_phase = self.phase
        result = mission_tick(self.phase, snap, self.control, self.queue)
        self.phase = result.phase

        for event in result.events:
            if isinstance(event, CommandAccepted):
                self._apply_command(event.command)
            elif isinstance(event, FlushLog):
                self.log.flush()
            elif isinstance(event, TerminateLink):
                self.link.terminate()
            elif isinstance(event, DescendTimeout):
                self.timeouts.append("DescendTimeout")
            elif isinstance(event, SurfaceTimeout):
                self.timeouts.append("SurfaceTimeout")

        if prev_phase.name == "Calibrating" and self.phase.name != "Calibrating" and self._cal_buffer:
            self.suite.install(calibrate(self._cal_buffer, len(self._cal_buffer)))
            self._cal_buffer = []

        float_x, float_y = float_position(self.state, self.params)
        thr = result.thrusters
        link_label = self.link.state.label
        self.log.append(
            TelemetryRecord(
                t_s=self.state.t_s,
                true_depth_m=self.state.depth_m,
                sensed_depth_m=snap.sensed_depth_m,
                pitch_deg=snap.pitch_deg,
                heading_deg=snap.heading_deg,
                x_m=self.state.x_m,
                y_m=self.state.y_m,
                float_x_m=float_x,
                float_y_m=float_y,
                duty_fl=thr.front_left,
                duty_fr=thr.front_right,
                duty_rl=thr.rear_left,
                duty_rr=thr.rear_right,
                phase=self.phase.name,
                tag=result.tag,
                link=link_label,
            )
        )

        if self.tick_index % self._gps_every == 0:
            nx = self._gps_rng.gauss(0.0, self.sim.gps_noise_std_m)
            ny = self._gps_rng.gauss(0.0, self.sim.gps_noise_std_m)
            self.log.add_fix(anchor_fix(self.state.t_s, float_x + nx, float_y + ny, self.sim.gps_anchor))

        if self.tick_index % self.sim.telemetry_decimation == 0:
            tags = [result.tag] if result.tag else []
            if rope_taut(self.state, self.params):
                tags.append("TautRope")
            frame = telemetry_frame(
                t_s=self.state.t_s,
                sensed_depth_m=snap.sensed_depth_m,
                pitch_deg=snap.pitch_deg,
                heading_deg=snap.heading_deg,
                phase=self.phase.name,
                link=link_label,
                x_m=self.state.x_m,
                y_m=self.state.y_m,
                float_x_m=float_x,
                float_y_m=float_y,
                tags=tags,
            )
            self.link.broadcast(frame_line(frame))

        if self.phase.name == "Ended":
            self._done = True
            return False

        for _ in range(self.config.substeps):
            self.state = step(self.state, thr, self.params, self.sim.dt_s)
        self.tick_index += 1
        return True

    # ------------------------------------------------------------- commands

    def _ingest_line(self, channel: str, line: str) -> None:
        item = parse_command(line, max_depth_m=self.params.rope_length_m)
        if isinstance(item, SetParams):
            try:
                apply_set_params(self.control, item.key, item.value)
            except ValueError as exc:
                item = ParseError(line, str(exc))
        if isinstance(item, ParseError):
            self.link.send_line(channel, frame_line(error_frame(item.reason)))
        else:
            self.link.send_line(channel, frame_line(ack_frame(line)))
        self.queue.append(item)

    def _apply_command(self, cmd: Command) -> None:
        if isinstance(cmd, SetParams):
            try:
                self.control = apply_set_params(self.control, cmd.key, cmd.value)
            except ValueError:
                pass  # validated at ingest; a racing SET may still invalidate it
        elif isinstance(cmd, Descend):
            self.control = replace(self.control, target_depth_m=cmd.target_depth_m)
        elif isinstance(cmd, Calibrate):
            self.suite.reset_calibration()
            self._cal_buffer = []

    # ------------------------------------------------------------- running

    @property
    def done(self) -> bool:
        return self._done

    def run(self, max_s: float | None = None) -> None:
        """Tick to completion (or the runaway guard), then flush."""
        limit = self.sim.max_mission_s if max_s is None else max_s
        while self.tick():
            if self.state.t_s > limit:
                self.aborted = True
                break
        self.log.flush()

    def status(self) -> dict:
        snap = self._last_snapshot
        return {
            "t_s": self.state.t_s,
            "phase": self.phase.name,
            "link": self.link.state.label,
            "sensed_depth_m": None if snap is None else snap.sensed_depth_m,
            "pitch_deg": None if snap is None else snap.pitch_deg,
            "heading_deg": None if snap is None else snap.heading_deg,
            "x_m": self.state.x_m,
            "y_m": self.state.y_m,
            "done": self._done,
            "timeouts": list(self.timeouts),
        }
