"""Simulated sensor suite: pressure (depth), compass (heading), gyro (pitch).

The pressure port sits sensor_mount_offset_m below the hull centerline, so
a surfaced, level vehicle already reads about 0.2 m of depth. Noise is
independent Gaussian per channel per sample with a fixed draw order, which
keeps a given seed reproducible whether or not individual channels have
noise enabled.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Iterable, Iterator

from .dynamics import VehicleParams, VehicleState


class CalibrationError(Exception):
    pass


@dataclass(frozen=True)
class SensorConfig:
    pressure_noise_std_Pa: float = 20.0
    compass_noise_std_deg: float = 1.0
    gyro_noise_std_deg: float = 0.5
    compass_bias_deg: float = 0.0
    gyro_bias_deg: float = 0.0
    atmospheric_pressure_Pa: float = 101325.0
    rng_seed: int | str | None = None

    def __post_init__(self) -> None:
        for name in ("pressure_noise_std_Pa", "compass_noise_std_deg", "gyro_noise_std_deg"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.atmospheric_pressure_Pa <= 0:
            raise ValueError("atmospheric_pressure_Pa must be positive")


@dataclass(frozen=True)
class SensorSnapshot:
    t_s: float
    pressure_Pa: float
    sensed_depth_m: float
    heading_deg: float
    pitch_deg: float
    pitch_rate_deg_s: float


@dataclass(frozen=True)
class Calibration:
    """Offsets subtracted from raw readings once CAL has run."""

    pitch_offset_deg: float = 0.0
    heading_offset_deg: float = 0.0


def pressure_to_depth(pressure_Pa: float, atmospheric_Pa: float, water_density_kg_m3: float, gravity_m_s2: float) -> float:
    """Gauge pressure to water depth, clamped at 0 (no negative depth)."""
    if water_density_kg_m3 <= 0:
        raise ValueError("water density must be positive")
    if gravity_m_s2 <= 0:
        raise ValueError("gravity must be positive")
    return max(0.0, (pressure_Pa - atmospheric_Pa) / (water_density_kg_m3 * gravity_m_s2))


def depth_to_pressure(depth_m: float, atmospheric_Pa: float, water_density_kg_m3: float, gravity_m_s2: float) -> float:
    """Exact inverse of pressure_to_depth for nonnegative depths."""
    return atmospheric_Pa + water_density_kg_m3 * gravity_m_s2 * depth_m


def heading_error(current_deg: float, target_deg: float) -> float:
    """Signed shortest-arc error in (-180, 180]; positive = turn clockwise."""
    err = (target_deg - current_deg) % 360.0
    if err > 180.0:
        err -= 360.0
    return err


def calibrate(snapshots: Iterable[SensorSnapshot], n_samples: int) -> Calibration:
    """Estimate gyro and compass offsets from raw surface samples.

    Assumes the vehicle rests level at the reference heading (0 deg) during
    the window, so the mean pitch reading is the gyro bias and the circular
    mean of the heading readings is the compass offset.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    it: Iterator[SensorSnapshot] = iter(snapshots)
    pitch_sum = 0.0
    cos_sum = 0.0
    sin_sum = 0.0
    for i in range(n_samples):
        try:
            snap = next(it)
        except StopIteration:
            raise CalibrationError(f"stream ended after {i} of {n_samples} samples") from None
        pitch_sum += snap.pitch_deg
        h = math.radians(snap.heading_deg)
        cos_sum += math.cos(h)
        sin_sum += math.sin(h)
    return Calibration(
        pitch_offset_deg=pitch_sum / n_samples,
        heading_offset_deg=math.degrees(math.atan2(sin_sum, cos_sum)),
    )


class SensorSuite:
    """Stateful sampler: one RNG stream, optional installed calibration.

    Draw order per sample is fixed (pressure, heading, pitch, pitch rate);
    zero-noise channels still consume their draw so seeds stay aligned
    across configurations.
    """

    def __init__(self, cfg: SensorConfig, params: VehicleParams) -> None:
        self.cfg = cfg
        self.params = params
        self._rng = random.Random(cfg.rng_seed)
        self.calibration: Calibration | None = None
        self.last_raw: SensorSnapshot | None = None

    def reset_calibration(self) -> None:
        self.calibration = None

    def install(self, cal: Calibration) -> None:
        self.calibration = cal

    def sample(self, state: VehicleState) -> SensorSnapshot:
        """Sample all channels; returns the calibrated view, stashes the raw one."""
        cfg = self.cfg
        p = self.params
        port_depth = state.depth_m + p.sensor_mount_offset_m * math.cos(math.radians(state.pitch_deg))
        pressure = depth_to_pressure(
            port_depth, cfg.atmospheric_pressure_Pa, p.water_density_kg_m3, p.gravity_m_s2
        ) + self._rng.gauss(0.0, cfg.pressure_noise_std_Pa)
        heading_raw = (state.heading_deg + cfg.compass_bias_deg + self._rng.gauss(0.0, cfg.compass_noise_std_deg)) % 360.0
        pitch_raw = state.pitch_deg + cfg.gyro_bias_deg + self._rng.gauss(0.0, cfg.gyro_noise_std_deg)
        rate_raw = state.pitch_rate_deg_s + self._rng.gauss(0.0, cfg.gyro_noise_std_deg)

        depth = pressure_to_depth(pressure, cfg.atmospheric_pressure_Pa, p.water_density_kg_m3, p.gravity_m_s2)
        self.last_raw = SensorSnapshot(
            t_s=state.t_s,
            pressure_Pa=pressure,
            sensed_depth_m=depth,
            heading_deg=heading_raw,
            pitch_deg=pitch_raw,
            pitch_rate_deg_s=rate_raw,
        )
        cal = self.calibration
        if cal is None:
            return self.last_raw
        return SensorSnapshot(
            t_s=state.t_s,
            pressure_Pa=pressure,
            sensed_depth_m=depth,
            heading_deg=(heading_raw - cal.heading_offset_deg) % 360.0,
            pitch_deg=pitch_raw - cal.pitch_offset_deg,
            pitch_rate_deg_s=rate_raw,
        )
