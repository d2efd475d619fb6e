"""4-DOF rigid-body motion of a small tethered submersible.

World frame: x east, y north, depth positive down. Controlled degrees of
freedom are surge, heave, pitch and yaw; sway and roll stay frozen (the
hull is passively roll-stable and has no lateral actuator). Angles are
degrees at the interface: pitch positive nose-up, heading compass-style
clockwise from north in [0, 360).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace


def _clamp(v: float, lo: float, hi: float) -> float:
    return lo if v < lo else hi if v > hi else v


@dataclass(frozen=True)
class VehicleParams:
    """Physical constants; defaults describe the 3.95 kg neutral build."""

    mass_kg: float = 3.95
    volume_m3: float = 0.00395
    water_density_kg_m3: float = 1000.0
    gravity_m_s2: float = 9.81
    hull_length_m: float = 0.380
    hull_diameter_m: float = 0.100
    # translational drag, N*s/m per world axis (horizontal x, horizontal y, vertical)
    drag_linear: tuple[float, float, float] = (9.6, 9.6, 8.0)
    # rotational damping, N*m*s/rad (pitch, yaw)
    drag_angular: tuple[float, float] = (2.6, 0.85)
    thruster_max_force_N: float = 1.5
    pitch_thruster_lever_arm_m: float = 0.19  # nose pair, half hull length
    yaw_thruster_lever_arm_m: float = 0.10  # rear pair lateral offset
    rope_length_m: float = 1.2
    sensor_mount_offset_m: float = 0.2  # pressure sensor below hull centerline

    def __post_init__(self) -> None:
        if self.mass_kg <= 0:
            raise ValueError("mass_kg must be positive")
        if self.volume_m3 <= 0:
            raise ValueError("volume_m3 must be positive")
        if self.water_density_kg_m3 <= 0:
            raise ValueError("water_density_kg_m3 must be positive")
        if self.gravity_m_s2 <= 0:
            raise ValueError("gravity_m_s2 must be positive")
        if self.hull_length_m <= 0 or self.hull_diameter_m <= 0:
            raise ValueError("hull dimensions must be positive")
        if len(self.drag_linear) != 3 or any(k < 0 for k in self.drag_linear):
            raise ValueError("drag_linear needs 3 nonnegative coefficients")
        if len(self.drag_angular) != 2 or any(k < 0 for k in self.drag_angular):
            raise ValueError("drag_angular needs 2 nonnegative coefficients")
        if self.thruster_max_force_N <= 0:
            raise ValueError("thruster_max_force_N must be positive")
        if self.pitch_thruster_lever_arm_m <= 0 or self.yaw_thruster_lever_arm_m <= 0:
            raise ValueError("lever arms must be positive")
        if self.rope_length_m <= 0:
            raise ValueError("rope_length_m must be positive")
        if self.sensor_mount_offset_m < 0:
            raise ValueError("sensor_mount_offset_m must be nonnegative")

    @property
    def transverse_inertia_kg_m2(self) -> float:
        # solid cylinder about a transverse axis through the center;
        # used for both pitch and yaw (axisymmetric hull)
        r = self.hull_diameter_m / 2.0
        return self.mass_kg * (3.0 * r * r + self.hull_length_m**2) / 12.0


@dataclass(frozen=True)
class VehicleState:
    """Ground-truth pose and velocity at one simulation instant."""

    t_s: float = 0.0
    x_m: float = 0.0
    y_m: float = 0.0
    depth_m: float = 0.0  # hull centerline, 0 = waterline
    vx: float = 0.0
    vy: float = 0.0
    vz: float = 0.0  # positive down
    pitch_deg: float = 0.0
    pitch_rate_deg_s: float = 0.0
    heading_deg: float = 0.0
    heading_rate_deg_s: float = 0.0


@dataclass(frozen=True)
class ThrusterCommand:
    """Duty per motor in [-1, 1]; out-of-range values are clamped."""

    front_left: float = 0.0
    front_right: float = 0.0
    rear_left: float = 0.0
    rear_right: float = 0.0

    def __post_init__(self) -> None:
        for name in ("front_left", "front_right", "rear_left", "rear_right"):
            object.__setattr__(self, name, _clamp(getattr(self, name), -1.0, 1.0))


ALL_STOP = ThrusterCommand()


@dataclass(frozen=True)
class BodyForces:
    """Thrust resolved into the world frame (z positive down)."""

    fx_N: float
    fy_N: float
    fz_N: float
    pitch_torque_N_m: float  # positive nose-up
    yaw_torque_N_m: float  # positive clockwise seen from above


def net_buoyancy_force(params: VehicleParams) -> float:
    """Static vertical force in N, positive up; zero when neutrally trimmed."""
    return (params.water_density_kg_m3 * params.volume_m3 - params.mass_kg) * params.gravity_m_s2


def thrust_forces(cmd: ThrusterCommand, params: VehicleParams, state: VehicleState) -> BodyForces:
    """Resolve the four duties into world-frame force plus pitch/yaw torque.

    The rear pair thrusts along the body longitudinal axis; the front pair
    pushes along the body vertical axis (positive duty lifts the nose) and
    loads the pitch lever arm. Asymmetric rear duty yields yaw torque,
    left-faster turning clockwise.
    """
    f_max = params.thruster_max_force_N
    s_front = cmd.front_left + cmd.front_right
    s_rear = cmd.rear_left + cmd.rear_right
    th = math.radians(state.pitch_deg)
    ps = math.radians(state.heading_deg)
    sin_th, cos_th = math.sin(th), math.cos(th)
    sin_ps, cos_ps = math.sin(ps), math.cos(ps)
    # body axes in world coordinates (z down)
    fwd = (sin_ps * cos_th, cos_ps * cos_th, -sin_th)
    down = (sin_ps * sin_th, cos_ps * sin_th, cos_th)
    rear_f = s_rear * f_max
    front_f = -s_front * f_max  # positive duty pushes the nose toward body-up
    return BodyForces(
        fx_N=rear_f * fwd[0] + front_f * down[0],
        fy_N=rear_f * fwd[1] + front_f * down[1],
        fz_N=rear_f * fwd[2] + front_f * down[2],
        pitch_torque_N_m=s_front * f_max * params.pitch_thruster_lever_arm_m,
        yaw_torque_N_m=(cmd.rear_left - cmd.rear_right) * f_max * params.yaw_thruster_lever_arm_m,
    )


def step(state: VehicleState, cmd: ThrusterCommand, params: VehicleParams, dt_s: float) -> VehicleState:
    """One semi-implicit Euler step: velocities first, then pose.

    Deterministic pure function. Heading wraps to [0, 360); the hull cannot
    rise past the waterline (depth clamped at 0 with vz zeroed, an inelastic
    surface contact); pitch saturates at +/-90 with its rate zeroed.
    """
    if not 0.0 < dt_s <= 0.1:
        raise ValueError(f"dt_s must be in (0, 0.1], got {dt_s}")

    thrust = thrust_forces(cmd, params, state)
    buoyancy_up = net_buoyancy_force(params)
    kx, ky, kz = params.drag_linear
    m = params.mass_kg

    # drag enters implicitly: stable for any positive coefficient, and the
    # equilibrium speed stays exactly force/drag
    vx = (state.vx + thrust.fx_N / m * dt_s) / (1.0 + kx / m * dt_s)
    vy = (state.vy + thrust.fy_N / m * dt_s) / (1.0 + ky / m * dt_s)
    vz = (state.vz + (thrust.fz_N - buoyancy_up) / m * dt_s) / (1.0 + kz / m * dt_s)

    c_pitch, c_yaw = params.drag_angular
    inertia = params.transverse_inertia_kg_m2
    w_pitch = math.radians(state.pitch_rate_deg_s)
    w_yaw = math.radians(state.heading_rate_deg_s)
    w_pitch = (w_pitch + thrust.pitch_torque_N_m / inertia * dt_s) / (1.0 + c_pitch / inertia * dt_s)
    w_yaw = (w_yaw + thrust.yaw_torque_N_m / inertia * dt_s) / (1.0 + c_yaw / inertia * dt_s)

    x = state.x_m + vx * dt_s
    y = state.y_m + vy * dt_s
    depth = state.depth_m + vz * dt_s
    if depth < 0.0:
        depth = 0.0
        vz = 0.0

    pitch = state.pitch_deg + math.degrees(w_pitch) * dt_s
    if pitch > 90.0:
        pitch, w_pitch = 90.0, 0.0
    elif pitch < -90.0:
        pitch, w_pitch = -90.0, 0.0
    heading = (state.heading_deg + math.degrees(w_yaw) * dt_s) % 360.0

    return VehicleState(
        t_s=state.t_s + dt_s,
        x_m=x,
        y_m=y,
        depth_m=depth,
        vx=vx,
        vy=vy,
        vz=vz,
        pitch_deg=pitch,
        pitch_rate_deg_s=math.degrees(w_pitch),
        heading_deg=heading,
        heading_rate_deg_s=math.degrees(w_yaw),
    )


def float_position(state: VehicleState, params: VehicleParams) -> tuple[float, float]:
    """Surface-float position under the vertical-rope model: directly above."""
    return (state.x_m, state.y_m)


def rope_taut(state: VehicleState, params: VehicleParams) -> bool:
    """True when the vehicle is deeper than the rope is long."""
    return state.depth_m > params.rope_length_m
