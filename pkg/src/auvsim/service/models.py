"""Request/response schemas for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class MissionSummary(BaseModel):
    time_to_band_s: float | None
    max_sensed_depth_m: float
    in_band_fraction: float
    track_length_m: float
    duration_s: float


class HealthResponse(BaseModel):
    status: str = "ok"
    version: str


class StatusResponse(BaseModel):
    t_s: float
    phase: str
    link: str
    depth_m: float
    sensed_depth_m: float | None
    pitch_deg: float | None
    heading_deg: float | None
    x_m: float
    y_m: float
    done: bool
    timeouts: list[str]
    records: int
    fixes: int


class ConfigResponse(BaseModel):
    dynamics: dict
    sensor: dict
    control: dict
    sim: dict


class MissionRequest(BaseModel):
    script: list[str] = Field(min_length=1, description="command lines, optional '@N ' window prefix")
    seed: int = 0
    config_path: str | None = None
    overrides: list[str] = Field(default_factory=list, description="section.key=value pairs")
    out_dir: str | None = None


class MissionResponse(BaseModel):
    exit_code: int
    summary: MissionSummary
    telemetry_path: str
    gps_path: str
    warnings: list[str]
    timeouts: list[str]


class AnalyzeRequest(BaseModel):
    log_dir: str
    config_path: str | None = None


class AnalyzeResponse(BaseModel):
    summary: MissionSummary
    depth_profile: list[tuple[float, float]]
    track: list[tuple[float, float]]


class ProfileResponse(BaseModel):
    """Analyze-shaped view of the live mission's in-memory log."""

    summary: MissionSummary | None
    depth_profile: list[tuple[float, float]]
    track: list[tuple[float, float]]
