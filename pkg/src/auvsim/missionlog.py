"""Mission persistence and analysis: telemetry CSV, GPS track CSV, summaries.

Telemetry is logged at full control rate regardless of link state; the GPS
fixes come from the watch on the surface float and exist for the whole
mission. Floats are serialized with repr() so parsing the files back
reproduces the in-memory values bit for bit.
"""

from __future__ import annotations

import csv
import math
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

TELEMETRY_COLUMNS = [
    "t_s",
    "true_depth_m",
    "sensed_depth_m",
    "pitch_deg",
    "heading_deg",
    "x_m",
    "y_m",
    "float_x_m",
    "float_y_m",
    "duty_fl",
    "duty_fr",
    "duty_rl",
    "duty_rr",
    "phase",
    "tag",
    "link",
]
GPS_COLUMNS = ["t_s", "float_x_m", "float_y_m"]
GPS_COLUMNS_GEO = GPS_COLUMNS + ["lat", "lon"]

EARTH_RADIUS_M = 6371000.0


class LogError(Exception):
    """Raised when mission data cannot be written or read back."""


@dataclass(frozen=True)
class TelemetryRecord:
    t_s: float
    true_depth_m: float
    sensed_depth_m: float
    pitch_deg: float  # sensed
    heading_deg: float  # sensed
    x_m: float
    y_m: float
    float_x_m: float
    float_y_m: float
    duty_fl: float
    duty_fr: float
    duty_rl: float
    duty_rr: float
    phase: str
    tag: str
    link: str


@dataclass(frozen=True)
class GpsFix:
    t_s: float
    float_x_m: float
    float_y_m: float
    lat: float | None = None
    lon: float | None = None


def anchor_fix(t_s: float, x_m: float, y_m: float, anchor: tuple[float, float] | None) -> GpsFix:
    """Build a fix, adding equirectangular lat/lon when an anchor is set."""
    if anchor is None:
        return GpsFix(t_s, x_m, y_m)
    lat0, lon0 = anchor
    lat = lat0 + math.degrees(y_m / EARTH_RADIUS_M)
    lon = lon0 + math.degrees(x_m / (EARTH_RADIUS_M * math.cos(math.radians(lat0))))
    return GpsFix(t_s, x_m, y_m, lat=lat, lon=lon)


class MissionLog:
    """Single-writer, in-order buffer with an atomic, idempotent flush."""

    def __init__(self, out_dir: str | Path) -> None:
        self.out_dir = Path(out_dir)
        self.records: list[TelemetryRecord] = []
        self.fixes: list[GpsFix] = []

    def append(self, record: TelemetryRecord) -> None:
        if self.records and record.t_s <= self.records[-1].t_s:
            raise LogError("telemetry records must be strictly ordered by t_s")
        self.records.append(record)

    def add_fix(self, fix: GpsFix) -> None:
        self.fixes.append(fix)

    @property
    def telemetry_path(self) -> Path:
        return self.out_dir / "telemetry.csv"

    @property
    def gps_path(self) -> Path:
        return self.out_dir / "gps_track.csv"

    def flush(self) -> tuple[Path, Path]:
        """Write both CSVs via temp-then-rename; safe to call repeatedly."""
        try:
            self.out_dir.mkdir(parents=True, exist_ok=True)
            geo = any(f.lat is not None for f in self.fixes)
            self._write_atomic(
                self.telemetry_path,
                TELEMETRY_COLUMNS,
                (
                    [
                        repr(r.t_s),
                        repr(r.true_depth_m),
                        repr(r.sensed_depth_m),
                        repr(r.pitch_deg),
                        repr(r.heading_deg),
                        repr(r.x_m),
                        repr(r.y_m),
                        repr(r.float_x_m),
                        repr(r.float_y_m),
                        repr(r.duty_fl),
                        repr(r.duty_fr),
                        repr(r.duty_rl),
                        repr(r.duty_rr),
                        r.phase,
                        r.tag,
                        r.link,
                    ]
                    for r in self.records
                ),
            )
            self._write_atomic(
                self.gps_path,
                GPS_COLUMNS_GEO if geo else GPS_COLUMNS,
                (
                    [repr(f.t_s), repr(f.float_x_m), repr(f.float_y_m)]
                    + ([repr(f.lat), repr(f.lon)] if geo else [])
                    for f in self.fixes
                ),
            )
        except OSError as exc:
            raise LogError(f"failed to write mission logs in {self.out_dir}: {exc}") from exc
        return self.telemetry_path, self.gps_path

    def _write_atomic(self, path: Path, header: Sequence[str], rows: Iterable[Sequence[str]]) -> None:
        fd, tmp_name = tempfile.mkstemp(dir=self.out_dir, prefix=path.name, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(header)
                writer.writerows(rows)
            os.replace(tmp_name, path)
        except BaseException:
            try:
                os.unlink(tmp_name)
            except OSError:
                pass
            raise


def read_telemetry(path: str | Path) -> list[TelemetryRecord]:
    path = Path(path)
    if not path.exists():
        raise LogError(f"missing telemetry file: {path}")
    records: list[TelemetryRecord] = []
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != TELEMETRY_COLUMNS:
            raise LogError(f"unexpected telemetry header in {path}")
        for row in reader:
            try:
                records.append(
                    TelemetryRecord(
                        t_s=float(row["t_s"]),
                        true_depth_m=float(row["true_depth_m"]),
                        sensed_depth_m=float(row["sensed_depth_m"]),
                        pitch_deg=float(row["pitch_deg"]),
                        heading_deg=float(row["heading_deg"]),
                        x_m=float(row["x_m"]),
                        y_m=float(row["y_m"]),
                        float_x_m=float(row["float_x_m"]),
                        float_y_m=float(row["float_y_m"]),
                        duty_fl=float(row["duty_fl"]),
                        duty_fr=float(row["duty_fr"]),
                        duty_rl=float(row["duty_rl"]),
                        duty_rr=float(row["duty_rr"]),
                        phase=row["phase"],
                        tag=row["tag"],
                        link=row["link"],
                    )
                )
            except (TypeError, ValueError) as exc:
                raise LogError(f"corrupt telemetry row in {path}: {exc}") from exc
    return records


def read_gps(path: str | Path) -> list[GpsFix]:
    path = Path(path)
    if not path.exists():
        raise LogError(f"missing GPS file: {path}")
    fixes: list[GpsFix] = []
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames not in (GPS_COLUMNS, GPS_COLUMNS_GEO):
            raise LogError(f"unexpected GPS header in {path}")
        for row in reader:
            try:
                fixes.append(
                    GpsFix(
                        t_s=float(row["t_s"]),
                        float_x_m=float(row["float_x_m"]),
                        float_y_m=float(row["float_y_m"]),
                        lat=float(row["lat"]) if "lat" in row and row["lat"] else None,
                        lon=float(row["lon"]) if "lon" in row and row["lon"] else None,
                    )
                )
            except (TypeError, ValueError) as exc:
                raise LogError(f"corrupt GPS row in {path}: {exc}") from exc
    return fixes


# ---------------------------------------------------------------- analysis

def track_length(fixes: Sequence[GpsFix]) -> float:
    """Sum of planar distances between consecutive fixes; one fix is 0."""
    if not fixes:
        raise ValueError("track_length needs at least one fix")
    total = 0.0
    for a, b in zip(fixes, fixes[1:]):
        total += math.hypot(b.float_x_m - a.float_x_m, b.float_y_m - a.float_y_m)
    return total


def depth_profile(records: Sequence[TelemetryRecord]) -> list[tuple[float, float]]:
    """(t_s, sensed_depth_m) series, the live analog of the depth plot."""
    if not records:
        raise LogError("no records")
    return [(r.t_s, r.sensed_depth_m) for r in records]


def summarize(
    records: Sequence[TelemetryRecord],
    fixes: Sequence[GpsFix],
    band_lo: float,
    band_hi: float,
    settle_s: float = 30.0,
) -> dict:
    """Mission summary with the fixed report schema.

    in_band_fraction covers Forward-phase samples from 30 s after the first
    band entry to the end of forward motion; it reads 0.0 when the band was
    never reached or no Forward sample falls inside the window.
    """
    if not records:
        raise LogError("no records")
    in_band = lambda r: band_lo <= r.sensed_depth_m <= band_hi
    entry_t = next((r.t_s for r in records if in_band(r)), None)

    fraction = 0.0
    if entry_t is not None:
        window = [r for r in records if r.phase == "Forward" and r.t_s >= entry_t + settle_s]
        if window:
            fraction = sum(1 for r in window if in_band(r)) / len(window)

    return {
        "time_to_band_s": entry_t,
        "max_sensed_depth_m": max(r.sensed_depth_m for r in records),
        "in_band_fraction": fraction,
        "track_length_m": track_length(fixes) if fixes else 0.0,
        "duration_s": records[-1].t_s - records[0].t_s,
    }
