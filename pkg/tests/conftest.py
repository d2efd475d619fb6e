"""Shared fixtures and helpers."""

from __future__ import annotations

from pathlib import Path

import pytest

from auvsim.sensors import SensorSnapshot

REPO = Path(__file__).resolve().parents[1]
CONFIGS = REPO / "configs"
MISSIONS = REPO / "missions"

NOISELESS = [
    "sensor.pressure_noise_std_Pa=0",
    "sensor.compass_noise_std_deg=0",
    "sensor.gyro_noise_std_deg=0",
    "sim.gps_noise_std_m=0",
]


def snap(
    sensed: float = 0.2,
    pitch: float = 0.0,
    heading: float = 0.0,
    t: float = 0.0,
    rate: float = 0.0,
    pressure: float = 101325.0,
) -> SensorSnapshot:
    """Build a snapshot without running the simulator."""
    return SensorSnapshot(
        t_s=t,
        pressure_Pa=pressure,
        sensed_depth_m=sensed,
        heading_deg=heading,
        pitch_deg=pitch,
        pitch_rate_deg_s=rate,
    )


@pytest.fixture
def tmp_logs(tmp_path: Path) -> Path:
    d = tmp_path / "logs"
    d.mkdir()
    return d


# Acceptance reporting: tests/test_acceptance.py holds one test per release
# criterion; collect their outcomes and print a PASS/FAIL line for each at
# the end of the run so the gate is readable at a glance.

ACCEPTANCE: list[tuple[str, bool]] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call" and item.nodeid.split("::")[0].endswith("test_acceptance.py"):
        doc = getattr(item, "function", None) and item.function.__doc__
        label = (doc or item.name).strip().splitlines()[0]
        ACCEPTANCE.append((label, report.passed))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok in ACCEPTANCE:
        terminalreporter.write_line(("PASS" if ok else "FAIL") + f": {label}")
