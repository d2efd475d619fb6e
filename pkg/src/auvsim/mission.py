"""Scripted missions: the headless stand-in for a live operator.

A mission script is an ordered list of command lines, each tagged with the
surface window (the Nth time the vehicle is connectable) in which it is
typed. The scripted link counts windows on the rising edge of link
availability and feeds one line per tick, exactly as the socket stack
would deliver an operator's input.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .config import MissionConfig, default_config, load_config
from .control import ParseError, band_edges
from .engine import MissionEngine
from .missionlog import read_gps, read_telemetry, summarize
from .protocol import LinkState, parse_command


class ScriptError(Exception):
    pass


@dataclass(frozen=True)
class ScriptEntry:
    window: int  # 0 = the initial surface period
    line: str


@dataclass(frozen=True)
class MissionScript:
    entries: tuple[ScriptEntry, ...]
    warnings: tuple[str, ...] = ()

    @property
    def ends_mission(self) -> bool:
        return any(e.line.split() and e.line.split()[0].upper() == "END" for e in self.entries)


def parse_script(text: str, source: str = "<script>", *, max_depth_m: float = 1.2, max_forward_s: float = 3600.0) -> MissionScript:
    """Parse a script document: one command per line, optional @N window tag."""
    entries: list[ScriptEntry] = []
    window = 0
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("@"):
            tag, _, rest = line.partition(" ")
            try:
                explicit = int(tag[1:])
            except ValueError:
                raise ScriptError(f"{source}:{lineno}: bad window tag {tag!r}") from None
            if explicit < window:
                raise ScriptError(f"{source}:{lineno}: window tags must not decrease")
            window = explicit
            line = rest.strip()
            if not line:
                raise ScriptError(f"{source}:{lineno}: window tag without a command")
        # untagged lines share the previous line's window; the engine's
        # command queue already runs them strictly one at a time
        parsed = parse_command(line, max_depth_m=max_depth_m, max_forward_s=max_forward_s)
        if isinstance(parsed, ParseError):
            raise ScriptError(f"{source}:{lineno}: {parsed.reason}")
        entries.append(ScriptEntry(window, line))
    warnings: list[str] = []
    if not entries:
        warnings.append("script is empty; an END will be injected at the first window")
    elif entries[-1].line.split()[0].upper() != "END":
        warnings.append("script does not finish with END; one will be injected when it runs out")
    return MissionScript(tuple(entries), tuple(warnings))


def load_script(path: str | Path, *, max_depth_m: float = 1.2, max_forward_s: float = 3600.0) -> MissionScript:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScriptError(f"cannot read script {path}: {exc}") from exc
    return parse_script(text, source=str(path), max_depth_m=max_depth_m, max_forward_s=max_forward_s)


class ScriptedLink:
    """Operator played from a script; implements the engine's link interface.

    Frames broadcast while connectable are captured in .frames for tests;
    acks and error frames land in .responses. If the script runs out
    without an END, one is injected at the next surface window so headless
    runs always terminate.
    """

    def __init__(self, script: MissionScript) -> None:
        self._entries = list(script.entries)
        self._cursor = 0
        self._window = -1
        self._available = False
        self._terminated = False
        self._auto_end_sent = script.ends_mission  # nothing to inject if END is scripted
        self.injected_end = False
        self.frames: list[str] = []
        self.responses: list[str] = []
        self.state = LinkState(False, reason="operator_closed")

    def set_banner(self, banner) -> None:  # scripted operator ignores banners
        self._banner = banner

    def set_available(self, available: bool) -> None:
        if self._terminated:
            return
        if available and not self._available:
            self._available = True
            self._window += 1
            self.state = LinkState(True, session_id=self._window + 1)
        elif not available and self._available:
            self._available = False
            self.state = LinkState(False, reason="submerged")

    def take_lines(self) -> list[tuple[str, str]]:
        if not self._available or self._terminated:
            return []
        if self._cursor < len(self._entries):
            entry = self._entries[self._cursor]
            if entry.window <= self._window:
                self._cursor += 1
                return [("script", entry.line)]
            return []
        if not self._auto_end_sent:
            self._auto_end_sent = True
            self.injected_end = True
            return [("script", "END")]
        return []

    def send_line(self, channel: str, text: str) -> None:
        self.responses.append(text)

    def broadcast(self, text: str) -> int:
        if not self._available or self._terminated:
            return 0
        self.frames.append(text)
        return 1

    def terminate(self) -> None:
        self._terminated = True
        self._available = False
        self.state = LinkState(False, reason="terminated")


# ---------------------------------------------------------------- running

@dataclass(frozen=True)
class HeadlessResult:
    exit_code: int
    summary: dict
    telemetry_path: Path
    gps_path: Path
    warnings: tuple[str, ...]
    timeouts: tuple[str, ...]


def run_scripted(
    config: MissionConfig, script: MissionScript, seed: int, out_dir: str | Path
) -> tuple[HeadlessResult, MissionEngine]:
    """Run a scripted mission to completion; also returns the engine for inspection."""
    link = ScriptedLink(script)
    engine = MissionEngine(config, link, out_dir, seed=seed)
    engine.run()
    lo, hi = band_edges(engine.control)
    summary = summarize(engine.log.records, engine.log.fixes, lo, hi)
    warnings = list(script.warnings)
    if link.injected_end:
        warnings.append("injected END after the last scripted command")
    if engine.aborted:
        warnings.append(f"mission aborted by the {config.sim.max_mission_s:g} s runaway guard")
    exit_code = 0
    if engine.timeouts:
        exit_code = 2
    elif engine.aborted:
        exit_code = 3
    result = HeadlessResult(
        exit_code=exit_code,
        summary=summary,
        telemetry_path=engine.log.telemetry_path,
        gps_path=engine.log.gps_path,
        warnings=tuple(warnings),
        timeouts=tuple(engine.timeouts),
    )
    return result, engine


def run_headless(
    config_path: str | Path | None,
    script_path: str | Path,
    seed: int,
    out_dir: str | Path,
    overrides: Sequence[str] = (),
) -> HeadlessResult:
    """Load config and script from disk and run the mission."""
    config = load_config(config_path, overrides)
    script = load_script(
        script_path, max_depth_m=config.params.rope_length_m
    )
    result, _ = run_scripted(config, script, seed, out_dir)
    return result


def analyze(log_dir: str | Path, config: MissionConfig | None = None) -> dict:
    """Summarize a completed log directory into plot-ready JSON data."""
    log_dir = Path(log_dir)
    records = read_telemetry(log_dir / "telemetry.csv")
    fixes = read_gps(log_dir / "gps_track.csv")
    cfg = config if config is not None else default_config()
    lo, hi = band_edges(cfg.control)
    return {
        "summary": summarize(records, fixes, lo, hi),
        "depth_profile": [[r.t_s, r.sensed_depth_m] for r in records],
        "track": [[f.float_x_m, f.float_y_m] for f in fixes],
    }
