"""Surface-gated operator link: line commands in, JSON frames out.

The radio exists only while the sensed depth is at or above the surface
threshold. Sessions ride on any byte-stream transport (TCP, WebSocket
bridge); the hub enforces one operator per channel, drops sessions the
moment the vehicle submerges, discards half-received lines with them, and
never queues traffic across a gap. After End the link is terminated for
good.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

from .control import (
    Calibrate,
    Command,
    ControlConfig,
    Descend,
    End,
    Forward,
    ParseError,
    SetParams,
    Surface,
    TestConnection,
)
from .sensors import SensorSnapshot

MAX_LINE_BYTES = 256
_MAX_BUFFER = 4096  # a session pushing this much without a newline is broken


def link_available(snapshot: SensorSnapshot, cfg: ControlConfig) -> bool:
    """True iff the vehicle is shallow enough for the radio to exist."""
    return snapshot.sensed_depth_m <= cfg.surface_depth_m


def parse_command(line: str, *, max_depth_m: float = 1.2, max_forward_s: float = 3600.0) -> Command | ParseError:
    """Parse one operator line: CAL | SET k v | PING | DIVE d | FWD s | SURFACE | END."""
    if len(line.encode("utf-8", errors="replace")) > MAX_LINE_BYTES:
        return ParseError(line[:64], "line exceeds 256 bytes")
    tokens = line.split()
    if not tokens:
        return ParseError(line, "empty line")
    verb = tokens[0].upper()
    args = tokens[1:]

    def arity(n: int) -> ParseError | None:
        if len(args) != n:
            return ParseError(line, f"{verb} takes {n} argument(s), got {len(args)}")
        return None

    if verb == "CAL":
        return arity(0) or Calibrate()
    if verb == "PING":
        return arity(0) or TestConnection()
    if verb == "SURFACE":
        return arity(0) or Surface()
    if verb == "END":
        return arity(0) or End()
    if verb == "SET":
        bad = arity(2)
        if bad:
            return bad
        try:
            value = float(args[1])
        except ValueError:
            return ParseError(line, f"non-numeric value {args[1]!r}")
        return SetParams(args[0], value)
    if verb == "DIVE":
        bad = arity(1)
        if bad:
            return bad
        try:
            depth = float(args[0])
        except ValueError:
            return ParseError(line, f"non-numeric depth {args[0]!r}")
        if not 0 < depth <= max_depth_m:
            return ParseError(line, f"depth {args[0]} outside (0, {max_depth_m}]")
        return Descend(depth)
    if verb == "FWD":
        bad = arity(1)
        if bad:
            return bad
        try:
            seconds = float(args[0])
        except ValueError:
            return ParseError(line, f"non-numeric duration {args[0]!r}")
        if not 0 < seconds <= max_forward_s:
            return ParseError(line, f"duration {args[0]} outside (0, {max_forward_s}]")
        return Forward(seconds)
    return ParseError(line, f"unknown verb {tokens[0]!r}")


# ---------------------------------------------------------------- frames

def frame_line(obj: dict) -> str:
    """Serialize a frame: one compact JSON object, newline-terminated."""
    return json.dumps(obj, separators=(",", ":")) + "\n"


def telemetry_frame(
    t_s: float,
    sensed_depth_m: float,
    pitch_deg: float,
    heading_deg: float,
    phase: str,
    link: str,
    x_m: float,
    y_m: float,
    float_x_m: float,
    float_y_m: float,
    tags: list[str],
) -> dict:
    return {
        "t": t_s,
        "depth": sensed_depth_m,
        "pitch": pitch_deg,
        "heading": heading_deg,
        "phase": phase,
        "link": link,
        "x": x_m,
        "y": y_m,
        "float_x": float_x_m,
        "float_y": float_y_m,
        "tags": tags,
    }


def ack_frame(line: str) -> dict:
    return {"ack": line}


def error_frame(reason: str) -> dict:
    return {"error": reason}


def banner_frame(phase: str, t_s: float, cfg_echo: dict) -> dict:
    return {"banner": {"phase": phase, "t": t_s, "config": cfg_echo}}


# ---------------------------------------------------------------- link state

@dataclass(frozen=True)
class LinkState:
    """Connected carries a session id; Dropped carries a reason.

    Reasons: "submerged", "operator_closed", "terminated" (absorbing).
    Before any operator has attached the state reads as operator_closed.
    """

    connected: bool
    session_id: int | None = None
    reason: str | None = None

    @property
    def label(self) -> str:
        if self.connected:
            return "connected"
        return f"dropped:{self.reason}"


# ---------------------------------------------------------------- sessions

@dataclass
class SessionToken:
    """Handle for one transport connection registered with the hub."""

    channel: str
    send: Callable[[str], None]
    close: Callable[[], None]
    session_id: int | None = None  # set when activated
    parked: bool = False
    buffer: bytearray = field(default_factory=bytearray)


class SessionHub:
    """Single-operator gate shared by every transport channel.

    One active session per channel. A connection arriving while submerged
    is parked (a waiting operator) and activated the moment the link comes
    up; a connection arriving while another session is active on the same
    channel is refused, as is everything after termination.
    """

    def __init__(self, banner: Callable[[], dict] | None = None) -> None:
        self._banner = banner
        self._available = False
        self._terminated = False
        self._active: dict[str, SessionToken] = {}
        self._parked: dict[str, SessionToken] = {}
        self._next_sid = 1
        self._lines: list[tuple[str, str]] = []  # (channel, complete line)
        self.state = LinkState(False, reason="operator_closed")

    def set_banner(self, banner: Callable[[], dict]) -> None:
        """Install the banner source (the engine, once it exists)."""
        self._banner = banner

    @property
    def available(self) -> bool:
        return self._available

    @property
    def terminated(self) -> bool:
        return self._terminated

    def connection_arrived(self, channel: str, send: Callable[[str], None], close: Callable[[], None]) -> SessionToken | None:
        """Register a transport connection; None means refused (caller closes)."""
        if self._terminated:
            return None
        token = SessionToken(channel=channel, send=send, close=close)
        if self._available:
            if channel in self._active:
                return None  # single-session rule
            self._activate(token)
            return token
        if channel in self._parked:
            return None
        token.parked = True
        self._parked[channel] = token
        return token

    def connection_closed(self, token: SessionToken) -> None:
        """Operator side went away (or transport error)."""
        if self._parked.get(token.channel) is token:
            del self._parked[token.channel]
            return
        if self._active.get(token.channel) is token:
            del self._active[token.channel]
            token.buffer.clear()
            if self._terminated:
                return
            if self._active:
                survivor = next(iter(self._active.values()))
                self.state = LinkState(True, session_id=survivor.session_id)
            else:
                self.state = LinkState(False, reason="operator_closed")

    def data_received(self, token: SessionToken, data: bytes) -> None:
        """Split incoming bytes into lines; bytes without a session vanish."""
        if token.parked or self._active.get(token.channel) is not token or not self._available:
            return  # physically no link: discard
        token.buffer.extend(data)
        while True:
            idx = token.buffer.find(b"\n")
            if idx < 0:
                break
            raw = bytes(token.buffer[:idx])
            del token.buffer[: idx + 1]
            line = raw.decode("utf-8", errors="replace").rstrip("\r")
            self._lines.append((token.channel, line))
        if len(token.buffer) > _MAX_BUFFER:
            token.close()
            self.connection_closed(token)

    def set_available(self, available: bool) -> None:
        """Gate transition driven by the sensed-depth predicate each tick."""
        if self._terminated:
            return
        if available and not self._available:
            self._available = True
            for channel in list(self._parked):
                if channel not in self._active:
                    self._activate(self._parked.pop(channel))
        elif not available and self._available:
            self._available = False
            had_session = bool(self._active)
            for token in list(self._active.values()):
                token.buffer.clear()  # half-received line dies with the session
                token.close()
            self._active.clear()
            if had_session:
                self.state = LinkState(False, reason="submerged")

    def take_lines(self) -> list[tuple[str, str]]:
        """Drain complete lines received since the last tick, arrival order."""
        lines, self._lines = self._lines, []
        return lines

    def send_line(self, channel: str, text: str) -> None:
        """Send one frame line to the active session on one channel."""
        token = self._active.get(channel)
        if token is not None and self._available:
            token.send(text)

    def broadcast(self, text: str) -> int:
        """Send a frame line to every active session; gated on availability."""
        if not self._available or self._terminated:
            return 0
        n = 0
        for token in self._active.values():
            token.send(text)
            n += 1
        return n

    def terminate(self) -> None:
        """End of mission: close everything, refuse everything afterwards."""
        self._terminated = True
        self._available = False
        for token in list(self._active.values()) + list(self._parked.values()):
            token.close()
        self._active.clear()
        self._parked.clear()
        self._lines.clear()
        self.state = LinkState(False, reason="terminated")

    def _activate(self, token: SessionToken) -> None:
        token.parked = False
        token.buffer.clear()
        token.session_id = self._next_sid
        self._next_sid += 1
        self._active[token.channel] = token
        self.state = LinkState(True, session_id=token.session_id)
        if self._banner is not None:
            token.send(frame_line(self._banner()))
