"""Interactive server runtime: live engine plus TCP and WebSocket endpoints.

The engine ticks inside one asyncio task; transports feed the session hub
from their own tasks on the same loop, so every mission decision still
happens in tick order. Realtime pacing targets one control period per wall
period and catches up after stalls; fast mode just yields between ticks
(with a light idle throttle while nobody is connected).
"""

from __future__ import annotations

import asyncio
from pathlib import Path
from typing import Callable

from . import wslink
from .config import MissionConfig
from .engine import MissionEngine
from .protocol import SessionHub, SessionToken


async def _tcp_connection(hub: SessionHub, reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> None:
    def send(text: str) -> None:
        try:
            writer.write(text.encode("utf-8"))
        except (ConnectionError, RuntimeError):
            pass

    def close() -> None:
        try:
            writer.close()
        except RuntimeError:
            pass

    token = hub.connection_arrived("tcp", send, close)
    if token is None:
        close()
        return
    try:
        while True:
            data = await reader.read(1024)
            if not data:
                break
            hub.data_received(token, data)
    except ConnectionError:
        pass
    finally:
        hub.connection_closed(token)
        close()


async def _ws_connection(hub: SessionHub, ws: wslink.WebSocket) -> None:
    loop = asyncio.get_running_loop()

    async def _send_task(text: str) -> None:
        try:
            await ws.send_text(text.rstrip("\n"))
        except (ConnectionError, wslink.WebSocketError):
            pass

    def send(text: str) -> None:
        if not ws.closed:
            loop.create_task(_send_task(text))

    def close() -> None:
        if not ws.closed:
            # the recv loop below is this socket's reader; it sees the close
            # echo itself, so the teardown must not start a second reader
            loop.create_task(ws.close(drain=False))

    token = hub.connection_arrived("ws", send, close)
    if token is None:
        await ws.close(code=1013)  # busy: try again later
        return
    try:
        while True:
            message = await ws.recv_text()
            if message is None:
                break
            # one WS text message carries exactly one command line
            hub.data_received(token, (message.rstrip("\r\n") + "\n").encode("utf-8"))
    finally:
        hub.connection_closed(token)


class ServerRuntime:
    """Owns the live mission: engine task, TCP endpoint, WS bridge."""

    def __init__(
        self,
        config: MissionConfig,
        out_dir: str | Path,
        seed: int = 0,
        *,
        listen: tuple[str, int] = ("127.0.0.1", 7070),
        ws: tuple[str, int] = ("127.0.0.1", 7071),
        realtime: bool = True,
        on_end: Callable[[], None] | None = None,
    ) -> None:
        self.config = config
        self.hub = SessionHub()
        self.engine = MissionEngine(config, self.hub, out_dir, seed=seed)
        self._listen = listen
        self._ws = ws
        self._realtime = realtime
        self._on_end = on_end
        self._tcp_server: asyncio.AbstractServer | None = None
        self._ws_server: asyncio.AbstractServer | None = None
        self._task: asyncio.Task | None = None

    @property
    def tcp_port(self) -> int:
        assert self._tcp_server is not None and self._tcp_server.sockets
        return self._tcp_server.sockets[0].getsockname()[1]

    @property
    def ws_port(self) -> int:
        assert self._ws_server is not None and self._ws_server.sockets
        return self._ws_server.sockets[0].getsockname()[1]

    async def start(self) -> None:
        self._tcp_server = await asyncio.start_server(
            lambda r, w: _tcp_connection(self.hub, r, w), self._listen[0], self._listen[1]
        )
        self._ws_server = await wslink.serve(
            lambda ws: _ws_connection(self.hub, ws), self._ws[0], self._ws[1]
        )
        self._task = asyncio.create_task(self._run(), name="auvsim-engine")

    async def _run(self) -> None:
        engine = self.engine
        period = self.config.control.control_period_s
        loop = asyncio.get_running_loop()
        next_deadline = loop.time()
        try:
            while engine.tick():
                if engine.state.t_s > self.config.sim.max_mission_s:
                    engine.aborted = True
                    break
                if self._realtime:
                    next_deadline += period
                    await asyncio.sleep(max(0.0, next_deadline - loop.time()))
                elif engine.phase.name == "AwaitingCommand" and not self.hub.state.connected:
                    await asyncio.sleep(0.001)  # idle throttle, keeps fast tests sane
                else:
                    await asyncio.sleep(0)
        finally:
            engine.log.flush()
        if self._on_end is not None:
            self._on_end()

    async def stop(self) -> None:
        if self._task is not None and not self._task.done():
            self._task.cancel()
            try:
                await self._task
            except asyncio.CancelledError:
                pass
        for server in (self._tcp_server, self._ws_server):
            if server is not None:
                server.close()
                await server.wait_closed()
        self.engine.log.flush()

    async def wait_finished(self) -> None:
        if self._task is not None:
            await asyncio.shield(self._task)
