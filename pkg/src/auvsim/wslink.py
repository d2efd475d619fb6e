"""Minimal RFC 6455 WebSocket server and client over asyncio streams.

Supports what the console bridge needs and nothing more: the HTTP/1.1
upgrade handshake, text frames (with fragmentation on receive), ping/pong
and close. Payloads are UTF-8 text; binary frames are refused with a
protocol close.
"""

from __future__ import annotations

import asyncio
import base64
import hashlib
import os
import struct
from urllib.parse import urlparse

_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"

OP_CONT = 0x0
OP_TEXT = 0x1
OP_BINARY = 0x2
OP_CLOSE = 0x8
OP_PING = 0x9
OP_PONG = 0xA

_MAX_PAYLOAD = 1 << 20  # plenty for JSON frames


class WebSocketError(Exception):
    pass


def _accept_value(key: str) -> str:
    digest = hashlib.sha1((key + _GUID).encode("ascii")).digest()
    return base64.b64encode(digest).decode("ascii")


async def _read_http_head(reader: asyncio.StreamReader) -> list[str]:
    head = await reader.readuntil(b"\r\n\r\n")
    if len(head) > 8192:
        raise WebSocketError("oversized HTTP head")
    return head.decode("latin-1").split("\r\n")


def _headers(lines: list[str]) -> dict[str, str]:
    out: dict[str, str] = {}
    for line in lines[1:]:
        if ":" in line:
            name, _, value = line.partition(":")
            out[name.strip().lower()] = value.strip()
    return out


class WebSocket:
    """One established WebSocket connection (either side)."""

    def __init__(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter, *, mask_outgoing: bool) -> None:
        self._reader = reader
        self._writer = writer
        self._mask = mask_outgoing
        self.closed = False
        self._send_lock = asyncio.Lock()

    async def send_text(self, text: str) -> None:
        await self._send_frame(OP_TEXT, text.encode("utf-8"))

    async def recv_text(self) -> str | None:
        """Next text message, or None once the connection is closed."""
        fragments: list[bytes] = []
        while True:
            try:
                fin, opcode, payload = await self._read_frame()
            except (asyncio.IncompleteReadError, ConnectionError, WebSocketError):
                self.closed = True
                return None
            if opcode == OP_PING:
                await self._send_frame(OP_PONG, payload)
                continue
            if opcode == OP_PONG:
                continue
            if opcode == OP_CLOSE:
                await self.close(echo=payload)
                return None
            if opcode == OP_BINARY:
                await self.close(code=1003)  # text only on this bridge
                return None
            if opcode == OP_TEXT or (opcode == OP_CONT and fragments):
                fragments.append(payload)
                if fin:
                    try:
                        return b"".join(fragments).decode("utf-8")
                    except UnicodeDecodeError:
                        await self.close(code=1007)
                        return None
                continue
            await self.close(code=1002)
            return None

    async def close(self, code: int = 1000, reason: str = "", echo: bytes | None = None, drain: bool = True) -> None:
        """Close the connection, completing the closing handshake.

        When this side initiates the close, incoming frames are drained
        until the peer echoes the close (or hangs up). Tearing down the
        socket with unread data still buffered turns the shutdown into a
        TCP reset, which can destroy lines the peer has not read yet.
        Pass drain=False when another task is already reading this socket.
        """
        initiated = not self.closed and echo is None
        if not self.closed:
            self.closed = True
            payload = echo if echo is not None else struct.pack("!H", code) + reason.encode("utf-8")[:100]
            try:
                await self._send_frame(OP_CLOSE, payload, force=True)
            except (ConnectionError, RuntimeError):
                pass
        if initiated and drain:
            try:
                await asyncio.wait_for(self._drain_until_close(), 5.0)
            except (asyncio.TimeoutError, ConnectionError, RuntimeError):
                pass
        try:
            self._writer.close()
        except RuntimeError:
            pass

    async def _drain_until_close(self) -> None:
        while True:
            try:
                fin, opcode, payload = await self._read_frame()
            except (asyncio.IncompleteReadError, ConnectionError, WebSocketError):
                return
            del fin, payload
            if opcode == OP_CLOSE:
                return

    async def _send_frame(self, opcode: int, payload: bytes, force: bool = False) -> None:
        if self.closed and not force:
            raise WebSocketError("connection closed")
        header = bytearray([0x80 | opcode])
        n = len(payload)
        mask_bit = 0x80 if self._mask else 0
        if n < 126:
            header.append(mask_bit | n)
        elif n < 1 << 16:
            header.append(mask_bit | 126)
            header += struct.pack("!H", n)
        else:
            header.append(mask_bit | 127)
            header += struct.pack("!Q", n)
        if self._mask:
            key = os.urandom(4)
            header += key
            payload = bytes(b ^ key[i % 4] for i, b in enumerate(payload))
        async with self._send_lock:
            self._writer.write(bytes(header) + payload)
            await self._writer.drain()

    async def _read_frame(self) -> tuple[bool, int, bytes]:
        b0, b1 = await self._reader.readexactly(2)
        fin = bool(b0 & 0x80)
        opcode = b0 & 0x0F
        masked = bool(b1 & 0x80)
        length = b1 & 0x7F
        if length == 126:
            (length,) = struct.unpack("!H", await self._reader.readexactly(2))
        elif length == 127:
            (length,) = struct.unpack("!Q", await self._reader.readexactly(8))
        if length > _MAX_PAYLOAD:
            raise WebSocketError("payload too large")
        key = await self._reader.readexactly(4) if masked else None
        payload = await self._reader.readexactly(length) if length else b""
        if key is not None:
            payload = bytes(b ^ key[i % 4] for i, b in enumerate(payload))
        return fin, opcode, payload


async def accept(reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> WebSocket | None:
    """Server side of the upgrade handshake; None if the request is no good."""
    try:
        lines = await _read_http_head(reader)
    except (asyncio.IncompleteReadError, asyncio.LimitOverrunError, WebSocketError):
        writer.close()
        return None
    headers = _headers(lines)
    key = headers.get("sec-websocket-key")
    if (
        not lines[0].startswith("GET ")
        or "websocket" not in headers.get("upgrade", "").lower()
        or key is None
    ):
        writer.write(b"HTTP/1.1 400 Bad Request\r\nConnection: close\r\n\r\n")
        try:
            await writer.drain()
        except ConnectionError:
            pass
        writer.close()
        return None
    response = (
        "HTTP/1.1 101 Switching Protocols\r\n"
        "Upgrade: websocket\r\n"
        "Connection: Upgrade\r\n"
        f"Sec-WebSocket-Accept: {_accept_value(key)}\r\n"
        "\r\n"
    )
    writer.write(response.encode("ascii"))
    await writer.drain()
    return WebSocket(reader, writer, mask_outgoing=False)


async def connect(url: str) -> WebSocket:
    """Client side: ws://host:port/path only."""
    parsed = urlparse(url)
    if parsed.scheme != "ws" or parsed.hostname is None:
        raise WebSocketError(f"unsupported WebSocket URL: {url}")
    port = parsed.port if parsed.port is not None else 80
    reader, writer = await asyncio.open_connection(parsed.hostname, port)
    key = base64.b64encode(os.urandom(16)).decode("ascii")
    path = parsed.path or "/"
    request = (
        f"GET {path} HTTP/1.1\r\n"
        f"Host: {parsed.hostname}:{port}\r\n"
        "Upgrade: websocket\r\n"
        "Connection: Upgrade\r\n"
        f"Sec-WebSocket-Key: {key}\r\n"
        "Sec-WebSocket-Version: 13\r\n"
        "\r\n"
    )
    writer.write(request.encode("ascii"))
    await writer.drain()
    try:
        lines = await _read_http_head(reader)
    except asyncio.IncompleteReadError as exc:
        writer.close()
        raise WebSocketError("handshake failed: connection closed") from exc
    if " 101" not in lines[0]:
        writer.close()
        raise WebSocketError(f"handshake refused: {lines[0]!r}")
    if _headers(lines).get("sec-websocket-accept") != _accept_value(key):
        writer.close()
        raise WebSocketError("handshake failed: bad accept value")
    return WebSocket(reader, writer, mask_outgoing=True)


async def serve(handler, host: str, port: int) -> asyncio.AbstractServer:
    """Listen for WebSocket upgrades; handler(ws) runs per connection."""

    async def on_connection(reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> None:
        ws = await accept(reader, writer)
        if ws is None:
            return
        try:
            await handler(ws)
        finally:
            await ws.close()

    return await asyncio.start_server(on_connection, host, port)
