"""Minimal WebSocket layer over asyncio streams.

Implements just what the teleop contract needs: the HTTP upgrade handshake,
text frames, ping/pong, and the close handshake. Client frames must be
masked, server frames are not (per RFC 6455). Fragmented messages are
reassembled; binary payloads are rejected since every envelope is a text
frame.
"""

from __future__ import annotations

import asyncio
import base64
import hashlib
import os
import struct

__all__ = [
    "WsError",
    "WsConnection",
    "accept_websocket",
    "connect_websocket",
]

_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"

_OP_CONT = 0x0
_OP_TEXT = 0x1
_OP_BINARY = 0x2
_OP_CLOSE = 0x8
_OP_PING = 0x9
_OP_PONG = 0xA

_MAX_MESSAGE = 4 * 1024 * 1024


class WsError(ConnectionError):
    """Protocol violation or handshake failure."""


def _accept_key(key: str) -> str:
    digest = hashlib.sha1((key + _GUID).encode("ascii")).digest()
    return base64.b64encode(digest).decode("ascii")


def _encode_frame(opcode: int, payload: bytes, mask: bool) -> bytes:
    head = bytearray([0x80 | opcode])
    n = len(payload)
    mask_bit = 0x80 if mask else 0x00
    if n < 126:
        head.append(mask_bit | n)
    elif n < 1 << 16:
        head.append(mask_bit | 126)
        head += struct.pack(">H", n)
    else:
        head.append(mask_bit | 127)
        head += struct.pack(">Q", n)
    if mask:
        key = os.urandom(4)
        head += key
        payload = bytes(b ^ key[i % 4] for i, b in enumerate(payload))
    return bytes(head) + payload


async def _read_frame(reader: asyncio.StreamReader,
                      require_mask: bool) -> tuple[bool, int, bytes]:
    try:
        header = await reader.readexactly(2)
    except asyncio.IncompleteReadError:
        raise WsError("connection closed mid-frame") from None
    fin = bool(header[0] & 0x80)
    opcode = header[0] & 0x0F
    masked = bool(header[1] & 0x80)
    length = header[1] & 0x7F
    if masked != require_mask:
        raise WsError("mask bit violates role (client frames must be masked)")
    try:
        if length == 126:
            length = struct.unpack(">H", await reader.readexactly(2))[0]
        elif length == 127:
            length = struct.unpack(">Q", await reader.readexactly(8))[0]
        if length > _MAX_MESSAGE:
            raise WsError("frame too large")
        key = await reader.readexactly(4) if masked else b""
        payload = await reader.readexactly(length) if length else b""
    except asyncio.IncompleteReadError:
        raise WsError("connection closed mid-frame") from None
    if masked:
        payload = bytes(b ^ key[i % 4] for i, b in enumerate(payload))
    return fin, opcode, payload


class WsConnection:
    """One established WebSocket endpoint (either role).

    recv_text() returns None once the peer closes; control frames are
    handled internally.
    """

    def __init__(self, reader: asyncio.StreamReader,
                 writer: asyncio.StreamWriter, *, is_client: bool):
        self._reader = reader
        self._writer = writer
        self._is_client = is_client
        self._closed = False

    async def send_text(self, text: str) -> None:
        if self._closed:
            raise WsError("connection is closed")
        frame = _encode_frame(_OP_TEXT, text.encode("utf-8"),
                              mask=self._is_client)
        self._writer.write(frame)
        await self._writer.drain()

    async def recv_text(self) -> str | None:
        buffer = bytearray()
        fragmented = False
        while True:
            if self._closed:
                return None
            try:
                fin, opcode, payload = await _read_frame(
                    self._reader, require_mask=not self._is_client
                )
            except WsError:
                self._closed = True
                return None
            if opcode == _OP_PING:
                await self._send_control(_OP_PONG, payload)
                continue
            if opcode == _OP_PONG:
                continue
            if opcode == _OP_CLOSE:
                await self._finish_close(payload)
                return None
            if opcode == _OP_BINARY:
                raise WsError("binary frames are not part of the contract")
            if opcode == _OP_TEXT:
                if fragmented:
                    raise WsError("nested fragmented message")
                buffer += payload
                fragmented = not fin
            elif opcode == _OP_CONT:
                if not fragmented:
                    raise WsError("continuation without start frame")
                buffer += payload
                fragmented = not fin
            else:
                raise WsError(f"unsupported opcode {opcode}")
            if len(buffer) > _MAX_MESSAGE:
                raise WsError("message too large")
            if not fragmented:
                return buffer.decode("utf-8")

    async def _send_control(self, opcode: int, payload: bytes) -> None:
        if self._closed:
            return
        try:
            self._writer.write(_encode_frame(opcode, payload,
                                             mask=self._is_client))
            await self._writer.drain()
        except (ConnectionResetError, RuntimeError):
            self._closed = True

    async def _finish_close(self, payload: bytes) -> None:
        await self._send_control(_OP_CLOSE, payload[:2])
        self._closed = True
        self._writer.close()

    async def close(self, code: int = 1000) -> None:
        if self._closed:
            return
        self._closed = True
        try:
            self._writer.write(_encode_frame(_OP_CLOSE, struct.pack(">H", code),
                                             mask=self._is_client))
            await self._writer.drain()
        except (ConnectionResetError, RuntimeError):
            pass
        self._writer.close()

    @property
    def closed(self) -> bool:
        return self._closed


async def accept_websocket(reader: asyncio.StreamReader,
                           writer: asyncio.StreamWriter) -> tuple[WsConnection, str]:
    """Server side of the upgrade handshake. Returns (connection, path)."""
    request = await reader.readuntil(b"\r\n\r\n")
    lines = request.decode("latin-1").split("\r\n")
    parts = lines[0].split(" ")
    if len(parts) != 3 or parts[0] != "GET":
        raise WsError(f"bad request line: {lines[0]!r}")
    path = parts[1]
    headers = {}
    for line in lines[1:]:
        if ":" in line:
            name, _, value = line.partition(":")
            headers[name.strip().lower()] = value.strip()
    if headers.get("upgrade", "").lower() != "websocket":
        raise WsError("not a websocket upgrade request")
    key = headers.get("sec-websocket-key")
    if not key:
        raise WsError("missing Sec-WebSocket-Key")
    response = (
        "HTTP/1.1 101 Switching Protocols\r\n"
        "Upgrade: websocket\r\n"
        "Connection: Upgrade\r\n"
        f"Sec-WebSocket-Accept: {_accept_key(key)}\r\n"
        "\r\n"
    )
    writer.write(response.encode("latin-1"))
    await writer.drain()
    return WsConnection(reader, writer, is_client=False), path


async def connect_websocket(host: str, port: int,
                            path: str = "/") -> WsConnection:
    """Client side of the upgrade handshake."""
    reader, writer = await asyncio.open_connection(host, port)
    key = base64.b64encode(os.urandom(16)).decode("ascii")
    request = (
        f"GET {path} HTTP/1.1\r\n"
        f"Host: {host}:{port}\r\n"
        "Upgrade: websocket\r\n"
        "Connection: Upgrade\r\n"
        f"Sec-WebSocket-Key: {key}\r\n"
        "Sec-WebSocket-Version: 13\r\n"
        "\r\n"
    )
    writer.write(request.encode("latin-1"))
    await writer.drain()
    response = await reader.readuntil(b"\r\n\r\n")
    lines = response.decode("latin-1").split("\r\n")
    status = lines[0].split(" ")
    if len(status) < 2 or status[1] != "101":
        writer.close()
        raise WsError(f"upgrade refused: {lines[0]!r}")
    expected = _accept_key(key)
    accept = ""
    for line in lines[1:]:
        if line.lower().startswith("sec-websocket-accept:"):
            accept = line.partition(":")[2].strip()
    if accept != expected:
        writer.close()
        raise WsError("bad Sec-WebSocket-Accept")
    return WsConnection(reader, writer, is_client=True)
