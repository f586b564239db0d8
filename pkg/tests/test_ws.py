"""WebSocket layer: handshake, framing, control frames, limits."""

from __future__ import annotations

import asyncio
import struct

import pytest

from gestibot.ws import (
    WsConnection,
    WsError,
    _accept_key,
    _encode_frame,
    _read_frame,
    accept_websocket,
    connect_websocket,
)


class WsHarness:
    """One accepted server connection paired with one client connection."""

    def __init__(self):
        self.server_conn: WsConnection | None = None
        self.path: str | None = None
        self._accepted = asyncio.Event()

    async def __aenter__(self):
        async def on_client(reader, writer):
            self.server_conn, self.path = await accept_websocket(reader, writer)
            self._accepted.set()

        self._server = await asyncio.start_server(on_client, "127.0.0.1", 0)
        port = self._server.sockets[0].getsockname()[1]
        self.client = await connect_websocket("127.0.0.1", port, "/test")
        await asyncio.wait_for(self._accepted.wait(), timeout=5.0)
        return self

    async def __aexit__(self, *exc):
        self._server.close()
        await self._server.wait_closed()


def test_accept_key_matches_the_reference_vector():
    # handshake vector from the protocol definition
    assert (_accept_key("dGhlIHNhbXBsZSBub25jZQ==")
            == "s3pPLMBiTxaQ9kYGzzhZRbK+xOo=")


def test_text_roundtrip_both_directions():
    async def run():
        async with WsHarness() as h:
            assert h.path == "/test"
            await h.client.send_text("ping from client")
            assert await h.server_conn.recv_text() == "ping from client"
            await h.server_conn.send_text("pong from server")
            assert await h.client.recv_text() == "pong from server"
            payload = "x" * 70_000  # exercises the 64 KB length encoding
            await h.client.send_text(payload)
            assert await h.server_conn.recv_text() == payload

    asyncio.run(run())


def test_close_handshake_yields_none_on_both_sides():
    async def run():
        async with WsHarness() as h:
            await h.client.close()
            assert await h.server_conn.recv_text() is None
            assert h.client.closed
            with pytest.raises(WsError):
                await h.client.send_text("too late")

    asyncio.run(run())


def test_server_initiated_close():
    async def run():
        async with WsHarness() as h:
            await h.server_conn.close()
            assert await h.client.recv_text() is None

    asyncio.run(run())


def test_ping_is_answered_with_a_pong():
    async def run():
        async with WsHarness() as h:
            # raw ping from the server; receive the pong below recv_text
            h.server_conn._writer.write(_encode_frame(0x9, b"beat", mask=False))
            await h.server_conn._writer.drain()

            async def client_pump():
                return await h.client.recv_text()

            pump = asyncio.ensure_future(client_pump())
            fin, opcode, payload = await asyncio.wait_for(
                _read_frame(h.server_conn._reader, require_mask=True),
                timeout=5.0,
            )
            assert fin and opcode == 0xA and payload == b"beat"
            await h.server_conn.send_text("after the pong")
            assert await pump == "after the pong"

    asyncio.run(run())


def test_fragmented_messages_are_reassembled():
    async def run():
        async with WsHarness() as h:
            writer = h.server_conn._writer
            # hand-built fragmented text: FIN=0 TEXT, FIN=0 CONT, FIN=1 CONT
            part1 = bytearray(_encode_frame(0x1, b"one ", mask=False))
            part1[0] &= 0x7F
            part2 = bytearray(_encode_frame(0x0, b"two ", mask=False))
            part2[0] &= 0x7F
            part3 = _encode_frame(0x0, b"three", mask=False)
            writer.write(bytes(part1) + bytes(part2) + part3)
            await writer.drain()
            assert await h.client.recv_text() == "one two three"

    asyncio.run(run())


def test_unmasked_client_frames_are_a_protocol_error():
    async def run():
        async with WsHarness() as h:
            # bypass the client object: write an unmasked frame to the server
            h.client._writer.write(_encode_frame(0x1, b"cheat", mask=False))
            await h.client._writer.drain()
            # the server treats the violation as a dead connection
            assert await h.server_conn.recv_text() is None

    asyncio.run(run())


def test_binary_frames_raise_to_the_caller():
    async def run():
        async with WsHarness() as h:
            h.client._writer.write(_encode_frame(0x2, b"\x00\x01", mask=True))
            await h.client._writer.drain()
            with pytest.raises(WsError, match="binary"):
                await h.server_conn.recv_text()

    asyncio.run(run())


def test_connect_to_a_non_websocket_server_fails():
    async def run():
        async def on_client(reader, writer):
            await reader.readuntil(b"\r\n\r\n")
            writer.write(b"HTTP/1.1 404 Not Found\r\n\r\n")
            await writer.drain()
            writer.close()

        server = await asyncio.start_server(on_client, "127.0.0.1", 0)
        port = server.sockets[0].getsockname()[1]
        try:
            with pytest.raises(WsError, match="refused"):
                await connect_websocket("127.0.0.1", port)
        finally:
            server.close()
            await server.wait_closed()

    asyncio.run(run())


def test_oversized_frame_is_rejected():
    async def run():
        async with WsHarness() as h:
            # forge a header that declares a payload beyond the cap
            header = bytes([0x81, 127]) + struct.pack(">Q", 5 * 1024 * 1024)
            h.server_conn._writer.write(header)
            await h.server_conn._writer.drain()
            # client-side read surfaces the violation as a closed stream
            assert await h.client.recv_text() is None
            assert h.client.closed

    asyncio.run(run())


def test_encode_frame_length_encodings():
    short = _encode_frame(0x1, b"x" * 125, mask=False)
    assert short[1] == 125
    medium = _encode_frame(0x1, b"x" * 126, mask=False)
    assert medium[1] == 126
    assert struct.unpack(">H", medium[2:4])[0] == 126
    large = _encode_frame(0x1, b"x" * 70_000, mask=False)
    assert large[1] == 127
    assert struct.unpack(">Q", large[2:10])[0] == 70_000
    masked = _encode_frame(0x1, b"abc", mask=True)
    assert masked[1] & 0x80
