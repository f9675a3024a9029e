"""Live-transport smoke tests: WebSocket endpoints, auth, TCP fallback.

Runs a real server on an ephemeral port with a sub-second worker budget
so timeout resolution happens on the wall clock within the test.
"""

import asyncio
import json

import aiohttp
import pytest
from aiohttp import web

from parley.clock import Scheduler, WallClock
from parley.gateway import Relay
from parley.metrics import MetricsStore
from parley.model import DeadlineConfig
from parley.repair import RetrievalRepairModel, build_corpus_index
from parley.server import _pump, _tcp_handler, build_app
from parley.suggest import StaticSuggester

TOKEN = "test-token"

FAST = DeadlineConfig(
    worker_budget=1.0,
    suggestion_lock=0.2,
    warning_at_remaining=0.5,
    listening_window=10.0,
    suggester_min_interval=0.2,
    per_variant_quota=1,
    alternatives_count=1,
)


def make_relay(lexicon):
    clock = WallClock()
    scheduler = Scheduler(clock)
    metrics = MetricsStore()
    index = build_corpus_index(["do you like coffee", "hello there"], lexicon)
    relay = Relay(FAST, lexicon, RetrievalRepairModel(index), StaticSuggester(),
                  clock, scheduler, metrics, seed=1)
    return relay, scheduler, metrics


async def start_site(relay):
    app = build_app(relay, TOKEN)
    runner = web.AppRunner(app)
    await runner.setup()
    site = web.TCPSite(runner, "127.0.0.1", 0)
    await site.start()
    port = site._server.sockets[0].getsockname()[1]
    return runner, port


def device_msg(text: str) -> str:
    return json.dumps({"type": "user_utterance", "payload": {"text": text}})


def test_websocket_turn_roundtrip(lexicon):
    async def scenario():
        relay, scheduler, metrics = make_relay(lexicon)
        runner, port = await start_site(relay)
        pump = asyncio.ensure_future(_pump(scheduler))
        try:
            async with aiohttp.ClientSession() as http:
                async with http.ws_connect(f"ws://127.0.0.1:{port}/device?token={TOKEN}") as device:
                    await device.send_str(device_msg("alexa, open echopal"))
                    opened = json.loads((await device.receive_str()))
                    assert opened["type"] == "skill_open"
                    await device.send_str(device_msg("do you like coffee"))
                    # absent worker: the 1 s budget expires and a fallback goes out
                    while True:
                        msg = json.loads(await asyncio.wait_for(device.receive_str(), timeout=5))
                        if msg["type"] == "system_response":
                            break
                    assert msg["payload"]["resolution"] == "random_suggestion_on_timeout"
            assert len(metrics.records()) == 1
            assert metrics.records()[0].latency == pytest.approx(1.0, abs=0.2)
        finally:
            pump.cancel()
            await runner.cleanup()

    asyncio.run(scenario())


def test_console_sees_bundle_and_cues(lexicon):
    async def scenario():
        relay, scheduler, metrics = make_relay(lexicon)
        runner, port = await start_site(relay)
        pump = asyncio.ensure_future(_pump(scheduler))
        try:
            async with aiohttp.ClientSession() as http:
                async with http.ws_connect(f"ws://127.0.0.1:{port}/console?token={TOKEN}") as console:
                    async with http.ws_connect(f"ws://127.0.0.1:{port}/device?token={TOKEN}") as device:
                        await device.send_str(device_msg("alexa, open echopal"))
                        await device.receive_str()
                        await device.send_str(device_msg("hello there"))
                        seen = []
                        while "system_response" not in seen:
                            msg = json.loads(await asyncio.wait_for(console.receive_str(), timeout=5))
                            seen.append(msg["type"])
                        assert seen.index("transcript_bundle") < seen.index("suggestion")
                        assert "cue" in seen
        finally:
            pump.cancel()
            await runner.cleanup()

    asyncio.run(scenario())


def test_bad_token_rejected(lexicon):
    async def scenario():
        relay, scheduler, _ = make_relay(lexicon)
        runner, port = await start_site(relay)
        try:
            async with aiohttp.ClientSession() as http:
                with pytest.raises(aiohttp.WSServerHandshakeError):
                    await http.ws_connect(f"ws://127.0.0.1:{port}/device?token=wrong")
        finally:
            await runner.cleanup()

    asyncio.run(scenario())


def test_tcp_fallback_carries_same_payloads(lexicon):
    async def scenario():
        relay, scheduler, _ = make_relay(lexicon)
        server = await asyncio.start_server(
            lambda r, w: _tcp_handler(relay, TOKEN, r, w), "127.0.0.1", 0
        )
        port = server.sockets[0].getsockname()[1]
        pump = asyncio.ensure_future(_pump(scheduler))
        try:
            reader, writer = await asyncio.open_connection("127.0.0.1", port)
            writer.write((json.dumps({"token": TOKEN, "role": "device"}) + "\n").encode())
            writer.write((device_msg("alexa, open echopal") + "\n").encode())
            await writer.drain()
            line = await asyncio.wait_for(reader.readline(), timeout=5)
            msg = json.loads(line)
            assert msg["type"] == "skill_open"
            assert set(msg) == {"type", "seq", "session_id", "turn_id", "at", "payload"}
            writer.close()
        finally:
            pump.cancel()
            server.close()

    asyncio.run(scenario())


def test_tcp_rejects_bad_token(lexicon):
    async def scenario():
        relay, scheduler, _ = make_relay(lexicon)
        server = await asyncio.start_server(
            lambda r, w: _tcp_handler(relay, TOKEN, r, w), "127.0.0.1", 0
        )
        port = server.sockets[0].getsockname()[1]
        try:
            reader, writer = await asyncio.open_connection("127.0.0.1", port)
            writer.write(b'{"token": "wrong", "role": "device"}\n')
            await writer.drain()
            line = await asyncio.wait_for(reader.readline(), timeout=5)
            assert json.loads(line) == {"error": "unauthorized"}
        finally:
            server.close()

    asyncio.run(scenario())
