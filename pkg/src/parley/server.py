"""Network front end: WebSocket endpoints, TCP line fallback, console assets.

Devices connect to `ws://host:port/device?token=...` and consoles to
`/console?token=...`; each message is one canonical JSON object (see
protocol.md). A line-delimited TCP fallback carries identical payloads
for headless clients: its first line must be `{"token": ..., "role":
"device"|"console"}`. Everything runs on one asyncio loop; a pump task
fires due scheduler events (engine deadlines, suggestion pacing) every
50 ms against the wall clock.
"""

from __future__ import annotations

import asyncio
import json
import logging
import os

from aiohttp import WSMsgType, web

from .app import build_relay, load_resources
from .clock import Scheduler, WallClock
from .config import RunConfig
from .gateway import Relay
from .metrics import MetricsStore
from .protocol import MessageStream, encode

log = logging.getLogger(__name__)

PUMP_INTERVAL = 0.05


def _parse_listen(listen: str) -> tuple[str, int]:
    host, _, port = listen.rpartition(":")
    return host or "127.0.0.1", int(port)


class _WsClient:
    def __init__(self, relay: Relay, ws: web.WebSocketResponse, role: str):
        self.relay = relay
        self.ws = ws
        self.role = role
        self.queue: asyncio.Queue[dict] = asyncio.Queue()
        self.stream = MessageStream(role, sink=self.queue.put_nowait)
        self.device = relay.connect_device(self.stream) if role == "device" else None
        if role == "console":
            relay.connect_console(self.stream)

    async def writer(self) -> None:
        while True:
            msg = await self.queue.get()
            await self.ws.send_str(encode(msg))

    def handle_inbound(self, msg: dict) -> None:
        if self.role == "device":
            text = (msg.get("payload") or {}).get("text", "")
            self.device.say(text)
        else:
            if msg.get("type") == "worker_action":
                self.relay.handle_worker_action(msg, self.stream)

    def close(self) -> None:
        if self.role == "console":
            self.relay.disconnect_console(self.stream)


def build_app(relay: Relay, token: str, console_dist: str | None = None) -> web.Application:
    app = web.Application()

    async def ws_endpoint(request: web.Request, role: str) -> web.StreamResponse:
        if request.query.get("token") != token:
            raise web.HTTPUnauthorized(text="bad token")
        ws = web.WebSocketResponse(heartbeat=30)
        await ws.prepare(request)
        client = _WsClient(relay, ws, role)
        writer = asyncio.ensure_future(client.writer())
        try:
            async for raw in ws:
                if raw.type != WSMsgType.TEXT:
                    continue
                try:
                    client.handle_inbound(json.loads(raw.data))
                except (ValueError, KeyError) as exc:
                    log.warning("bad %s message: %s", role, exc)
        finally:
            writer.cancel()
            client.close()
        return ws

    async def device_endpoint(request: web.Request) -> web.StreamResponse:
        return await ws_endpoint(request, "device")

    async def console_endpoint(request: web.Request) -> web.StreamResponse:
        return await ws_endpoint(request, "console")

    app.router.add_get("/device", device_endpoint)
    app.router.add_get("/console", console_endpoint)
    if console_dist and os.path.isdir(console_dist):
        app.router.add_static("/app", console_dist, show_index=True)
    return app


async def _tcp_handler(relay: Relay, token: str, reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> None:
    client: _TcpClient | None = None
    try:
        hello_line = await reader.readline()
        try:
            hello = json.loads(hello_line.decode("utf-8"))
        except ValueError:
            writer.write(b'{"error":"bad hello"}\n')
            return
        if hello.get("token") != token or hello.get("role") not in ("device", "console"):
            writer.write(b'{"error":"unauthorized"}\n')
            return
        client = _TcpClient(relay, writer, hello["role"])
        async for line in _lines(reader):
            try:
                client.handle_inbound(json.loads(line))
            except (ValueError, KeyError) as exc:
                log.warning("bad tcp message: %s", exc)
    finally:
        if client is not None:
            client.close()
        writer.close()


async def _lines(reader: asyncio.StreamReader):
    while True:
        line = await reader.readline()
        if not line:
            return
        text = line.decode("utf-8").strip()
        if text:
            yield text


class _TcpClient:
    def __init__(self, relay: Relay, writer: asyncio.StreamWriter, role: str):
        self.relay = relay
        self.writer = writer
        self.role = role
        self.stream = MessageStream(role, sink=self._send)
        self.device = relay.connect_device(self.stream) if role == "device" else None
        if role == "console":
            relay.connect_console(self.stream)

    def _send(self, msg: dict) -> None:
        self.writer.write((encode(msg) + "\n").encode("utf-8"))

    def handle_inbound(self, msg: dict) -> None:
        if self.role == "device":
            self.device.say((msg.get("payload") or {}).get("text", ""))
        elif msg.get("type") == "worker_action":
            self.relay.handle_worker_action(msg, self.stream)

    def close(self) -> None:
        if self.role == "console":
            self.relay.disconnect_console(self.stream)


async def _pump(scheduler: Scheduler) -> None:
    while True:
        scheduler.run_due(scheduler.clock.now())
        await asyncio.sleep(PUMP_INTERVAL)


async def run_server(cfg: RunConfig) -> None:
    res = load_resources(cfg)
    clock = WallClock()
    scheduler = Scheduler(clock)
    metrics = MetricsStore()
    relay = build_relay(cfg, res, clock, scheduler, metrics)
    app = build_app(relay, cfg.token, console_dist=os.path.join("frontend", "dist"))
    host, port = _parse_listen(cfg.listen)
    runner = web.AppRunner(app)
    await runner.setup()
    site = web.TCPSite(runner, host, port)
    await site.start()
    log.info("websocket endpoints on ws://%s:%d/{device,console}", host, port)
    tcp_server = None
    if cfg.tcp_listen:
        tcp_host, tcp_port = _parse_listen(cfg.tcp_listen)
        tcp_server = await asyncio.start_server(
            lambda r, w: _tcp_handler(relay, cfg.token, r, w), tcp_host, tcp_port
        )
        log.info("tcp fallback on %s:%d", tcp_host, tcp_port)
    pump = asyncio.ensure_future(_pump(scheduler))
    try:
        await asyncio.Event().wait()
    finally:
        pump.cancel()
        if tcp_server is not None:
            tcp_server.close()
        await runner.cleanup()


def serve(cfg: RunConfig) -> int:
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(name)s %(message)s")
    try:
        asyncio.run(run_server(cfg))
    except KeyboardInterrupt:
        pass
    return 0
