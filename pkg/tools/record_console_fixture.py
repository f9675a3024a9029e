#!/usr/bin/env python3
"""Capture one turn's console message stream for the frontend tests.

Drives the relay on the virtual clock: a device utterance opens a turn,
the worker tries a locked suggestion (rejection), clicks transcript 2,
then presses default 0. The console's view of it all lands in
frontend/test/fixtures/recorded_turn.json.
"""

from __future__ import annotations

import json
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from parley.app import build_relay, load_resources
from parley.clock import Scheduler, VirtualClock
from parley.config import RunConfig
from parley.metrics import MetricsStore
from parley.protocol import MessageStream


def main() -> int:
    cfg = RunConfig()
    res = load_resources(cfg)
    clock = VirtualClock()
    scheduler = Scheduler(clock)
    relay = build_relay(cfg, res, clock, scheduler, MetricsStore())
    console = relay.connect_console(MessageStream("console", keep=True))
    device = relay.connect_device(MessageStream("device", keep=True))

    device.say("alexa, open echopal")
    device.say("what is your favorite scene in the movie")
    session_id = device.session_id
    turn_id = relay.sessions[session_id].engine.active_turn.turn_id

    def act(payload):
        relay.handle_worker_action(
            {"type": "worker_action", "session_id": session_id, "turn_id": turn_id, "payload": payload},
            console,
        )

    scheduler.call_at(3.0, lambda: act({"kind": "select_suggestion", "index": 0}))
    scheduler.call_at(4.0, lambda: act({"kind": "select_transcript", "index": 2}))
    scheduler.call_at(8.0, lambda: act({"kind": "press_default", "index": 0}))
    scheduler.run_until_idle(max_time=9.0)

    out = {
        "worker_budget_ms": 25000,
        "suggestion_lock_ms": 5000,
        "messages": console.messages,
    }
    path = os.path.join(
        os.path.dirname(__file__), "..", "frontend", "test", "fixtures", "recorded_turn.json"
    )
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(out, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {len(console.messages)} console messages to {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
