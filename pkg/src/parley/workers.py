"""Synthetic worker models for simulation.

Each model reacts to transcript_bundle messages on its console stream and
issues worker_action messages back through the relay: `button` presses a
default response after a short reaction, `typist` types a canned reply at
a fixed per-character cadence before sending, `absent` never acts and
lets every turn time out.
"""

from __future__ import annotations

import random
from typing import Any

TYPIST_CHAR_SECONDS = 0.25
TYPIST_REACTION = (1.0, 3.0)
BUTTON_REACTION = (2.0, 4.0)

# Casual replies averaging ~40 characters, so a typist spends about ten
# seconds typing on top of the reaction delay.
TYPIST_POOL = (
    "I think so, but let me double check that.",
    "That is a really good question, honestly.",
    "I am not sure, maybe we can look it up.",
    "Sounds great, I was hoping you would ask.",
    "Probably, although it depends on the day.",
    "I heard about that from a friend of mine.",
    "Let me think, I believe it was last year.",
    "Not really my thing, but I get the appeal.",
)


def make_worker(model: str, seed: int | str = 0):
    """Factory for the named worker model: button, typist, or absent."""
    if model == "button":
        return ButtonWorker(seed)
    if model == "typist":
        return TypistWorker(seed)
    if model == "absent":
        return AbsentWorker()
    raise ValueError(f"unknown worker model {model!r}")


def _send_action(relay, console, session_id: str, turn_id: str, payload: dict[str, Any]) -> None:
    relay.handle_worker_action(
        {"type": "worker_action", "session_id": session_id, "turn_id": turn_id, "payload": payload},
        console,
    )


class AbsentWorker:
    """Never acts; the deadline policy owns every resolution."""

    def on_console_message(self, msg, relay, console, scheduler) -> None:
        return


class ButtonWorker:
    """Presses a random default button 2-4 s after the bundle arrives."""

    def __init__(self, seed: int | str = 0):
        self.rng = random.Random(f"{seed}:button")

    def on_console_message(self, msg, relay, console, scheduler) -> None:
        if msg["type"] != "transcript_bundle":
            return
        session_id, turn_id = msg["session_id"], msg["turn_id"]
        delay = self.rng.uniform(*BUTTON_REACTION)
        index = self.rng.randrange(4)
        scheduler.call_later(
            delay,
            lambda: _send_action(relay, console, session_id, turn_id, {"kind": "press_default", "index": index}),
        )


class TypistWorker:
    """Reads for a moment, then types a canned reply at 250 ms per character."""

    def __init__(self, seed: int | str = 0):
        self.rng = random.Random(f"{seed}:typist")

    def on_console_message(self, msg, relay, console, scheduler) -> None:
        if msg["type"] != "transcript_bundle":
            return
        session_id, turn_id = msg["session_id"], msg["turn_id"]
        reply = self.rng.choice(TYPIST_POOL)
        start = self.rng.uniform(*TYPIST_REACTION)
        for i in range(1, len(reply) + 1):
            prefix = reply[:i]
            scheduler.call_later(
                start + TYPIST_CHAR_SECONDS * i,
                lambda p=prefix: _send_action(
                    relay, console, session_id, turn_id, {"kind": "type_draft", "text": p}
                ),
            )
        scheduler.call_later(
            start + TYPIST_CHAR_SECONDS * len(reply),
            lambda: _send_action(relay, console, session_id, turn_id, {"kind": "send_draft"}),
        )
