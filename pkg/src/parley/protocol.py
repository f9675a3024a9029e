"""Wire message envelope and canonical encoding.

Every message between device, relay, and console is one UTF-8 JSON object
with the fields `type`, `seq`, `session_id`, `turn_id`, `at`, `payload`.
`at` is milliseconds since the epoch of the injected clock (a virtual
clock's epoch is its start). Canonical encoding sorts keys and uses
compact separators, so identical message sequences are byte-identical —
golden transcripts rely on this. Payload schemas per type are documented
in protocol.md at the repo root.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Callable

MESSAGE_TYPES = frozenset(
    {
        "skill_open",
        "user_utterance",
        "transcript_bundle",
        "suggestion",
        "cue",
        "worker_action",
        "system_response",
        "skill_close",
        "error",
    }
)


def millis(t: float) -> int:
    return round(t * 1000)


def encode(msg: dict[str, Any]) -> str:
    """Canonical single-line JSON for one wire message."""
    return json.dumps(msg, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def decode(line: str) -> dict[str, Any]:
    msg = json.loads(line)
    if not isinstance(msg, dict) or "type" not in msg:
        raise ValueError("wire message must be a JSON object with a 'type'")
    if msg["type"] not in MESSAGE_TYPES:
        raise ValueError(f"unknown message type {msg['type']!r}")
    return msg


def envelope(
    type_: str,
    at_ms: int,
    session_id: str | None,
    turn_id: str | None,
    payload: dict[str, Any],
) -> dict[str, Any]:
    if type_ not in MESSAGE_TYPES:
        raise ValueError(f"unknown message type {type_!r}")
    return {
        "type": type_,
        "session_id": session_id,
        "turn_id": turn_id,
        "at": at_ms,
        "payload": payload,
    }


@dataclass
class MessageStream:
    """One connection's outbound view: its own strictly increasing seq.

    `deliver` stamps the per-stream sequence number onto a shared
    envelope and hands the finished message to the sink callback.
    """

    name: str
    sink: Callable[[dict[str, Any]], None] | None = None
    keep: bool = False
    messages: list[dict[str, Any]] = field(default_factory=list)
    _seq: int = 0

    def deliver(self, base: dict[str, Any]) -> dict[str, Any]:
        msg = dict(base)
        msg["seq"] = self._seq
        self._seq += 1
        if self.keep:
            self.messages.append(msg)
        if self.sink is not None:
            self.sink(msg)
        return msg


class EventLog(MessageStream):
    """Append-only record of every message the relay saw or sent."""

    def __init__(self):
        super().__init__(name="log", sink=None, keep=True)

    def lines(self) -> list[str]:
        return [encode(m) for m in self.messages]

    def write_jsonl(self, path: str) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for line in self.lines():
                fh.write(line + "\n")
