"""Scripted smart-speaker stand-in.

Reproduces the device-side constraints that shape conversations: a
bounded listening window, mid-sentence cut-offs on long pauses, word-level
ASR noise, and read-out time before the next window opens. Speech timing
uses a flat 60 ms per character for both user speech and response
read-out; it is crude, but every timing in a simulation can be audited by
summing the script.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .gateway import Relay
from .phonetics import Lexicon, PhonemeInventory
from .protocol import MessageStream
from .repair import NoiseParams, _CorpusMatrix

SECONDS_PER_CHAR = 0.06


def speak_seconds(text: str) -> float:
    return SECONDS_PER_CHAR * len(text)


@dataclass
class ScriptTurn:
    words: list[tuple[str, float]]  # (word, pre_pause seconds)


@dataclass
class Script:
    turns: list[ScriptTurn]
    persona: str = ""

    @classmethod
    def load(cls, path: str) -> "Script":
        """Parse a script file: `pre_pause_seconds word` per line, blank
        line between turns, `#` comments, optional `@persona` header."""
        turns: list[ScriptTurn] = []
        words: list[tuple[str, float]] = []
        persona = ""
        with open(path, encoding="utf-8") as fh:
            for raw in fh:
                line = raw.split("#", 1)[0].strip()
                if line.startswith("@"):
                    persona = line[1:].strip()
                    continue
                if not line:
                    if words:
                        turns.append(ScriptTurn(words))
                        words = []
                    continue
                pause_s, _, word = line.partition(" ")
                word = word.strip()
                pause = float(pause_s)
                if pause < 0:
                    raise ValueError(f"negative pre_pause in {path}: {raw.strip()!r}")
                if not word:
                    raise ValueError(f"malformed script line in {path}: {raw.strip()!r}")
                words.append((word, pause))
        if words:
            turns.append(ScriptTurn(words))
        if not turns:
            raise ValueError(f"script {path} has no turns")
        return cls(turns, persona)


@dataclass(frozen=True)
class CutoffModel:
    """Device listening behavior: what ends an utterance early."""

    max_pause: float = 1.5
    listening_window: float = 10.0
    no_speech_close: bool = False

    def __post_init__(self):
        if not self.max_pause < self.listening_window:
            raise ValueError("max_pause must be < listening_window")


@dataclass(frozen=True)
class SpokenUtterance:
    text: str
    emitted: list[tuple[str, float]]
    remainder: list[tuple[str, float]]
    elapsed: float  # listening time consumed, including the closing pause
    truncated: bool


def speak_turn(words: list[tuple[str, float]], cutoff: CutoffModel) -> SpokenUtterance:
    """Emit words until a too-long pause or the listening window ends.

    A pause above max_pause between two words ends the utterance (the
    classic mid-sentence cut-off); a word whose end would fall outside
    the listening window is not emitted. The un-spoken suffix is returned
    as the remainder so the caller can queue it as the next turn's
    prefix; emitted + remainder always equals the input.
    """
    t = 0.0
    emitted: list[tuple[str, float]] = []
    truncated = False
    window_hit = False
    for i, (word, pause) in enumerate(words):
        if i > 0 and pause > cutoff.max_pause:
            truncated = True
            break
        end = t + pause + speak_seconds(word)
        if end > cutoff.listening_window:
            truncated = True
            window_hit = True
            break
        emitted.append((word, pause))
        t = end
    remainder = words[len(emitted):]
    # The device stops listening either at the window's end or after
    # waiting max_pause for speech that never resumed.
    if window_hit or not emitted:
        elapsed = cutoff.listening_window
    else:
        elapsed = min(cutoff.listening_window, t + cutoff.max_pause)
    return SpokenUtterance(
        text=" ".join(w for w, _ in emitted),
        emitted=emitted,
        remainder=remainder,
        elapsed=elapsed,
        truncated=truncated,
    )


class WordNeighbors:
    """Nearest-pronunciation lexicon lookup for word-level ASR noise."""

    def __init__(self, lex: Lexicon):
        self.lex = lex
        self.words = list(lex.word_order)
        self.matrix = _CorpusMatrix([lex.pronounce(w) for w in self.words])
        self._cache: dict[str, str] = {}

    def nearest(self, word: str) -> str:
        """Closest-sounding lexicon word that is not `word` itself.

        Homophones sit at distance zero and win; ties resolve by lexicon
        file order.
        """
        word = word.lower()
        hit = self._cache.get(word)
        if hit is not None:
            return hit
        dists = self.matrix.distances(self.lex.pronounce(word))
        for idx in np.argsort(dists, kind="stable"):
            candidate = self.words[idx]
            if candidate != word:
                self._cache[word] = candidate
                return candidate
        return word


def simulate_asr(
    utterance: str,
    noise: NoiseParams,
    neighbors: WordNeighbors,
    rng: random.Random | None = None,
) -> str:
    """Corrupt an utterance the way a far-field recognizer might.

    Per word: substituted by its nearest-sounding lexicon word with
    p_substitute, else dropped with p_delete. Word-level (not phoneme)
    noise keeps every output word pronounceable without a decoder.
    """
    if rng is None:
        rng = random.Random(noise.rng_seed)
    out: list[str] = []
    for word in utterance.split():
        if rng.random() < noise.p_substitute:
            out.append(neighbors.nearest(word))
        elif rng.random() < noise.p_delete:
            continue
        else:
            out.append(word)
    return " ".join(out)


@dataclass
class SimResult:
    script_turns: int = 0
    utterances_sent: int = 0
    responses: list[dict[str, Any]] = field(default_factory=list)
    abandoned: int = 0
    skipped_empty: int = 0
    closed_at: float | None = None


class ScriptedSession:
    """Drives one device + one synthetic worker against a relay.

    Everything runs as scheduler events on the relay's clock: opening the
    skill, listening windows, ASR, worker reactions, and response
    read-out. After the script is exhausted the device says "stop".
    """

    OPEN_GAP = 0.5  # settle time between skill_open ack and first listening window

    def __init__(
        self,
        relay: Relay,
        script: Script,
        cutoff: CutoffModel,
        noise: NoiseParams,
        worker,
        seed: int | str = 0,
    ):
        self.relay = relay
        self.script = script
        self.cutoff = cutoff
        self.noise = noise
        self.worker = worker
        self.scheduler = relay.scheduler
        self.device_stream = MessageStream("device", sink=self._on_device_message, keep=True)
        self.console_stream = MessageStream("console", sink=self._on_console_message, keep=True)
        self.device = relay.connect_device(self.device_stream)
        relay.connect_console(self.console_stream)
        self.neighbors = WordNeighbors(relay.lex)
        self._asr_rng = random.Random(f"{seed}:asr")
        self.result = SimResult(script_turns=len(script.turns))
        self._pending: list[tuple[str, float]] = []
        self._next_turn = 0
        self._done = False

    def start(self) -> "ScriptedSession":
        self.scheduler.call_later(0.0, self._open_skill)
        return self

    def close(self) -> None:
        """Detach from the relay so a later session's turns are not visible
        to this session's worker."""
        self._done = True
        self.relay.disconnect_console(self.console_stream)

    # -- device behavior ---------------------------------------------------

    def _open_skill(self) -> None:
        self.device.say(f"{'alexa'}, open {self.relay.skill_name}")

    def _schedule_listen(self, delay: float) -> None:
        if self._done:
            return
        self.scheduler.call_later(delay, self._listen_window)

    def _listen_window(self) -> None:
        if self._done:
            return
        words = list(self._pending)
        self._pending = []
        if not words:
            if self._next_turn >= len(self.script.turns):
                self.scheduler.call_later(0.0, self._close_skill)
                return
            words = list(self.script.turns[self._next_turn].words)
            self._next_turn += 1
        spoken = speak_turn(words, self.cutoff)
        self._pending = list(spoken.remainder)
        if not spoken.emitted:
            if self.cutoff.no_speech_close:
                self._done = True
                self.result.closed_at = self.scheduler.clock.now()
                self.relay.device_timeout_close(self.device)
                return
            self.result.skipped_empty += 1
            self._schedule_listen(spoken.elapsed + 1.0)
            return
        heard = simulate_asr(spoken.text, self.noise, self.neighbors, rng=self._asr_rng)
        if not heard:
            self.result.skipped_empty += 1
            self._schedule_listen(spoken.elapsed + 1.0)
            return
        self.scheduler.call_later(spoken.elapsed, lambda: self._utter(heard))

    def _utter(self, text: str) -> None:
        if self._done:
            return
        self.result.utterances_sent += 1
        self.device.say(text)

    def _close_skill(self) -> None:
        if self._done:
            return
        self._done = True
        self.result.closed_at = self.scheduler.clock.now()
        self.device.say("stop")

    def _on_device_message(self, msg: dict[str, Any]) -> None:
        if msg["type"] == "skill_open":
            self._schedule_listen(self.OPEN_GAP)
        elif msg["type"] == "system_response":
            self.result.responses.append(msg)
            readout = speak_seconds(msg["payload"]["text"])
            self._schedule_listen(readout)
        elif msg["type"] == "skill_close":
            if msg["payload"].get("abandoned_turn"):
                self.result.abandoned += 1

    # -- worker side ---------------------------------------------------------

    def _on_console_message(self, msg: dict[str, Any]) -> None:
        if self.worker is not None:
            self.worker.on_console_message(msg, self.relay, self.console_stream, self.scheduler)
