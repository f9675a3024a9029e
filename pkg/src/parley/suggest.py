"""Suggestion planning and pacing.

A plan enumerates every (variant, slot) request for a transcript bundle
in priority order; a schedule run issues them against a pluggable
suggester, at most one request per `suggester_min_interval` measured on
the injected clock, stopping at the turn deadline. The pacer is shared
per suggester name, so concurrent turns cannot exceed the external
service's global rate.
"""

from __future__ import annotations

import json
import logging
import threading
import urllib.request
from dataclasses import dataclass
from typing import Callable, Protocol

from .clock import Scheduler
from .model import DeadlineConfig, Suggestion, TranscriptBundle
from .phonetics import Lexicon, graphemes_to_phonemes
from .repair import CorpusIndex, build_corpus_index, normalize_text, retrieve_by_phonemes

log = logging.getLogger(__name__)

DEFAULT_RESPONSES = (
    "Yes, I agree.",
    "No, I don't think so.",
    "Could you repeat that again?",
    "I am thinking about it. Could you provide more information?",
)


def default_responses() -> list[str]:
    """The four fixed reply-pane buttons, in display order."""
    return list(DEFAULT_RESPONSES)


@dataclass(frozen=True)
class SuggestionRequest:
    variant_index: int
    slot: int
    scheduled_order: int


def plan_requests(bundle: TranscriptBundle, cfg: DeadlineConfig) -> list[SuggestionRequest]:
    """Order every (variant, slot) request for one turn.

    The original transcript gets its first three slots immediately; the
    alternatives then round-robin one slot at a time, and the original's
    remaining slots interleave after each full alternative round. Every
    pair appears exactly once: (alternatives + 1) * quota requests total.
    """
    n = len(bundle.alternatives)
    quota = cfg.per_variant_quota
    pairs: list[tuple[int, int]] = []
    head = min(3, quota)
    pairs.extend((0, s) for s in range(1, head + 1))
    next_original = head + 1
    alt_next = [1] * n
    while next_original <= quota or any(s <= quota for s in alt_next):
        for a in range(n):
            if alt_next[a] <= quota:
                pairs.append((a + 1, alt_next[a]))
                alt_next[a] += 1
        if next_original <= quota:
            pairs.append((0, next_original))
            next_original += 1
    return [SuggestionRequest(v, s, i) for i, (v, s) in enumerate(pairs)]


class Suggester(Protocol):
    """External response-suggestion service contract.

    One request per utterance variant; returns the suggested text or None
    on failure. Implementations must bound each call by `timeout`.
    """

    name: str
    timeout: float

    def request(self, utterance: str, variant_index: int, turn_id: str) -> str | None: ...


class CorpusSuggester:
    """Built-in suggester: reply of the pronunciation-nearest prompt.

    The dialogue-pair corpus is tab-separated `prompt<TAB>reply`, one
    pair per line. Ties (including the empty utterance, equidistant from
    everything) resolve to the earliest pair. Repeated requests for the
    same turn and variant walk down the nearest-prompt ranking, so a
    five-slot quota yields up to five different responses.
    """

    def __init__(self, pairs: list[tuple[str, str]], lex: Lexicon, name: str = "corpus"):
        if not pairs:
            raise ValueError("dialogue-pair corpus is empty")
        self.name = name
        self.timeout = 3.0
        self.lex = lex
        self.index: CorpusIndex = build_corpus_index([p for p, _ in pairs], lex)
        self.replies: dict[str, str] = {}
        for prompt, reply in pairs:
            self.replies.setdefault(normalize_text(prompt), reply)
        self._slot: dict[tuple[str, int], int] = {}

    @classmethod
    def from_file(cls, path: str, lex: Lexicon) -> "CorpusSuggester":
        pairs: list[tuple[str, str]] = []
        with open(path, encoding="utf-8") as fh:
            for raw in fh:
                line = raw.rstrip("\n")
                if not line.strip() or line.startswith("#"):
                    continue
                prompt, _, reply = line.partition("\t")
                if reply:
                    pairs.append((prompt, reply))
        return cls(pairs, lex)

    def request(self, utterance: str, variant_index: int, turn_id: str) -> str | None:
        key = (turn_id, variant_index)
        rank = self._slot.get(key, 0)
        self._slot[key] = rank + 1
        if len(self._slot) > 20_000:
            self._slot.clear()
        phones = graphemes_to_phonemes(normalize_text(utterance), self.lex)
        hits = retrieve_by_phonemes(phones, self.index, rank + 1)
        if not hits:
            return None
        return self.replies[hits[min(rank, len(hits) - 1)][0]]


class StaticSuggester:
    """Instant canned responses, cycled deterministically. Test/simulation aid."""

    POOL = (
        "That sounds interesting, tell me more.",
        "I was just thinking the same thing.",
        "What makes you say that?",
        "That happens more often than you would think.",
        "I would love to hear the whole story.",
    )

    def __init__(self, name: str = "static"):
        self.name = name
        self.timeout = 3.0
        self._count = 0

    def request(self, utterance: str, variant_index: int, turn_id: str) -> str | None:
        text = self.POOL[self._count % len(self.POOL)]
        self._count += 1
        return text


class HttpSuggester:
    """Adapter for an HTTP suggestion service.

    POSTs `{"utterance", "variant_index", "turn_id"}` as JSON and expects
    `{"text": "..."}` back. Any transport or schema failure counts as a
    skipped request.
    """

    def __init__(self, url: str, name: str = "http", timeout: float = 3.0):
        self.url = url
        self.name = name
        self.timeout = timeout

    def request(self, utterance: str, variant_index: int, turn_id: str) -> str | None:
        body = json.dumps(
            {"utterance": utterance, "variant_index": variant_index, "turn_id": turn_id}
        ).encode("utf-8")
        req = urllib.request.Request(
            self.url, data=body, headers={"Content-Type": "application/json"}
        )
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                payload = json.loads(resp.read().decode("utf-8"))
            text = payload.get("text")
            return text if isinstance(text, str) and text else None
        except Exception as exc:
            log.warning("suggester %s failed: %s", self.name, exc)
            return None


class PacedLimiter:
    """Shared minimum-interval pacer for one external suggester.

    `next_free` is the earliest instant a request may be issued; callers
    re-check at fire time and reschedule if another turn claimed the slot
    first. Lock-guarded so live-server threads can share it.
    """

    def __init__(self, min_interval: float):
        self.min_interval = min_interval
        self._next_free = float("-inf")
        self._lock = threading.Lock()

    @property
    def next_free(self) -> float:
        with self._lock:
            return self._next_free

    def try_claim(self, now: float) -> bool:
        """Claim the current slot if free; advances next_free on success."""
        with self._lock:
            if now < self._next_free:
                return False
            self._next_free = now + self.min_interval
            return True


class ScheduleRun:
    """One turn's paced request sequence against a suggester.

    Issue events are scheduled on the shared scheduler; each fire
    re-validates the deadline and the pacer before calling the suggester.
    Failed requests are skipped, never retried: a retry would eat pacing
    budget the deadline cannot spare. After `stop()` (turn resolved or
    skill closed) nothing further is issued or emitted.
    """

    def __init__(
        self,
        plan: list[SuggestionRequest],
        variant_texts: list[str],
        suggester: Suggester | None,
        turn_deadline: float,
        cfg: DeadlineConfig,
        scheduler: Scheduler,
        limiter: PacedLimiter,
        turn_id: str,
        on_suggestion: Callable[[Suggestion], None] | None = None,
    ):
        self.plan = plan
        self.variant_texts = variant_texts
        self.suggester = suggester
        self.deadline = turn_deadline
        self.cfg = cfg
        self.scheduler = scheduler
        self.limiter = limiter
        self.turn_id = turn_id
        self.on_suggestion = on_suggestion
        self.suggestions: list[Suggestion] = []
        self.issue_times: list[float] = []
        self._cursor = 0
        self._stopped = False

    def start(self) -> "ScheduleRun":
        if self.suggester is None:
            log.warning("no suggester available; turn %s proceeds without suggestions", self.turn_id)
            self._stopped = True
            return self
        if not self.plan:
            self._stopped = True
            return self
        self._schedule_next(self.scheduler.clock.now())
        return self

    def stop(self) -> None:
        self._stopped = True

    @property
    def done(self) -> bool:
        return self._stopped or self._cursor >= len(self.plan)

    def _schedule_next(self, earliest: float) -> None:
        when = max(earliest, self.limiter.next_free)
        if when >= self.deadline:
            self._stopped = True
            return
        self.scheduler.call_at(when, self._fire)

    def _fire(self) -> None:
        now = self.scheduler.clock.now()
        if self._stopped or self._cursor >= len(self.plan):
            return
        if now >= self.deadline:
            self._stopped = True
            return
        if not self.limiter.try_claim(now):
            self._schedule_next(self.limiter.next_free)
            return
        request = self.plan[self._cursor]
        self._cursor += 1
        self.issue_times.append(now)
        utterance = self.variant_texts[request.variant_index]
        try:
            text = self.suggester.request(utterance, request.variant_index, self.turn_id)
        except Exception as exc:
            log.warning("suggester %s request failed: %s", self.suggester.name, exc)
            text = None
        if text:
            suggestion = Suggestion(
                text=text,
                variant_index=request.variant_index,
                received_at=self.scheduler.clock.now(),
                source=self.suggester.name,
            )
            if not self._stopped:
                self.suggestions.append(suggestion)
                if self.on_suggestion is not None:
                    self.on_suggestion(suggestion)
        if self._cursor < len(self.plan):
            self._schedule_next(self.limiter.next_free)
        else:
            self._stopped = True


def run_schedule(
    plan: list[SuggestionRequest],
    variant_texts: list[str],
    suggester: Suggester | None,
    turn_deadline: float,
    cfg: DeadlineConfig,
    scheduler: Scheduler,
    limiter: PacedLimiter | None = None,
    turn_id: str = "t0",
    on_suggestion: Callable[[Suggestion], None] | None = None,
) -> ScheduleRun:
    """Start a paced schedule run; caller drives the scheduler to completion."""
    if limiter is None:
        limiter = PacedLimiter(cfg.suggester_min_interval)
    run = ScheduleRun(
        plan, variant_texts, suggester, turn_deadline, cfg, scheduler, limiter, turn_id, on_suggestion
    )
    return run.start()
