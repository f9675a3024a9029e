"""Per-turn deadline state machine.

One engine instance serializes one session's events: transcript delivery,
worker actions, cue emission, and the timeout fallback. Cue and deadline
work is scheduled as exact-time events when a scheduler is attached;
`poll` exists for tick-driven callers (the live server pumps it at
TICK_SECONDS granularity).

Timeout policy when the budget expires: flush a non-empty draft; else pick
a random delivered suggestion; else fall back to a random default button.
The last branch is not covered by the studied design, which never says
what happens with no draft and no suggestions; the device must still be
answered, so a seeded default response goes out. All timeout randomness
draws from a per-turn seeded stream.
"""

from __future__ import annotations

import random
from typing import Callable

from .clock import Clock, Handle, Scheduler
from .model import (
    CueEvent,
    DeadlineConfig,
    LatencyRecord,
    Resolution,
    ResponseKind,
    Session,
    Suggestion,
    TranscriptBundle,
    Turn,
    WorkerAction,
)
from .suggest import DEFAULT_RESPONSES

TICK_SECONDS = 0.1


class TurnInFlightError(RuntimeError):
    """A new turn cannot open while another is unresolved."""


class StaleActionError(RuntimeError):
    """The targeted turn already resolved (or was abandoned)."""


class DoubleResolutionError(RuntimeError):
    """A turn can resolve exactly once."""


class SessionStateError(RuntimeError):
    """Event not acceptable in the session's current state."""


class ActionRejected(Exception):
    """Expected, recoverable rejection of a worker action."""


class SuggestionLockedError(ActionRejected):
    """Suggestion selected during the initial lock window."""

    def __init__(self, remaining: float):
        super().__init__(f"suggestions locked for another {remaining:.1f} s")
        self.remaining = remaining


class SessionEngine:
    """Drives one session's turns against the deadline configuration."""

    def __init__(
        self,
        session: Session,
        cfg: DeadlineConfig,
        clock: Clock,
        scheduler: Scheduler | None = None,
        seed: int | str = 0,
        on_cue: Callable[[CueEvent], None] | None = None,
        on_resolved: Callable[[Turn, LatencyRecord], None] | None = None,
        on_suggestion: Callable[[Turn, Suggestion], None] | None = None,
    ):
        self.session = session
        self.cfg = cfg
        self.clock = clock
        self.scheduler = scheduler
        self.seed = seed
        self.on_cue = on_cue or (lambda cue: None)
        self.on_resolved = on_resolved or (lambda turn, rec: None)
        self.on_suggestion = on_suggestion or (lambda turn, s: None)
        self._active: Turn | None = None
        self._deadline = 0.0
        self._lock_until = 0.0
        self._warning_at = 0.0
        self._dong_done = False
        self._unlock_done = False
        self._rng: random.Random = random.Random(0)
        self._handles: list[Handle] = []

    # -- session lifecycle ------------------------------------------------

    def open_session(self, now: float) -> None:
        if self.session.state != "idle":
            raise SessionStateError(f"cannot open session in state {self.session.state}")
        self.session.state = "open"
        self.session.opened_at = now

    def close_session(self, now: float) -> Turn | None:
        """Close the session; an in-flight turn is abandoned, not resolved.

        Returns the abandoned turn, if any.
        """
        if self.session.state == "closed":
            raise SessionStateError("session already closed")
        abandoned = None
        if self._active is not None and not self._active.resolved:
            abandoned = self._active
            abandoned.abandoned = True
            self._clear_timers()
            self._active = None
        self.session.state = "closed"
        self.session.closed_at = now
        return abandoned

    # -- turn lifecycle ---------------------------------------------------

    def open_turn(
        self,
        bundle: TranscriptBundle,
        now: float,
        received_at: float | None = None,
    ) -> Turn:
        """Deliver a transcript bundle to the worker and start the clocks.

        `received_at` is the gateway-receipt instant anchoring latency;
        `now` is bundle delivery, anchoring the worker budget. Emits the
        new-message ding exactly once.
        """
        if self.session.state != "open":
            raise SessionStateError("skill not open")
        if self._active is not None and not self._active.resolved:
            raise TurnInFlightError("turn in flight")
        turn = Turn(
            turn_id=f"{self.session.session_id}.t{len(self.session.turns):03d}",
            user_message_received_at=received_at if received_at is not None else now,
            opened_at=now,
            bundle=bundle,
        )
        self.session.turns.append(turn)
        self._active = turn
        self._deadline = now + self.cfg.worker_budget
        self._lock_until = now + self.cfg.suggestion_lock
        self._warning_at = self._deadline - self.cfg.warning_at_remaining
        self._dong_done = False
        self._unlock_done = False
        self._rng = random.Random(f"{self.seed}:{turn.turn_id}")
        self.on_cue(CueEvent("new_message_ding", turn.turn_id, now))
        if self.scheduler is not None:
            self._handles = [
                self.scheduler.call_at(self._lock_until, self._timer_fired),
                self.scheduler.call_at(self._warning_at, self._timer_fired),
                self.scheduler.call_at(self._deadline, self._timer_fired),
            ]
        return turn

    @property
    def active_turn(self) -> Turn | None:
        return self._active

    @property
    def deadline(self) -> float:
        return self._deadline

    def lock_remaining(self, now: float) -> float:
        return max(0.0, self._lock_until - now)

    def _timer_fired(self) -> None:
        if self._active is not None and not self._active.resolved:
            self.tick(self._active, self.clock.now())

    def poll(self, now: float) -> None:
        """Tick-driven entry point for wall-clock callers."""
        if self._active is not None and not self._active.resolved:
            self.tick(self._active, now)

    def tick(self, turn: Turn, now: float) -> None:
        """Advance turn timers: warning dong, suggestion unlock, deadline.

        Idempotent for a given instant; each cue fires at most once per
        turn. At or past the deadline the turn resolves by the timeout
        policy and further ticks are no-ops.
        """
        if turn is not self._active or turn.resolved or turn.abandoned:
            return
        if not self._unlock_done and now >= self._lock_until:
            self._unlock_done = True
            self.on_cue(CueEvent("suggestions_unlocked", turn.turn_id, now))
        if not self._dong_done and now >= self._warning_at:
            self._dong_done = True
            self.on_cue(CueEvent("ten_seconds_dong", turn.turn_id, now))
        if now >= self._deadline:
            self._resolve_timeout(turn, now)

    def _resolve_timeout(self, turn: Turn, now: float) -> None:
        if turn.draft.strip():
            self.resolve(turn, turn.draft, "draft_flushed_on_timeout", "timeout_draft", now)
        elif turn.suggestions:
            pick = self._rng.choice(turn.suggestions)
            self.resolve(turn, pick.text, "random_suggestion_on_timeout", "timeout_random", now)
        else:
            text = self._rng.choice(DEFAULT_RESPONSES)
            self.resolve(turn, text, "default_fallback_on_timeout", "default_button", now)

    # -- worker actions ---------------------------------------------------

    def apply_worker_action(self, turn: Turn, action: WorkerAction) -> Turn:
        """Apply one console action; returns the turn (possibly resolved).

        Raises ActionRejected subclasses for recoverable refusals (lock
        violation, empty draft, bad index) and StaleActionError when the
        turn is no longer awaiting the worker.
        """
        if turn.resolved or turn.abandoned:
            raise StaleActionError(f"turn {turn.turn_id} already settled")
        kind = action.kind
        if kind == "type_draft":
            turn.draft = action.text or ""
        elif kind == "send_draft":
            if not turn.draft.strip():
                raise ActionRejected("nothing typed yet")
            self.resolve(turn, turn.draft, "worker_sent", "typed", action.at)
        elif kind == "press_default":
            if action.index is None or not 0 <= action.index < len(DEFAULT_RESPONSES):
                raise ActionRejected(f"no default button {action.index}")
            self.resolve(turn, DEFAULT_RESPONSES[action.index], "worker_sent", "default_button", action.at)
        elif kind == "select_suggestion":
            elapsed = action.at - turn.opened_at
            if elapsed < self.cfg.suggestion_lock:
                raise SuggestionLockedError(self.cfg.suggestion_lock - elapsed)
            if action.index is None or not 0 <= action.index < len(turn.suggestions):
                raise ActionRejected(f"no suggestion {action.index}")
            self.resolve(turn, turn.suggestions[action.index].text, "worker_sent", "suggested", action.at)
        elif kind == "select_transcript":
            if action.index is None or not 0 <= action.index < turn.bundle.variant_count():
                raise ActionRejected(f"no transcript variant {action.index}")
            turn.bundle.selected_index = action.index
        else:
            raise ActionRejected(f"unknown action kind {kind!r}")
        return turn

    def add_suggestion(self, turn: Turn, suggestion: Suggestion) -> bool:
        """Attach a delivered suggestion; refused once the turn settled."""
        if turn.resolved or turn.abandoned:
            return False
        turn.suggestions.append(suggestion)
        self.on_suggestion(turn, suggestion)
        return True

    # -- resolution -------------------------------------------------------

    def resolve(
        self,
        turn: Turn,
        text: str,
        resolution: Resolution,
        kind: ResponseKind,
        now: float,
    ) -> LatencyRecord:
        """Settle the turn and freeze its latency, exactly once."""
        if turn.resolved:
            raise DoubleResolutionError(f"turn {turn.turn_id} already resolved")
        if turn.abandoned:
            raise StaleActionError(f"turn {turn.turn_id} was abandoned")
        if not text:
            raise ValueError("response text must be non-empty")
        turn.resolution = resolution
        turn.response_kind = kind
        turn.response_text = text
        turn.response_recorded_at = now
        if turn.bundle.selected_index is None:
            turn.bundle.selected_index = 0
        self._clear_timers()
        if turn is self._active:
            self._active = None
        record = LatencyRecord(turn.turn_id, turn.latency(), kind)
        self.on_resolved(turn, record)
        return record

    def _clear_timers(self) -> None:
        for handle in self._handles:
            handle.cancel()
        self._handles = []
