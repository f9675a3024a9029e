"""Shared domain vocabulary: sessions, turns, bundles, actions, records.

Plain value types only. No I/O, no clocks, no shared mutation; instances
are safe to pass between execution contexts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

ResponseKind = Literal["typed", "default_button", "suggested", "timeout_random", "timeout_draft"]
Resolution = Literal[
    "worker_sent",
    "draft_flushed_on_timeout",
    "random_suggestion_on_timeout",
    "default_fallback_on_timeout",
]
SessionState = Literal["idle", "open", "closed"]
ActionKind = Literal["type_draft", "send_draft", "press_default", "select_suggestion", "select_transcript"]
CueKind = Literal["new_message_ding", "ten_seconds_dong", "suggestions_unlocked"]


class ConfigError(ValueError):
    """A deadline-configuration invariant does not hold."""


@dataclass(frozen=True)
class DeadlineConfig:
    """Per-turn timing budget and suggestion quotas.

    Durations are seconds. Defaults reproduce the studied configuration:
    25 s worker budget, 5 s suggestion lock, warning cue at 10 s remaining,
    ~10 s device listening window, one suggester request per second, and
    five suggestions for each of (original + 3 alternative) transcripts.
    """

    worker_budget: float = 25.0
    suggestion_lock: float = 5.0
    warning_at_remaining: float = 10.0
    listening_window: float = 10.0
    suggester_min_interval: float = 1.0
    per_variant_quota: int = 5
    alternatives_count: int = 3


def validate_config(cfg: DeadlineConfig) -> DeadlineConfig:
    """Return cfg unchanged if every invariant holds.

    Raises ConfigError naming the first violated invariant, checked in
    declaration order: positivity of each duration, lock < budget,
    warning < budget, alternatives_count >= 0, per_variant_quota >= 1.
    """
    for name in ("worker_budget", "suggestion_lock", "warning_at_remaining",
                 "listening_window", "suggester_min_interval"):
        if getattr(cfg, name) <= 0:
            raise ConfigError(f"{name} must be > 0")
    if cfg.suggestion_lock >= cfg.worker_budget:
        raise ConfigError("suggestion_lock must be < worker_budget")
    if cfg.warning_at_remaining >= cfg.worker_budget:
        raise ConfigError("warning_at_remaining must be < worker_budget")
    if cfg.alternatives_count < 0:
        raise ConfigError("alternatives_count must be >= 0")
    if cfg.per_variant_quota < 1:
        raise ConfigError("per_variant_quota must be >= 1")
    return cfg


@dataclass
class TranscriptBundle:
    """Original transcript plus ranked repair alternatives.

    `alternatives` holds (text, distance) with distances nondecreasing in
    [0, 1]. `selected_index` uses 0 for the original and i for
    alternatives[i-1]; it stays None until the worker clicks a transcript
    or the turn resolves (resolution defaults it to the original).
    """

    original: str
    alternatives: list[tuple[str, float]] = field(default_factory=list)
    selected_index: int | None = None

    def variant_count(self) -> int:
        return 1 + len(self.alternatives)

    def text_of(self, index: int) -> str:
        if index == 0:
            return self.original
        return self.alternatives[index - 1][0]


@dataclass(frozen=True)
class Suggestion:
    """One automatic candidate response, tagged with its transcript variant."""

    text: str
    variant_index: int
    received_at: float
    source: str


@dataclass(frozen=True)
class WorkerAction:
    """A console action. `index` targets a default button, suggestion, or
    transcript variant depending on `kind`; `text` carries the draft for
    type_draft."""

    kind: ActionKind
    at: float
    index: int | None = None
    text: str | None = None


@dataclass(frozen=True)
class CueEvent:
    kind: CueKind
    turn_id: str
    at: float


@dataclass(frozen=True)
class LatencyRecord:
    """Per-turn timing fact: user-message receipt to response receipt."""

    turn_id: str
    latency: float
    response_kind: ResponseKind


@dataclass
class Turn:
    """One user utterance and the single response that resolves it.

    Two clock origins are kept: `user_message_received_at` anchors the
    end-to-end latency, while `opened_at` (bundle delivery to the worker)
    anchors the worker budget. Live transcript repair makes them differ;
    on the virtual clock they coincide.
    """

    turn_id: str
    user_message_received_at: float
    opened_at: float
    bundle: TranscriptBundle
    suggestions: list[Suggestion] = field(default_factory=list)
    draft: str = ""
    resolution: Resolution | None = None
    response_kind: ResponseKind | None = None
    response_text: str = ""
    response_recorded_at: float | None = None
    abandoned: bool = False

    @property
    def resolved(self) -> bool:
        return self.resolution is not None

    def latency(self) -> float:
        if self.response_recorded_at is None:
            raise ValueError("turn not resolved")
        return self.response_recorded_at - self.user_message_received_at


@dataclass
class Session:
    """Per-conversation state. Transitions are exactly idle -> open -> closed."""

    session_id: str
    state: SessionState = "idle"
    turns: list[Turn] = field(default_factory=list)
    opened_at: float | None = None
    closed_at: float | None = None

    def active_turn(self) -> Turn | None:
        """The single non-terminal turn, if any."""
        for turn in reversed(self.turns):
            if not turn.resolved and not turn.abandoned:
                return turn
        return None
