"""Relay core: routes device lines and console actions through sessions.

The relay owns session lifecycle (the open/close phrases), transcript
repair fan-out, suggestion scheduling, and response dispatch. It is
transport-agnostic: device and console connections are MessageStreams,
and the network server in `server.py` adapts WebSocket / TCP clients onto
them. All inbound events for a session funnel through the single
scheduler context, which serializes them.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

from .clock import Clock, Scheduler
from .engine import ActionRejected, SessionEngine, StaleActionError, SuggestionLockedError, TurnInFlightError
from .metrics import MetricsStore
from .model import DeadlineConfig, Session, Suggestion, Turn, WorkerAction
from .phonetics import Lexicon
from .protocol import EventLog, MessageStream, envelope, millis
from .repair import RepairModel, normalize_text, propose_bundle
from .suggest import PacedLimiter, ScheduleRun, Suggester, plan_requests

log = logging.getLogger(__name__)

WAKE_WORD = "alexa"
CLOSE_PHRASES = ("cancel", "stop")


class SkillNotOpenError(RuntimeError):
    pass


@dataclass
class _SessionCtx:
    session: Session
    engine: SessionEngine
    device: "DeviceEndpoint"
    run: ScheduleRun | None = None
    turn_by_id: dict[str, Turn] = field(default_factory=dict)


class DeviceEndpoint:
    """One connected device: at most one live session at a time."""

    def __init__(self, relay: "Relay", stream: MessageStream):
        self.relay = relay
        self.stream = stream
        self.session_id: str | None = None

    def say(self, text: str) -> None:
        self.relay.handle_device_line(self, text)


class Relay:
    """Wires repair, suggestion pacing, and the session engines together."""

    def __init__(
        self,
        cfg: DeadlineConfig,
        lex: Lexicon,
        repair_model: RepairModel,
        suggester: Suggester | None,
        clock: Clock,
        scheduler: Scheduler,
        metrics: MetricsStore,
        seed: int | str = 0,
        skill_name: str = "echopal",
    ):
        self.cfg = cfg
        self.lex = lex
        self.repair_model = repair_model
        self.suggester = suggester
        self.clock = clock
        self.scheduler = scheduler
        self.metrics = metrics
        self.seed = seed
        self.skill_name = skill_name
        self.event_log = EventLog()
        self.consoles: list[MessageStream] = []
        self.sessions: dict[str, _SessionCtx] = {}
        self._session_counter = 0
        self._limiters: dict[str, PacedLimiter] = {}

    # -- connections -------------------------------------------------------

    def connect_device(self, stream: MessageStream) -> DeviceEndpoint:
        return DeviceEndpoint(self, stream)

    def connect_console(self, stream: MessageStream) -> MessageStream:
        self.consoles.append(stream)
        return stream

    def disconnect_console(self, stream: MessageStream) -> None:
        if stream in self.consoles:
            self.consoles.remove(stream)

    # -- emission ----------------------------------------------------------

    def _emit(
        self,
        type_: str,
        session_id: str | None,
        turn_id: str | None,
        payload: dict[str, Any],
        to_device: DeviceEndpoint | None = None,
        to_consoles: bool = False,
    ) -> None:
        base = envelope(type_, millis(self.clock.now()), session_id, turn_id, payload)
        self.event_log.deliver(base)
        if to_device is not None:
            to_device.stream.deliver(base)
        if to_consoles:
            for console in self.consoles:
                console.deliver(base)

    def _log_inbound(self, type_: str, session_id: str | None, turn_id: str | None, payload: dict[str, Any]) -> None:
        base = envelope(type_, millis(self.clock.now()), session_id, turn_id, payload)
        self.event_log.deliver(base)

    # -- device path ---------------------------------------------------------

    def handle_device_line(self, device: DeviceEndpoint, text: str) -> None:
        """Route one transcribed device utterance.

        After wake-word stripping: the open phrase starts a session, a
        bare close phrase ends it, anything else while open becomes a
        user turn. Utterances without an open session get an error back.
        """
        now = self.clock.now()
        ctx = self.sessions.get(device.session_id) if device.session_id else None
        open_ = ctx is not None and ctx.session.state == "open"
        self._log_inbound(
            "user_utterance",
            device.session_id if open_ else None,
            None,
            {"text": text, "raw": True},
        )
        phrase = normalize_text(text)
        tokens = phrase.split()
        if tokens and tokens[0] == WAKE_WORD:
            tokens = tokens[1:]
        phrase = " ".join(tokens)

        if phrase == f"open {self.skill_name}" and not open_:
            self._open_session(device, now)
            return
        if phrase in CLOSE_PHRASES:
            if not open_:
                self._emit("error", None, None, {"message": "skill not open"}, to_device=device)
                return
            self._close_session(ctx, now, reason="device")
            return
        if not open_:
            self._emit("error", None, None, {"message": "skill not open"}, to_device=device)
            return
        self._start_turn(ctx, text, now)

    def device_timeout_close(self, device: DeviceEndpoint) -> None:
        """Device-initiated close: nothing heard in the listening window."""
        ctx = self.sessions.get(device.session_id) if device.session_id else None
        if ctx is None or ctx.session.state != "open":
            return
        self._close_session(ctx, self.clock.now(), reason="no_speech")

    def _open_session(self, device: DeviceEndpoint, now: float) -> None:
        self._session_counter += 1
        session = Session(session_id=f"s{self._session_counter:03d}")
        engine = SessionEngine(
            session,
            self.cfg,
            self.clock,
            self.scheduler,
            seed=f"{self.seed}:{session.session_id}",
            on_cue=lambda cue: self._on_cue(session.session_id, cue),
            on_resolved=lambda turn, rec: self._on_resolved(session.session_id, turn, rec),
            on_suggestion=lambda turn, s: self._on_suggestion(session.session_id, turn, s),
        )
        engine.open_session(now)
        ctx = _SessionCtx(session=session, engine=engine, device=device)
        self.sessions[session.session_id] = ctx
        device.session_id = session.session_id
        self._emit("skill_open", session.session_id, None, {}, to_device=device, to_consoles=True)

    def _close_session(self, ctx: _SessionCtx, now: float, reason: str) -> None:
        if ctx.run is not None:
            ctx.run.stop()
        abandoned = ctx.engine.close_session(now)
        payload: dict[str, Any] = {"reason": reason}
        if abandoned is not None:
            payload["abandoned_turn"] = abandoned.turn_id
        self._emit("skill_close", ctx.session.session_id, None, payload, to_device=ctx.device, to_consoles=True)

    def _start_turn(self, ctx: _SessionCtx, text: str, received_at: float) -> None:
        bundle = propose_bundle(text, self.repair_model, self.lex, self.cfg)
        try:
            turn = ctx.engine.open_turn(bundle, now=self.clock.now(), received_at=received_at)
        except TurnInFlightError:
            self._emit(
                "error",
                ctx.session.session_id,
                None,
                {"message": "turn in flight"},
                to_device=ctx.device,
            )
            return
        ctx.turn_by_id[turn.turn_id] = turn
        self._emit(
            "transcript_bundle",
            ctx.session.session_id,
            turn.turn_id,
            {
                "original": bundle.original,
                "alternatives": [{"text": t, "distance": d} for t, d in bundle.alternatives],
            },
            to_consoles=True,
        )
        plan = plan_requests(bundle, self.cfg)
        variant_texts = [bundle.original] + [t for t, _ in bundle.alternatives]
        limiter = self._limiter_for(self.suggester)
        ctx.run = ScheduleRun(
            plan,
            variant_texts,
            self.suggester,
            ctx.engine.deadline,
            self.cfg,
            self.scheduler,
            limiter,
            turn.turn_id,
            on_suggestion=lambda s, t=turn, e=ctx.engine: e.add_suggestion(t, s),
        ).start()

    def _limiter_for(self, suggester: Suggester | None) -> PacedLimiter:
        # Pacing is global per suggester name: one external quota shared
        # by every session in the process.
        name = suggester.name if suggester is not None else "<none>"
        limiter = self._limiters.get(name)
        if limiter is None:
            limiter = PacedLimiter(self.cfg.suggester_min_interval)
            self._limiters[name] = limiter
        return limiter

    # -- console path --------------------------------------------------------

    def handle_worker_action(self, msg: dict[str, Any], console: MessageStream | None = None) -> None:
        """Apply a console worker_action message; rejections echo back."""
        now = self.clock.now()
        session_id = msg.get("session_id")
        turn_id = msg.get("turn_id")
        payload = msg.get("payload") or {}
        self._log_inbound("worker_action", session_id, turn_id, payload)
        ctx = self.sessions.get(session_id or "")

        def reject(message: str, **extra: Any) -> None:
            base = envelope(
                "error", millis(self.clock.now()), session_id, turn_id, {"message": message, **extra}
            )
            self.event_log.deliver(base)
            if console is not None:
                console.deliver(base)

        if ctx is None or ctx.session.state != "open":
            reject("skill not open")
            return
        turn = ctx.turn_by_id.get(turn_id or "")
        if turn is None:
            reject("unknown turn")
            return
        action = WorkerAction(
            kind=payload.get("kind", ""),
            at=now,
            index=payload.get("index"),
            text=payload.get("text"),
        )
        try:
            ctx.engine.apply_worker_action(turn, action)
        except SuggestionLockedError as exc:
            reject("suggestions locked", remaining_lock_ms=millis(exc.remaining))
        except StaleActionError:
            reject("stale action: turn already settled")
        except ActionRejected as exc:
            reject(str(exc))

    # -- engine callbacks ------------------------------------------------------

    def _on_cue(self, session_id: str, cue) -> None:
        self._emit("cue", session_id, cue.turn_id, {"kind": cue.kind}, to_consoles=True)

    def _on_suggestion(self, session_id: str, turn: Turn, suggestion: Suggestion) -> None:
        self._emit(
            "suggestion",
            session_id,
            turn.turn_id,
            {
                "text": suggestion.text,
                "variant_index": suggestion.variant_index,
                "source": suggestion.source,
                "button_index": len(turn.suggestions) - 1,
            },
            to_consoles=True,
        )

    def _on_resolved(self, session_id: str, turn: Turn, record) -> None:
        ctx = self.sessions[session_id]
        if ctx.run is not None:
            ctx.run.stop()
            ctx.run = None
        self.metrics.record(record)
        self.dispatch_response(ctx, turn)

    def dispatch_response(self, ctx: _SessionCtx, turn: Turn) -> None:
        """Send the single system_response for a resolved turn to the
        device and mirror it to every console."""
        self._emit(
            "system_response",
            ctx.session.session_id,
            turn.turn_id,
            {
                "text": turn.response_text,
                "resolution": turn.resolution,
                "response_kind": turn.response_kind,
                "latency_ms": millis(turn.latency()),
                "worker_ms": millis((turn.response_recorded_at or 0.0) - turn.opened_at),
                "selected_transcript": turn.bundle.selected_index,
            },
            to_device=ctx.device,
            to_consoles=True,
        )
