import pytest

from parley.clock import Scheduler, VirtualClock
from parley.gateway import Relay
from parley.metrics import MetricsStore
from parley.model import DeadlineConfig
from parley.protocol import MessageStream
from parley.repair import RetrievalRepairModel, build_corpus_index
from parley.suggest import StaticSuggester

SENTENCES = [
    "do you like coffee",
    "do you like tea",
    "the weather is cold today",
    "how many bones are in my hand",
    "tell me a funny joke",
]


@pytest.fixture()
def rig(lexicon):
    clock = VirtualClock()
    scheduler = Scheduler(clock)
    metrics = MetricsStore()
    index = build_corpus_index(SENTENCES, lexicon)
    relay = Relay(
        DeadlineConfig(),
        lexicon,
        RetrievalRepairModel(index),
        StaticSuggester(),
        clock,
        scheduler,
        metrics,
        seed=7,
    )
    device_stream = MessageStream("device", keep=True)
    console = relay.connect_console(MessageStream("console", keep=True))
    device = relay.connect_device(device_stream)
    return relay, device, device_stream, console, clock, scheduler, metrics


def open_skill(device):
    device.say("alexa, open echopal")


class TestPhrases:
    def test_open_phrase(self, rig):
        relay, device, device_stream, *_ = rig
        open_skill(device)
        assert [m["type"] for m in device_stream.messages] == ["skill_open"]
        assert relay.sessions[device.session_id].session.state == "open"

    def test_wake_word_optional(self, rig):
        relay, device, device_stream, *_ = rig
        device.say("Open EchoPal")
        assert device_stream.messages[0]["type"] == "skill_open"

    def test_stop_closes(self, rig):
        relay, device, device_stream, *_ = rig
        open_skill(device)
        device.say("stop")
        assert device_stream.messages[-1]["type"] == "skill_close"
        assert relay.sessions[device.session_id].session.state == "closed"

    def test_cancel_closes(self, rig):
        relay, device, device_stream, *_ = rig
        open_skill(device)
        device.say("cancel")
        assert device_stream.messages[-1]["type"] == "skill_close"

    def test_utterance_while_closed_is_error(self, rig):
        relay, device, device_stream, *_ = rig
        device.say("how many bones are in my hand")
        assert device_stream.messages[-1]["type"] == "error"
        assert device_stream.messages[-1]["payload"]["message"] == "skill not open"

    def test_utterance_while_open_becomes_turn(self, rig):
        relay, device, _, console, *_ = rig
        open_skill(device)
        device.say("how many bones are in my hand")
        ctx = relay.sessions[device.session_id]
        assert ctx.engine.active_turn is not None
        assert ctx.engine.active_turn.bundle.original == "how many bones are in my hand"
        bundles = [m for m in console.messages if m["type"] == "transcript_bundle"]
        assert len(bundles) == 1

    def test_reopen_after_close_starts_new_session(self, rig):
        relay, device, device_stream, *_ = rig
        open_skill(device)
        first = device.session_id
        device.say("stop")
        open_skill(device)
        assert device.session_id != first


class TestTurnFlow:
    def test_bundle_precedes_suggestions(self, rig):
        relay, device, _, console, clock, scheduler, _ = rig
        open_skill(device)
        device.say("do you like coffee")
        scheduler.run_until_idle(max_time=4.0)
        types = [m["type"] for m in console.messages if m["turn_id"]]
        assert "suggestion" in types
        assert types.index("transcript_bundle") < types.index("suggestion")

    def test_one_system_response_per_turn(self, rig):
        relay, device, device_stream, console, clock, scheduler, metrics = rig
        open_skill(device)
        device.say("do you like coffee")
        turn_id = relay.sessions[device.session_id].engine.active_turn.turn_id
        scheduler.run_until_idle(max_time=8.0)
        relay.handle_worker_action(
            {"type": "worker_action", "session_id": device.session_id, "turn_id": turn_id,
             "payload": {"kind": "press_default", "index": 0}},
            console,
        )
        scheduler.run_until_idle()
        responses = [m for m in device_stream.messages if m["type"] == "system_response"]
        assert len(responses) == 1
        assert responses[0]["payload"]["text"] == "Yes, I agree."
        mirrored = [m for m in console.messages if m["type"] == "system_response"]
        assert mirrored[0]["payload"]["text"] == responses[0]["payload"]["text"]
        assert len(metrics.records()) == 1

    def test_lock_rejection_carries_remaining(self, rig):
        relay, device, _, console, clock, scheduler, _ = rig
        open_skill(device)
        device.say("do you like coffee")
        turn_id = relay.sessions[device.session_id].engine.active_turn.turn_id
        scheduler.run_until_idle(max_time=2.0)
        relay.handle_worker_action(
            {"type": "worker_action", "session_id": device.session_id, "turn_id": turn_id,
             "payload": {"kind": "select_suggestion", "index": 0}},
            console,
        )
        errors = [m for m in console.messages if m["type"] == "error"]
        assert errors
        assert errors[-1]["payload"]["message"] == "suggestions locked"
        assert errors[-1]["payload"]["remaining_lock_ms"] == 3000

    def test_close_mid_turn_abandons(self, rig):
        relay, device, device_stream, console, clock, scheduler, metrics = rig
        open_skill(device)
        device.say("do you like coffee")
        ctx = relay.sessions[device.session_id]
        turn = ctx.engine.active_turn
        scheduler.run_until_idle(max_time=3.0)
        suggestions_before = len(turn.suggestions)
        device.say("stop")
        scheduler.run_until_idle()
        assert turn.abandoned and not turn.resolved
        assert len(turn.suggestions) == suggestions_before
        assert metrics.records() == []
        closes = [m for m in device_stream.messages if m["type"] == "skill_close"]
        assert closes[0]["payload"]["abandoned_turn"] == turn.turn_id
        responses = [m for m in device_stream.messages if m["type"] == "system_response"]
        assert responses == []

    def test_select_transcript_recorded_in_response(self, rig):
        relay, device, device_stream, console, clock, scheduler, _ = rig
        open_skill(device)
        device.say("do you like tea")
        turn_id = relay.sessions[device.session_id].engine.active_turn.turn_id
        relay.handle_worker_action(
            {"type": "worker_action", "session_id": device.session_id, "turn_id": turn_id,
             "payload": {"kind": "select_transcript", "index": 1}},
            console,
        )
        relay.handle_worker_action(
            {"type": "worker_action", "session_id": device.session_id, "turn_id": turn_id,
             "payload": {"kind": "press_default", "index": 2}},
            console,
        )
        response = [m for m in device_stream.messages if m["type"] == "system_response"][0]
        assert response["payload"]["selected_transcript"] == 1

    def test_unknown_turn_rejected(self, rig):
        relay, device, _, console, *_ = rig
        open_skill(device)
        relay.handle_worker_action(
            {"type": "worker_action", "session_id": device.session_id, "turn_id": "nope",
             "payload": {"kind": "press_default", "index": 0}},
            console,
        )
        assert console.messages[-1]["payload"]["message"] == "unknown turn"

    def test_turn_in_flight_error(self, rig):
        relay, device, device_stream, *_ = rig
        open_skill(device)
        device.say("do you like coffee")
        device.say("do you like tea")
        assert device_stream.messages[-1]["payload"]["message"] == "turn in flight"


class TestSequencing:
    def test_per_connection_seq_strictly_increasing(self, rig):
        relay, device, device_stream, console, clock, scheduler, _ = rig
        open_skill(device)
        device.say("do you like coffee")
        scheduler.run_until_idle()
        for stream in (device_stream, console, relay.event_log):
            seqs = [m["seq"] for m in stream.messages]
            assert seqs == sorted(set(seqs))
            assert seqs == list(range(len(seqs)))

    def test_event_log_sees_inbound_and_outbound(self, rig):
        relay, device, *_ = rig
        open_skill(device)
        types = [m["type"] for m in relay.event_log.messages]
        assert types[0] == "user_utterance"  # raw device line
        assert "skill_open" in types
