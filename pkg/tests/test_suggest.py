import json
import logging
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parley.clock import Scheduler, VirtualClock
from parley.model import DeadlineConfig, TranscriptBundle
from parley.suggest import (
    CorpusSuggester,
    HttpSuggester,
    PacedLimiter,
    StaticSuggester,
    default_responses,
    plan_requests,
    run_schedule,
)


def bundle_with(n_alts: int) -> TranscriptBundle:
    return TranscriptBundle("original text", [(f"alt {i}", 0.1 * (i + 1)) for i in range(n_alts)])


class TestDefaults:
    def test_exact_texts_in_order(self):
        assert default_responses() == [
            "Yes, I agree.",
            "No, I don't think so.",
            "Could you repeat that again?",
            "I am thinking about it. Could you provide more information?",
        ]

    def test_always_four(self):
        assert len(default_responses()) == 4


class TestPlanRequests:
    def test_three_alts_quota_five(self):
        plan = plan_requests(bundle_with(3), DeadlineConfig())
        assert len(plan) == 20
        assert [r.variant_index for r in plan[:3]] == [0, 0, 0]
        # documented ordering: original 1-3, then one slot per alternative
        # per round with the remaining original slots interleaved
        expected = [
            (0, 1), (0, 2), (0, 3),
            (1, 1), (2, 1), (3, 1), (0, 4),
            (1, 2), (2, 2), (3, 2), (0, 5),
            (1, 3), (2, 3), (3, 3),
            (1, 4), (2, 4), (3, 4),
            (1, 5), (2, 5), (3, 5),
        ]
        assert [(r.variant_index, r.slot) for r in plan] == expected
        assert [r.scheduled_order for r in plan] == list(range(20))

    def test_no_alternatives(self):
        plan = plan_requests(bundle_with(0), DeadlineConfig())
        assert [(r.variant_index, r.slot) for r in plan] == [(0, s) for s in range(1, 6)]

    def test_quota_one_single_alternative(self):
        cfg = DeadlineConfig(per_variant_quota=1)
        plan = plan_requests(bundle_with(1), cfg)
        assert [(r.variant_index, r.slot) for r in plan] == [(0, 1), (1, 1)]

    @given(st.integers(0, 4), st.integers(1, 7))
    @settings(max_examples=60, deadline=None)
    def test_each_pair_exactly_once(self, n_alts, quota):
        cfg = DeadlineConfig(per_variant_quota=quota)
        plan = plan_requests(bundle_with(n_alts), cfg)
        pairs = [(r.variant_index, r.slot) for r in plan]
        assert len(pairs) == (n_alts + 1) * quota
        assert len(set(pairs)) == len(pairs)
        assert set(pairs) == {(v, s) for v in range(n_alts + 1) for s in range(1, quota + 1)}


class _ListSuggester:
    def __init__(self, fail_on: set[int] | None = None):
        self.name = "scripted"
        self.timeout = 3.0
        self.calls = 0
        self.fail_on = fail_on or set()

    def request(self, utterance, variant_index, turn_id):
        self.calls += 1
        if self.calls in self.fail_on:
            raise RuntimeError("flaky")
        return f"reply {self.calls} to {utterance[:12]}"


def drive(plan, suggester, deadline, cfg, start=0.0):
    clock = VirtualClock(start)
    scheduler = Scheduler(clock)
    run = run_schedule(plan, ["original"] + [f"alt {i}" for i in range(9)], suggester, deadline, cfg, scheduler)
    scheduler.run_until_idle()
    return run


class TestRunSchedule:
    def test_full_plan_paced_within_budget(self):
        cfg = DeadlineConfig()
        plan = plan_requests(bundle_with(3), cfg)
        run = drive(plan, _ListSuggester(), deadline=25.0, cfg=cfg)
        assert len(run.issue_times) == 20
        assert len(run.suggestions) == 20
        gaps = [b - a for a, b in zip(run.issue_times, run.issue_times[1:])]
        assert all(gap >= cfg.suggester_min_interval for gap in gaps)
        assert run.issue_times[-1] - run.issue_times[0] >= 19.0

    def test_deadline_already_passed(self):
        cfg = DeadlineConfig()
        plan = plan_requests(bundle_with(3), cfg)
        run = drive(plan, _ListSuggester(), deadline=10.0, cfg=cfg, start=10.0)
        assert run.issue_times == []
        assert run.suggestions == []

    def test_failures_skipped_not_retried(self):
        cfg = DeadlineConfig(per_variant_quota=5)
        plan = plan_requests(bundle_with(0), cfg)
        suggester = _ListSuggester(fail_on={2})
        run = drive(plan, suggester, deadline=25.0, cfg=cfg)
        assert suggester.calls == 5
        assert len(run.suggestions) == 4

    def test_missing_suggester_yields_empty_stream(self, caplog):
        cfg = DeadlineConfig()
        plan = plan_requests(bundle_with(3), cfg)
        with caplog.at_level(logging.WARNING):
            run = drive(plan, None, deadline=25.0, cfg=cfg)
        assert run.suggestions == []
        assert any("no suggester" in r.message for r in caplog.records)

    def test_stop_suppresses_emission(self):
        cfg = DeadlineConfig()
        clock = VirtualClock()
        scheduler = Scheduler(clock)
        plan = plan_requests(bundle_with(0), cfg)
        run = run_schedule(plan, ["original"], _ListSuggester(), 25.0, cfg, scheduler)
        scheduler.run_until_idle(max_time=2.5)
        run.stop()
        before = len(run.suggestions)
        scheduler.run_until_idle()
        assert len(run.suggestions) == before

    def test_issuing_stops_at_deadline(self):
        cfg = DeadlineConfig()
        plan = plan_requests(bundle_with(3), cfg)
        run = drive(plan, _ListSuggester(), deadline=6.0, cfg=cfg)
        assert all(t < 6.0 for t in run.issue_times)
        assert len(run.issue_times) == 6  # issues at 0..5

    def test_shared_limiter_paces_across_runs(self):
        cfg = DeadlineConfig()
        clock = VirtualClock()
        scheduler = Scheduler(clock)
        limiter = PacedLimiter(cfg.suggester_min_interval)
        plan_a = plan_requests(bundle_with(0), cfg)
        plan_b = plan_requests(bundle_with(0), cfg)
        run_a = run_schedule(plan_a, ["original"], _ListSuggester(), 60.0, cfg, scheduler, limiter=limiter, turn_id="a")
        run_b = run_schedule(plan_b, ["original"], _ListSuggester(), 60.0, cfg, scheduler, limiter=limiter, turn_id="b")
        scheduler.run_until_idle()
        merged = sorted(run_a.issue_times + run_b.issue_times)
        assert len(merged) == 10
        gaps = [b - a for a, b in zip(merged, merged[1:])]
        assert all(gap >= cfg.suggester_min_interval for gap in gaps)


@pytest.fixture()
def suggester(lexicon):
    pairs = [
        ("hello", "Hi there, how are you doing today?"),
        ("do you like coffee", "I do, one cup every morning."),
        ("tell me a joke", "Why did the bicycle fall over? It was two tired."),
    ]
    return CorpusSuggester(pairs, lexicon)


class TestCorpusSuggester:

    def test_exact_prompt_returns_its_reply(self, suggester):
        assert suggester.request("do you like coffee", 0, "t0") == "I do, one cup every morning."

    def test_empty_utterance_ties_to_first_pair(self, suggester):
        assert suggester.request("", 0, "t0") == "Hi there, how are you doing today?"

    def test_nearest_prompt_scan_oracle(self, lexicon):
        pairs = [(f"my number is {i}", f"reply {i}") for i in range(20)]
        pairs += [("do you like tea", "tea reply"), ("do you like coffee", "coffee reply")]
        suggester = CorpusSuggester(pairs, lexicon)
        # nearest prompt to a coffee-flavored utterance, by brute scan
        from parley.phonetics import graphemes_to_phonemes, normalized_levenshtein
        from parley.repair import normalize_text

        query = graphemes_to_phonemes(normalize_text("do you like coffees"), lexicon)
        best = min(
            range(len(pairs)),
            key=lambda i: (
                normalized_levenshtein(
                    query, graphemes_to_phonemes(normalize_text(pairs[i][0]), lexicon)
                ),
                i,
            ),
        )
        assert suggester.request("do you like coffees", 0, "t0") == pairs[best][1]

    def test_repeated_slots_walk_the_ranking(self, lexicon):
        pairs = [
            ("do you like coffee", "coffee reply"),
            ("do you like tea", "tea reply"),
            ("do you like pizza", "pizza reply"),
        ]
        s = CorpusSuggester(pairs, lexicon)
        got = [s.request("do you like coffee", 0, "t1") for _ in range(4)]
        assert got[:3] == ["coffee reply", "tea reply", "pizza reply"]
        assert got[3] == "pizza reply"  # ranking exhausted, stays at the tail
        # a different variant or turn starts fresh
        assert s.request("do you like coffee", 1, "t1") == "coffee reply"
        assert s.request("do you like coffee", 0, "t2") == "coffee reply"

    def test_empty_corpus_rejected(self, lexicon):
        with pytest.raises(ValueError, match="empty"):
            CorpusSuggester([], lexicon)


def test_static_suggester_cycles_deterministically():
    s = StaticSuggester()
    first = [s.request("x", 0, "t") for _ in range(len(StaticSuggester.POOL))]
    assert first == list(StaticSuggester.POOL)


class _SuggestHandler(BaseHTTPRequestHandler):
    def do_POST(self):
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        if self.path == "/suggest":
            payload = json.dumps({"text": f"echo: {body['utterance']}"}).encode()
            self.send_response(200)
            self.send_header("Content-Type", "application/json")
            self.end_headers()
            self.wfile.write(payload)
        else:
            self.send_response(500)
            self.end_headers()

    def log_message(self, *args):
        pass


@pytest.fixture()
def http_server():
    server = HTTPServer(("127.0.0.1", 0), _SuggestHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}"
    server.shutdown()


class TestHttpSuggester:
    def test_round_trip(self, http_server):
        s = HttpSuggester(f"{http_server}/suggest", timeout=2.0)
        assert s.request("hello there", 0, "t0") == "echo: hello there"

    def test_failure_is_skipped_as_none(self, http_server):
        s = HttpSuggester(f"{http_server}/broken", timeout=2.0)
        assert s.request("hello there", 0, "t0") is None

    def test_unreachable_is_none(self):
        s = HttpSuggester("http://127.0.0.1:1/suggest", timeout=0.5)
        assert s.request("hello", 0, "t0") is None
