import pytest

from parley.model import ConfigError, DeadlineConfig, Session, TranscriptBundle, validate_config


def test_defaults_are_valid():
    cfg = DeadlineConfig()
    assert validate_config(cfg) is cfg
    assert cfg.worker_budget == 25.0
    assert cfg.suggestion_lock == 5.0
    assert cfg.warning_at_remaining == 10.0
    assert cfg.listening_window == 10.0
    assert cfg.suggester_min_interval == 1.0
    assert cfg.per_variant_quota == 5
    assert cfg.alternatives_count == 3


def test_lock_must_be_shorter_than_budget():
    cfg = DeadlineConfig(worker_budget=25.0, suggestion_lock=25.0)
    with pytest.raises(ConfigError, match="suggestion_lock must be < worker_budget"):
        validate_config(cfg)


@pytest.mark.parametrize(
    "field,value",
    [
        ("worker_budget", 0.0),
        ("suggestion_lock", -1.0),
        ("listening_window", 0.0),
        ("suggester_min_interval", 0.0),
    ],
)
def test_durations_must_be_positive(field, value):
    with pytest.raises(ConfigError, match=field):
        validate_config(DeadlineConfig(**{field: value}))


def test_quota_and_alternatives_bounds():
    with pytest.raises(ConfigError, match="per_variant_quota"):
        validate_config(DeadlineConfig(per_variant_quota=0))
    with pytest.raises(ConfigError, match="alternatives_count"):
        validate_config(DeadlineConfig(alternatives_count=-1))


def test_warning_window_inside_budget():
    with pytest.raises(ConfigError, match="warning_at_remaining"):
        validate_config(DeadlineConfig(worker_budget=8.0, warning_at_remaining=10.0, suggestion_lock=2.0))


def test_bundle_variant_indexing():
    bundle = TranscriptBundle("original text", [("alt one", 0.1), ("alt two", 0.2)])
    assert bundle.variant_count() == 3
    assert bundle.text_of(0) == "original text"
    assert bundle.text_of(2) == "alt two"


def test_session_active_turn_empty():
    assert Session("s1").active_turn() is None
