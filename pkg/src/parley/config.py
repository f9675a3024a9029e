"""Run configuration: flat key=value file plus flag overrides (flags win)."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields
from importlib import resources

from .model import ConfigError, DeadlineConfig, validate_config

_DATA = resources.files("parley").joinpath("data")


def data_path(name: str) -> str:
    return str(_DATA.joinpath(name))


@dataclass
class RunConfig:
    lexicon: str = field(default_factory=lambda: data_path("lexicon.txt"))
    feature_table: str = field(default_factory=lambda: data_path("features.txt"))
    letter_rules: str = field(default_factory=lambda: data_path("letter_rules.txt"))
    corpus: str = field(default_factory=lambda: data_path("corpus.txt"))
    dialogue_pairs: str = field(default_factory=lambda: data_path("dialogue_pairs.txt"))
    script: str = field(default_factory=lambda: data_path("scripts/smalltalk10.txt"))
    listen: str = "127.0.0.1:8750"
    tcp_listen: str = ""
    token: str = "parley-dev"
    seed: int = 0
    out: str = "out"
    skill_name: str = "echopal"
    worker_model: str = "button"
    noise_del: float = 0.05
    noise_sub: float = 0.05
    k: int = 3
    sample: int = 100
    times: int = 5
    max_pause: float = 1.5
    no_speech_close: bool = False
    worker_budget: float = 25.0
    suggestion_lock: float = 5.0
    warning_at_remaining: float = 10.0
    listening_window: float = 10.0
    suggester_min_interval: float = 1.0
    per_variant_quota: int = 5
    alternatives_count: int = 3

    def deadline_config(self) -> DeadlineConfig:
        return validate_config(
            DeadlineConfig(
                worker_budget=self.worker_budget,
                suggestion_lock=self.suggestion_lock,
                warning_at_remaining=self.warning_at_remaining,
                listening_window=self.listening_window,
                suggester_min_interval=self.suggester_min_interval,
                per_variant_quota=self.per_variant_quota,
                alternatives_count=self.alternatives_count,
            )
        )

    def check_paths(self) -> None:
        for name in ("lexicon", "feature_table", "letter_rules", "corpus", "dialogue_pairs"):
            path = getattr(self, name)
            if not os.path.exists(path):
                raise ConfigError(f"{name} file not found: {path}")


_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}


def load_config(path: str | None = None, overrides: dict[str, object] | None = None) -> RunConfig:
    """Build a RunConfig from an optional file and explicit overrides."""
    cfg = RunConfig()
    typed = {f.name: f.type for f in fields(RunConfig)}

    def assign(key: str, raw: object) -> None:
        key = key.replace("-", "_")
        if key not in typed:
            raise ConfigError(f"unknown config key: {key}")
        current = getattr(cfg, key)
        if isinstance(current, bool):
            if isinstance(raw, bool):
                value: object = raw
            else:
                token = str(raw).strip().lower()
                if token in _BOOL_TRUE:
                    value = True
                elif token in _BOOL_FALSE:
                    value = False
                else:
                    raise ConfigError(f"bad boolean for {key}: {raw!r}")
        elif isinstance(current, int):
            value = int(str(raw))
        elif isinstance(current, float):
            value = float(str(raw))
        else:
            value = str(raw)
        setattr(cfg, key, value)

    if path:
        if not os.path.exists(path):
            raise ConfigError(f"config file not found: {path}")
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key = value")
                key, _, value = line.partition("=")
                assign(key.strip(), value.strip())
    for key, value in (overrides or {}).items():
        if value is not None:
            assign(key, value)
    return cfg
