"""Composition helpers: build the relay and its resources from a RunConfig."""

from __future__ import annotations

from dataclasses import dataclass

from .clock import Clock, Scheduler
from .config import RunConfig
from .gateway import Relay
from .metrics import MetricsStore
from .phonetics import Lexicon, PhonemeInventory
from .repair import CorpusIndex, RetrievalRepairModel, load_corpus_file
from .suggest import CorpusSuggester


@dataclass
class Resources:
    lexicon: Lexicon
    inventory: PhonemeInventory
    corpus: CorpusIndex


def load_resources(cfg: RunConfig) -> Resources:
    cfg.check_paths()
    lexicon = Lexicon.from_files(cfg.lexicon, cfg.letter_rules)
    inventory = PhonemeInventory.from_file(cfg.feature_table)
    corpus = load_corpus_file(cfg.corpus, lexicon)
    return Resources(lexicon, inventory, corpus)


def build_relay(
    cfg: RunConfig,
    res: Resources,
    clock: Clock,
    scheduler: Scheduler,
    metrics: MetricsStore,
) -> Relay:
    suggester = CorpusSuggester.from_file(cfg.dialogue_pairs, res.lexicon)
    return Relay(
        cfg.deadline_config(),
        res.lexicon,
        RetrievalRepairModel(res.corpus),
        suggester,
        clock,
        scheduler,
        metrics,
        seed=cfg.seed,
        skill_name=cfg.skill_name,
    )
