"""Transcript repair: retrieval of acoustically similar sentences, plus the
normalization and phoneme-noise pipeline used to build training pairs.

Retrieval is a linear scan over the corpus in phoneme space. Distances for
a whole corpus are computed with a vectorized DP (one numpy row sweep per
query phoneme); the scalar `normalized_levenshtein` in `phonetics` is the
reference definition and the two must agree exactly. Corpora are capped at
50,000 sentences: the scan is O(N * m^2) per query and there is no offline
index.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Protocol

import numpy as np

from .model import DeadlineConfig, TranscriptBundle
from .phonetics import Lexicon, PhonemeInventory, graphemes_to_phonemes

MAX_CORPUS_SENTENCES = 50_000

_UNITS = {
    "zero": 0, "one": 1, "two": 2, "three": 3, "four": 4,
    "five": 5, "six": 6, "seven": 7, "eight": 8, "nine": 9,
}
_TEENS = {
    "ten": 10, "eleven": 11, "twelve": 12, "thirteen": 13, "fourteen": 14,
    "fifteen": 15, "sixteen": 16, "seventeen": 17, "eighteen": 18, "nineteen": 19,
}
_TENS = {
    "twenty": 20, "thirty": 30, "forty": 40, "fifty": 50,
    "sixty": 60, "seventy": 70, "eighty": 80, "ninety": 90,
}
_NUMBER_WORDS = set(_UNITS) | set(_TEENS) | set(_TENS) | {"hundred", "thousand"}

_NON_ALNUM = re.compile(r"[^a-z0-9\s]")


def _parse_number_run(tokens: list[str], start: int) -> tuple[int, int]:
    """Parse one spoken number starting at tokens[start].

    Returns (value, tokens_consumed). Grammar, greedy left to right:
    a group is [tens][unit] | teen | unit, optionally scaled by
    "hundred"; one "thousand" may join a hundreds group to the final
    group; "and" is consumed only directly after a scale word and only
    when a number word follows. Any token that cannot legally continue
    the current number ends the run, so "five and six" or "twenty
    eleven" split into separate numbers. Values stay below 1,000,000.
    """
    total = 0
    current = 0
    prev = ""  # one of "", unit, teen, tens, hundred, thousand
    used_thousand = False
    has_hundred = False
    i = start
    while i < len(tokens):
        tok = tokens[i]
        if tok in _UNITS:
            if prev in ("unit", "teen"):
                break
            if tok == "zero" and prev != "":
                break
            current += _UNITS[tok]
            prev = "unit"
            if tok == "zero":
                i += 1
                break
        elif tok in _TEENS:
            if prev in ("unit", "teen", "tens"):
                break
            current += _TEENS[tok]
            prev = "teen"
        elif tok in _TENS:
            if prev in ("unit", "teen", "tens"):
                break
            current += _TENS[tok]
            prev = "tens"
        elif tok == "hundred":
            if has_hundred or prev == "thousand" or current > 99:
                break
            current = (current or 1) * 100
            prev = "hundred"
            has_hundred = True
        elif tok == "thousand":
            if used_thousand or current > 999:
                break
            total += (current or 1) * 1000
            current = 0
            prev = "thousand"
            used_thousand = True
            has_hundred = False
        elif tok == "and" and prev in ("hundred", "thousand"):
            nxt = tokens[i + 1] if i + 1 < len(tokens) else ""
            if nxt in _UNITS or nxt in _TEENS or nxt in _TENS:
                i += 1
                continue
            break
        else:
            break
        i += 1
    return total + current, i - start


def normalize_text(s: str) -> str:
    """Lowercase, strip punctuation, spell numbers as digits, collapse space.

    Number words up to 999,999 become digit strings ("twenty one" ->
    "21"); existing digits pass through. Apostrophes are dropped in place
    ("don't" -> "dont"); all other punctuation becomes a space.
    Idempotent: output tokens are plain lowercase words and digit strings.
    """
    s = s.lower().replace("’", "'").replace("'", "")
    s = _NON_ALNUM.sub(" ", s)
    tokens = s.split()
    out: list[str] = []
    i = 0
    while i < len(tokens):
        if tokens[i] in _NUMBER_WORDS:
            value, consumed = _parse_number_run(tokens, i)
            out.append(str(value))
            i += consumed
        else:
            out.append(tokens[i])
            i += 1
    return " ".join(out)


@dataclass(frozen=True)
class NoiseParams:
    """Phoneme corruption settings for data augmentation and ASR noise."""

    p_delete: float = 0.1
    p_substitute: float = 0.1
    rng_seed: int = 0

    def __post_init__(self):
        for name in ("p_delete", "p_substitute"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {p}")


def augment_phonemes(
    seq: list[str] | tuple[str, ...],
    params: NoiseParams,
    inv: PhonemeInventory,
    rng: random.Random | None = None,
) -> list[str]:
    """Corrupt a phoneme sequence position by position.

    Each position is independently deleted with p_delete; surviving
    positions are replaced with p_substitute by the most similar
    inventory phoneme (never itself, ties by symbol order). Deletion is
    checked first and the two never compound on one position. Passing an
    explicit rng threads one deterministic stream across many calls;
    otherwise the stream is seeded from params.rng_seed.
    """
    if rng is None:
        rng = random.Random(params.rng_seed)
    out: list[str] = []
    for ph in seq:
        if rng.random() < params.p_delete:
            continue
        if rng.random() < params.p_substitute:
            out.append(inv.most_similar(ph))
        else:
            out.append(ph)
    return out


class _CorpusMatrix:
    """Integer-coded, padded phoneme matrix for vectorized distance scans."""

    def __init__(self, sequences: list[tuple[str, ...]]):
        self.code_of: dict[str, int] = {}
        for seq in sequences:
            for ph in seq:
                if ph not in self.code_of:
                    self.code_of[ph] = len(self.code_of)
        self.lengths = np.array([len(s) for s in sequences], dtype=np.int32)
        width = int(self.lengths.max()) if len(sequences) else 0
        self.codes = np.full((len(sequences), width), -1, dtype=np.int32)
        for row, seq in enumerate(sequences):
            self.codes[row, : len(seq)] = [self.code_of[ph] for ph in seq]

    def distances(self, query: list[str] | tuple[str, ...]) -> np.ndarray:
        """Normalized edit distance from `query` to every corpus row.

        One DP row per query phoneme; the insertion recurrence along the
        row is resolved with a running prefix minimum, so each step is a
        handful of whole-matrix numpy operations.
        """
        n, width = self.codes.shape
        m = len(query)
        if m == 0:
            return np.where(self.lengths == 0, 0.0, 1.0)
        q = np.array([self.code_of.get(ph, -2) for ph in query], dtype=np.int32)
        col = np.arange(width + 1, dtype=np.int32)
        dist = np.broadcast_to(col, (n, width + 1)).copy()
        for i in range(1, m + 1):
            stay = dist[:, :-1] + (self.codes != q[i - 1])
            step = np.minimum(dist[:, 1:] + 1, stay)
            row = np.empty_like(dist)
            row[:, 0] = i
            row[:, 1:] = step
            dist = np.minimum.accumulate(row - col, axis=1) + col
        raw = dist[np.arange(n), self.lengths]
        return raw / np.maximum(self.lengths, m)


@dataclass
class CorpusIndex:
    """Normalized, deduplicated sentences with their phoneme sequences.

    Insertion order is the retrieval tie-break, so building is
    deterministic for a fixed input order.
    """

    sentences: list[tuple[str, tuple[str, ...]]]
    source_path: str
    matrix: _CorpusMatrix

    def __len__(self) -> int:
        return len(self.sentences)

    def texts(self) -> list[str]:
        return [text for text, _ in self.sentences]


def build_corpus_index(
    sentences: Iterable[str],
    lex: Lexicon,
    source_path: str = "<memory>",
) -> CorpusIndex:
    """Normalize, dedupe, and phonemize a sentence list, keeping order."""
    entries: list[tuple[str, tuple[str, ...]]] = []
    seen: set[str] = set()
    empty = True
    for raw in sentences:
        empty = False
        text = normalize_text(raw)
        if not text or text in seen:
            continue
        phones = tuple(graphemes_to_phonemes(text, lex))
        if not phones:
            continue
        seen.add(text)
        entries.append((text, phones))
        if len(entries) > MAX_CORPUS_SENTENCES:
            raise ValueError(
                f"corpus exceeds {MAX_CORPUS_SENTENCES} sentences; "
                "the linear scan does not support larger corpora"
            )
    if empty:
        raise ValueError("corpus sentence list is empty")
    return CorpusIndex(entries, source_path, _CorpusMatrix([p for _, p in entries]))


def load_corpus_file(path: str, lex: Lexicon) -> CorpusIndex:
    """Read a one-sentence-per-line UTF-8 corpus file into an index."""
    with open(path, encoding="utf-8") as fh:
        lines = [line.strip() for line in fh if line.strip()]
    return build_corpus_index(lines, lex, source_path=path)


def retrieve_by_phonemes(
    seq: list[str] | tuple[str, ...],
    index: CorpusIndex,
    k: int,
) -> list[tuple[str, float]]:
    """k nearest corpus sentences to a phoneme sequence, ties by order."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not index.sentences:
        return []
    dists = index.matrix.distances(seq)
    order = np.argsort(dists, kind="stable")[:k]
    return [(index.sentences[i][0], float(dists[i])) for i in order]


def retrieve_alternatives(
    transcript: str,
    index: CorpusIndex,
    k: int,
    lex: Lexicon,
) -> list[tuple[str, float]]:
    """k corpus sentences nearest to the transcript in pronunciation.

    The transcript is normalized and phonemized, then scanned against the
    whole corpus. An exact corpus match of the input is returned (at
    distance 0), never excluded. Empty transcripts yield no results; k
    larger than the corpus returns the whole corpus, sorted.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    text = normalize_text(transcript)
    if not text:
        return []
    return retrieve_by_phonemes(graphemes_to_phonemes(text, lex), index, k)


class RepairModel(Protocol):
    """Anything that maps a phoneme sequence to ranked candidate texts."""

    name: str

    def propose(self, phonemes: list[str] | tuple[str, ...], k: int) -> list[tuple[str, float]]: ...


class RetrievalRepairModel:
    """Built-in repair model: nearest-sentence retrieval over a corpus."""

    def __init__(self, index: CorpusIndex):
        self.name = "retrieval"
        self.index = index

    def propose(self, phonemes: list[str] | tuple[str, ...], k: int) -> list[tuple[str, float]]:
        return retrieve_by_phonemes(phonemes, self.index, k)


_REPAIR_MODELS: dict[str, RepairModel] = {}


def register_repair_model(model: RepairModel) -> None:
    _REPAIR_MODELS[model.name] = model


def get_repair_model(name: str) -> RepairModel:
    try:
        return _REPAIR_MODELS[name]
    except KeyError:
        raise KeyError(f"no repair model registered under {name!r}") from None


def propose_bundle(
    transcript: str,
    model: RepairModel,
    lex: Lexicon,
    cfg: DeadlineConfig,
) -> TranscriptBundle:
    """Build the worker-facing bundle: raw transcript + ranked alternatives."""
    alternatives: list[tuple[str, float]] = []
    if cfg.alternatives_count > 0:
        text = normalize_text(transcript)
        if text:
            phones = graphemes_to_phonemes(text, lex)
            alternatives = model.propose(phones, cfg.alternatives_count)
    return TranscriptBundle(original=transcript, alternatives=alternatives)


def generate_training_pairs(
    index: CorpusIndex,
    times: int = 5,
    params: NoiseParams | None = None,
    inv: PhonemeInventory | None = None,
) -> Iterator[tuple[list[str], str]]:
    """Yield (phoneme sequence, clean text) pairs: 1 clean + `times` noisy
    per corpus sentence, exactly (times + 1) * len(index) pairs.

    One seeded rng streams through the whole run, so a fixed seed gives
    byte-identical output.
    """
    if times < 0:
        raise ValueError("times must be >= 0")
    if times > 0 and (params is None or inv is None):
        raise ValueError("params and inv are required when times > 0")
    rng = random.Random(f"{params.rng_seed}:pairs") if params is not None else None
    for text, phones in index.sentences:
        yield list(phones), text
        for _ in range(times):
            yield augment_phonemes(phones, params, inv, rng=rng), text


def write_training_pairs(pairs: Iterable[tuple[list[str], str]], path: str) -> int:
    """Stream pairs to a TSV file: `PH1 PH2 ...<TAB>clean text`. Returns count."""
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for phones, text in pairs:
            fh.write(f"{' '.join(phones)}\t{text}\n")
            count += 1
    return count


@dataclass(frozen=True)
class RecoveryReport:
    """How well retrieval undoes injected phoneme noise.

    top1_rate / topk_rate are exact-text recovery fractions at rank 1 and
    rank k. mean_distance averages the rank-1 candidate's distance, i.e.
    how far retrieval had to reach.
    """

    samples: int
    k: int
    top1_rate: float
    topk_rate: float
    mean_distance: float


def evaluate_repair(
    index: CorpusIndex,
    params: NoiseParams,
    k: int,
    sample: int,
    inv: PhonemeInventory,
) -> RecoveryReport:
    """Inject noise into the first `sample` corpus sentences and measure
    exact-text recovery through retrieval."""
    if sample > len(index):
        raise ValueError(f"sample {sample} exceeds corpus size {len(index)}")
    rng = random.Random(f"{params.rng_seed}:eval")
    top1 = 0
    topk = 0
    dist_sum = 0.0
    for text, phones in index.sentences[:sample]:
        noisy = augment_phonemes(phones, params, inv, rng=rng)
        hits = retrieve_by_phonemes(noisy, index, k)
        if hits:
            dist_sum += hits[0][1]
            if hits[0][0] == text:
                top1 += 1
            if any(h == text for h, _ in hits):
                topk += 1
    return RecoveryReport(
        samples=sample,
        k=k,
        top1_rate=top1 / sample if sample else 0.0,
        topk_rate=topk / sample if sample else 0.0,
        mean_distance=dist_sum / sample if sample else 0.0,
    )
