"""Pronunciation kernels: g2p lookup, phoneme similarity, edit distance.

The lexicon is a CMUdict-format file; stress digits are stripped on load
so distances compare sounds, not stress. Words missing from the lexicon
fall back to a deterministic letter-to-phoneme rule table, which keeps
every operation total over normalized text.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field


class UnknownPhonemeError(KeyError):
    def __init__(self, symbol: str):
        super().__init__(symbol)
        self.symbol = symbol

    def __str__(self) -> str:
        return f"unknown phoneme: {self.symbol}"


_STRESS = re.compile(r"\d+$")
_VARIANT = re.compile(r"\((\d+)\)$")


def strip_stress(phoneme: str) -> str:
    return _STRESS.sub("", phoneme)


@dataclass
class PhonemeInventory:
    """Phoneme alphabet with one articulatory feature vector per symbol.

    The feature file has one phoneme per line, `PHONEME f1 f2 ... fk`,
    whitespace-separated reals, `#` comments ignored. The same loader
    accepts an external embedding file of identical shape, so a trained
    phoneme embedding can replace the built-in feature table.
    """

    feature_vectors: dict[str, tuple[float, ...]]
    _nearest: dict[str, str] = field(default_factory=dict, repr=False)

    @property
    def phonemes(self) -> set[str]:
        return set(self.feature_vectors)

    @classmethod
    def from_file(cls, path: str) -> "PhonemeInventory":
        vectors: dict[str, tuple[float, ...]] = {}
        with open(path, encoding="utf-8") as fh:
            for raw in fh:
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                parts = line.split()
                vectors[parts[0]] = tuple(float(x) for x in parts[1:])
        if not vectors:
            raise ValueError(f"empty feature table: {path}")
        dims = {len(v) for v in vectors.values()}
        if len(dims) != 1:
            raise ValueError(f"feature vectors have mixed dimensions: {sorted(dims)}")
        return cls(vectors)

    def similarity(self, p: str, q: str) -> float:
        """Cosine similarity of the two feature vectors, clamped to [0, 1]."""
        try:
            vp = self.feature_vectors[p]
        except KeyError:
            raise UnknownPhonemeError(p) from None
        try:
            vq = self.feature_vectors[q]
        except KeyError:
            raise UnknownPhonemeError(q) from None
        if p == q:
            return 1.0
        dot = sum(a * b for a, b in zip(vp, vq))
        np_ = math.sqrt(sum(a * a for a in vp))
        nq = math.sqrt(sum(b * b for b in vq))
        if np_ == 0.0 or nq == 0.0:
            return 0.0
        return min(1.0, max(0.0, dot / (np_ * nq)))

    def most_similar(self, p: str) -> str:
        """The inventory phoneme most similar to p, excluding p itself.

        Ties break by symbol sort order. Cached; the inventory is
        immutable after load.
        """
        hit = self._nearest.get(p)
        if hit is not None:
            return hit
        best: str | None = None
        best_sim = -1.0
        for q in sorted(self.feature_vectors):
            if q == p:
                continue
            sim = self.similarity(p, q)
            if sim > best_sim:
                best, best_sim = q, sim
        if best is None:
            raise UnknownPhonemeError(p)
        self._nearest[p] = best
        return best


def phoneme_similarity(p: str, q: str, inv: PhonemeInventory) -> float:
    return inv.similarity(p, q)


@dataclass
class Lexicon:
    """word -> pronunciations map, first entry is the primary one.

    Parses CMUdict text format: `WORD  PH1 PH2 ...`, `;;;` comment lines,
    `WORD(2)` alternate-pronunciation suffixes. Words are case-folded to
    lowercase; an apostrophe-stripped alias is registered for entries
    like "don't" so lookups of normalized text succeed.
    """

    entries: dict[str, list[tuple[str, ...]]]
    word_order: list[str]
    letter_rules: dict[str, tuple[str, ...]]

    @classmethod
    def from_files(cls, lexicon_path: str, letter_rules_path: str) -> "Lexicon":
        entries: dict[str, list[tuple[str, ...]]] = {}
        order: list[str] = []

        def add(word: str, phones: tuple[str, ...]) -> None:
            if word not in entries:
                entries[word] = []
                order.append(word)
            entries[word].append(phones)

        with open(lexicon_path, encoding="utf-8") as fh:
            for raw in fh:
                line = raw.strip()
                if not line or line.startswith(";;;"):
                    continue
                parts = line.split()
                word = parts[0].lower()
                word = _VARIANT.sub("", word)
                phones = tuple(strip_stress(p) for p in parts[1:])
                if not phones:
                    continue
                add(word, phones)
                bare = word.replace("'", "")
                if bare != word and bare not in entries:
                    add(bare, phones)

        rules: dict[str, tuple[str, ...]] = {}
        with open(letter_rules_path, encoding="utf-8") as fh:
            for raw in fh:
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                parts = line.split()
                rules[parts[0].lower()] = tuple(parts[1:])
        return cls(entries, order, rules)

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.entries

    def primary(self, word: str) -> tuple[str, ...] | None:
        prons = self.entries.get(word.lower())
        return prons[0] if prons else None

    def fallback(self, word: str) -> tuple[str, ...]:
        """Letter-by-letter pronunciation for out-of-vocabulary words."""
        out: list[str] = []
        for ch in word.lower():
            out.extend(self.letter_rules.get(ch, ()))
        return tuple(out)

    def pronounce(self, word: str) -> tuple[str, ...]:
        return self.primary(word) or self.fallback(word)


def graphemes_to_phonemes(text: str, lex: Lexicon) -> list[str]:
    """Concatenated per-word primary pronunciations of normalized text.

    Deterministic and total: unknown words go through the letter-rule
    fallback, empty text yields the empty sequence.
    """
    phones: list[str] = []
    for word in text.split():
        phones.extend(lex.pronounce(word))
    return phones


def levenshtein(a: list[str] | tuple[str, ...], b: list[str] | tuple[str, ...]) -> int:
    """Unit-cost edit distance, iterative two-row DP."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, pa in enumerate(a, start=1):
        cur = [i] + [0] * len(b)
        for j, pb in enumerate(b, start=1):
            cur[j] = min(
                prev[j] + 1,
                cur[j - 1] + 1,
                prev[j - 1] + (pa != pb),
            )
        prev = cur
    return prev[-1]


def normalized_levenshtein(a: list[str] | tuple[str, ...], b: list[str] | tuple[str, ...]) -> float:
    """Edit distance divided by max(|a|, |b|); 0.0 when both are empty."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 0.0
    return levenshtein(a, b) / longest
