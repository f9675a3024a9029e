"""Independent oracles the test suite checks implementations against.

These deliberately avoid the library's optimized code paths: the distance
oracle is the textbook recurrence evaluated recursively, retrieval is a
plain scan over it, and cosine is recomputed from raw file rows.
"""

from __future__ import annotations

from functools import lru_cache
import math


def recursive_levenshtein(a: tuple[str, ...], b: tuple[str, ...]) -> int:
    """Direct recursive evaluation of the edit-distance recurrence."""

    @lru_cache(maxsize=None)
    def d(i: int, j: int) -> int:
        if i == 0:
            return j
        if j == 0:
            return i
        return min(
            d(i - 1, j) + 1,
            d(i, j - 1) + 1,
            d(i - 1, j - 1) + (a[i - 1] != b[j - 1]),
        )

    result = d(len(a), len(b))
    d.cache_clear()
    return result


def oracle_normalized(a: tuple[str, ...], b: tuple[str, ...]) -> float:
    longest = max(len(a), len(b))
    return 0.0 if longest == 0 else recursive_levenshtein(a, b) / longest


def scan_retrieve(
    query: tuple[str, ...],
    entries: list[tuple[str, tuple[str, ...]]],
    k: int,
    distance=oracle_normalized,
) -> list[tuple[str, float]]:
    """Linear scan + stable sort; ties keep corpus insertion order."""
    scored = [(distance(query, phones), i, text) for i, (text, phones) in enumerate(entries)]
    scored.sort(key=lambda t: (t[0], t[1]))
    return [(text, dist) for dist, _, text in scored[:k]]


def cosine(u: list[float], v: list[float]) -> float:
    dot = sum(a * b for a, b in zip(u, v))
    nu = math.sqrt(sum(a * a for a in u))
    nv = math.sqrt(sum(b * b for b in v))
    if nu == 0 or nv == 0:
        return 0.0
    return dot / (nu * nv)


def feature_rows(path: str) -> dict[str, list[float]]:
    rows: dict[str, list[float]] = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if line:
                parts = line.split()
                rows[parts[0]] = [float(x) for x in parts[1:]]
    return rows
