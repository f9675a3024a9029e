#!/usr/bin/env python3
"""Out-of-band brute-force oracle for the noise-recovery figures.

Replays the exact noise stream evaluate_repair uses, then retrieves with
an independent pure-Python scan (scalar DP distance + stable sort) and
writes the resulting rates to tests/fixtures/repair_recovery.json. The
acceptance suite asserts evaluate_repair reproduces these numbers
exactly. Rerun whenever the corpus, lexicon, or noise parameters change.
"""

from __future__ import annotations

import json
import os
import random
import sys
import time

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from parley.app import load_resources
from parley.config import RunConfig
from parley.repair import NoiseParams, augment_phonemes

SEED = 7
P_DELETE = 0.05
P_SUBSTITUTE = 0.05
K = 3
SAMPLE = 1000


def scalar_distance(a: tuple[str, ...], b: tuple[str, ...]) -> float:
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return 0.0 if not a else 1.0
    prev = list(range(len(b) + 1))
    for i, pa in enumerate(a, start=1):
        cur = [i] + [0] * len(b)
        for j, pb in enumerate(b, start=1):
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (pa != pb))
        prev = cur
    return prev[-1] / len(a)


def main() -> int:
    t0 = time.time()
    res = load_resources(RunConfig())
    corpus = res.corpus
    if SAMPLE > len(corpus):
        raise SystemExit(f"sample {SAMPLE} exceeds corpus {len(corpus)}")
    params = NoiseParams(P_DELETE, P_SUBSTITUTE, SEED)
    rng = random.Random(f"{params.rng_seed}:eval")
    top1 = topk = 0
    dist_sum = 0.0
    for n, (text, phones) in enumerate(corpus.sentences[:SAMPLE]):
        noisy = tuple(augment_phonemes(phones, params, res.inventory, rng=rng))
        scored = sorted(
            ((scalar_distance(noisy, p), i, t) for i, (t, p) in enumerate(corpus.sentences)),
            key=lambda s: (s[0], s[1]),
        )[:K]
        dist_sum += scored[0][0]
        if scored[0][2] == text:
            top1 += 1
        if any(t == text for _, _, t in scored):
            topk += 1
        if (n + 1) % 100 == 0:
            print(f"{n + 1}/{SAMPLE} in {time.time() - t0:.0f}s", flush=True)
    out = {
        "seed": SEED,
        "p_delete": P_DELETE,
        "p_substitute": P_SUBSTITUTE,
        "k": K,
        "sample": SAMPLE,
        "corpus_size": len(corpus),
        "top1_rate": top1 / SAMPLE,
        "topk_rate": topk / SAMPLE,
        "mean_distance": dist_sum / SAMPLE,
        "oracle_seconds": round(time.time() - t0, 1),
    }
    path = os.path.join(os.path.dirname(__file__), "..", "tests", "fixtures", "repair_recovery.json")
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(out, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
