"""Latency collection and aggregation.

Records accumulate per turn and every summary is a pure function of the
recorded multiset. Standard deviation is the population SD (divide by n);
percentiles use the nearest-rank method over the sorted values. Both
choices are stated in the exported headers so downstream analysis is not
guessing.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

from .model import LatencyRecord, ResponseKind

KINDS: tuple[ResponseKind, ...] = ("typed", "default_button", "suggested", "timeout_random", "timeout_draft")

CSV_HEADER = "turn_id,kind,latency_seconds"


@dataclass(frozen=True)
class KindStats:
    count: int
    mean: float | None
    sd: float | None


@dataclass(frozen=True)
class LatencySummary:
    count: int
    mean: float | None
    sd: float | None
    p50: float | None
    p90: float | None
    by_kind: dict[str, KindStats] = field(default_factory=dict)


def _mean_sd(values: list[float]) -> tuple[float | None, float | None]:
    if not values:
        return None, None
    mean = sum(values) / len(values)
    var = sum((v - mean) ** 2 for v in values) / len(values)
    return mean, math.sqrt(var)


def _nearest_rank(ordered: list[float], q: float) -> float | None:
    if not ordered:
        return None
    idx = max(0, math.ceil(q * len(ordered)) - 1)
    return ordered[idx]


class MetricsStore:
    """Thread-safe append-only store of per-turn latency records."""

    def __init__(self):
        self._records: list[LatencyRecord] = []
        self._lock = threading.Lock()

    def record(self, rec: LatencyRecord) -> None:
        if rec.latency < 0:
            raise ValueError(f"negative latency rejected: {rec.latency}")
        with self._lock:
            self._records.append(rec)

    def records(self) -> list[LatencyRecord]:
        with self._lock:
            return list(self._records)

    def __len__(self) -> int:
        with self._lock:
            return len(self._records)

    def summarize(self, kind: ResponseKind | None = None) -> LatencySummary:
        recs = self.records()
        if kind is not None:
            recs = [r for r in recs if r.response_kind == kind]
        values = sorted(r.latency for r in recs)
        mean, sd = _mean_sd([r.latency for r in recs])
        by_kind: dict[str, KindStats] = {}
        for k in KINDS:
            sub = [r.latency for r in recs if r.response_kind == k]
            if sub:
                m, s = _mean_sd(sub)
                by_kind[k] = KindStats(len(sub), m, s)
        return LatencySummary(
            count=len(recs),
            mean=mean,
            sd=sd,
            p50=_nearest_rank(values, 0.50),
            p90=_nearest_rank(values, 0.90),
            by_kind=by_kind,
        )

    # -- file formats -------------------------------------------------------

    def export_csv(self, path: str) -> None:
        """One record per line: `turn_id,kind,latency_seconds` plus header."""
        try:
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(CSV_HEADER + "\n")
                for rec in self.records():
                    fh.write(f"{rec.turn_id},{rec.response_kind},{rec.latency!r}\n")
        except OSError as exc:
            raise OSError(f"cannot write latency csv to {path}: {exc}") from exc

    @classmethod
    def from_csv(cls, path: str) -> "MetricsStore":
        store = cls()
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().strip()
            if header != CSV_HEADER:
                raise ValueError(f"unexpected csv header in {path}: {header!r}")
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                turn_id, kind, latency = line.split(",")
                store.record(LatencyRecord(turn_id, float(latency), kind))  # type: ignore[arg-type]
        return store

    def export_histogram(self, path: str, worker_budget: float = 25.0) -> list[tuple[int, int, int]]:
        """Fixed 1 s bins over [0, worker_budget + 5]; `bin_start,bin_end,count`
        per line. Out-of-range values clamp into the edge bins, so bin
        counts always sum to the record count."""
        nbins = max(1, math.ceil(worker_budget + 5))
        counts = [0] * nbins
        for rec in self.records():
            idx = min(max(int(rec.latency), 0), nbins - 1)
            counts[idx] += 1
        rows = [(i, i + 1, c) for i, c in enumerate(counts)]
        try:
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                for start, end, count in rows:
                    fh.write(f"{start},{end},{count}\n")
        except OSError as exc:
            raise OSError(f"cannot write histogram to {path}: {exc}") from exc
        return rows


def summary_lines(summary: LatencySummary) -> list[str]:
    """Delimited aggregate view, one line per response kind."""

    def fmt(x: float | None) -> str:
        return "na" if x is None else f"{x:.3f}"

    lines = [
        "# latency summary; sd is population SD; percentiles nearest-rank",
        "kind,count,mean,sd,p50,p90",
        f"all,{summary.count},{fmt(summary.mean)},{fmt(summary.sd)},{fmt(summary.p50)},{fmt(summary.p90)}",
    ]
    for kind, stats in sorted(summary.by_kind.items()):
        lines.append(f"{kind},{stats.count},{fmt(stats.mean)},{fmt(stats.sd)},na,na")
    return lines
