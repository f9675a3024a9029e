"""Figure rendering for latency reports.

Renders alongside the delimited exports: a binned latency distribution
split by response kind, and a mean-with-SD bar chart. Headless (Agg)
backend; files land in the report output directory.
"""

from __future__ import annotations

import math
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .metrics import MetricsStore

KIND_COLORS = {
    "typed": "#4878cf",
    "default_button": "#6acc65",
    "suggested": "#d65f5f",
    "timeout_random": "#b47cc7",
    "timeout_draft": "#c4ad66",
}


def render_latency_figures(store: MetricsStore, out_dir: str, worker_budget: float = 25.0) -> list[str]:
    """Write latency_hist.png and latency_by_kind.png; returns the paths."""
    records = store.records()
    os.makedirs(out_dir, exist_ok=True)
    paths: list[str] = []

    upper = max(1, math.ceil(worker_budget + 5))
    bins = list(range(upper + 1))
    kinds = [k for k in KIND_COLORS if any(r.response_kind == k for r in records)]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    if kinds:
        ax.hist(
            [[min(max(r.latency, 0.0), upper - 0.001) for r in records if r.response_kind == k] for k in kinds],
            bins=bins,
            stacked=True,
            label=kinds,
            color=[KIND_COLORS[k] for k in kinds],
        )
        ax.legend(frameon=False)
    ax.set_xlabel("latency (s)")
    ax.set_ylabel("turns")
    ax.set_title("Per-turn latency distribution")
    fig.tight_layout()
    hist_path = os.path.join(out_dir, "latency_hist.png")
    fig.savefig(hist_path, dpi=120)
    plt.close(fig)
    paths.append(hist_path)

    summary = store.summarize()
    fig, ax = plt.subplots(figsize=(6.5, 4))
    labels = sorted(summary.by_kind)
    means = [summary.by_kind[k].mean or 0.0 for k in labels]
    sds = [summary.by_kind[k].sd or 0.0 for k in labels]
    ax.bar(labels, means, yerr=sds, capsize=4, color=[KIND_COLORS.get(k, "#999999") for k in labels])
    ax.set_ylabel("mean latency (s)")
    ax.set_title("Mean latency by response kind")
    ax.tick_params(axis="x", rotation=20)
    fig.tight_layout()
    kind_path = os.path.join(out_dir, "latency_by_kind.png")
    fig.savefig(kind_path, dpi=120)
    plt.close(fig)
    paths.append(kind_path)
    return paths
