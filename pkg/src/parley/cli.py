"""Operator entry points: serve, simulate, repair-eval, augment, report.

Every command honors --seed; two runs over identical inputs produce
byte-identical outputs. Exit codes: 0 ok, 1 usage, 2 runtime error.
"""

from __future__ import annotations

import argparse
import os
import sys

from .app import build_relay, load_resources
from .clock import Scheduler, VirtualClock
from .config import RunConfig, load_config
from .metrics import MetricsStore, summary_lines
from .model import ConfigError
from .repair import NoiseParams, evaluate_repair, generate_training_pairs, write_training_pairs
from .simulator import CutoffModel, Script, ScriptedSession
from .workers import make_worker

USAGE_EXIT = 1
RUNTIME_EXIT = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--seed", type=int, help="global rng seed")
    p.add_argument("--out", help="output directory")


def build_parser() -> _Parser:
    parser = _Parser(prog="parley", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the gateway server")
    _add_common(serve)
    serve.add_argument("--listen", help="host:port for websocket endpoints")
    serve.add_argument("--token", help="shared auth token")

    sim = sub.add_parser("simulate", help="run a scripted end-to-end session")
    _add_common(sim)
    sim.add_argument("--script", help="script file")
    sim.add_argument("--worker-model", choices=("button", "typist", "absent"), help="synthetic worker")
    sim.add_argument("--noise-del", type=float, help="ASR word deletion probability")
    sim.add_argument("--noise-sub", type=float, help="ASR word substitution probability")
    sim.add_argument("--repeat", type=int, default=1, help="play the script this many times")

    ev = sub.add_parser("repair-eval", help="measure noise recovery through retrieval")
    _add_common(ev)
    ev.add_argument("--noise-del", type=float, help="phoneme deletion probability")
    ev.add_argument("--noise-sub", type=float, help="phoneme substitution probability")
    ev.add_argument("--k", type=int, help="alternatives per query")
    ev.add_argument("--sample", type=int, help="corpus sentences to corrupt")

    aug = sub.add_parser("augment", help="write noisy training pairs")
    _add_common(aug)
    aug.add_argument("--times", type=int, help="augmented copies per sentence")
    aug.add_argument("--noise-del", type=float)
    aug.add_argument("--noise-sub", type=float)

    rep = sub.add_parser("report", help="summarize a latency csv and render figures")
    _add_common(rep)
    rep.add_argument("--csv", help="latency csv produced by simulate/serve")

    return parser


def _config_from(args: argparse.Namespace, keys: tuple[str, ...]) -> RunConfig:
    overrides = {k: getattr(args, k, None) for k in keys}
    return load_config(args.config, overrides)


def cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _config_from(
        args, ("seed", "out", "script", "worker_model", "noise_del", "noise_sub")
    )
    res = load_resources(cfg)
    clock = VirtualClock()
    scheduler = Scheduler(clock)
    metrics = MetricsStore()
    relay = build_relay(cfg, res, clock, scheduler, metrics)
    script = Script.load(cfg.script)
    cutoff = CutoffModel(
        max_pause=cfg.max_pause,
        listening_window=cfg.listening_window,
        no_speech_close=cfg.no_speech_close,
    )
    noise = NoiseParams(p_delete=cfg.noise_del, p_substitute=cfg.noise_sub, rng_seed=cfg.seed)
    # Sessions run back to back: each starts when the scheduler drains,
    # which models one device reused for consecutive conversations. A
    # session connects its console only while it runs, so one repeat's
    # worker never sees another repeat's turns.
    sessions = []
    for rep in range(max(1, args.repeat)):
        worker = make_worker(cfg.worker_model, seed=f"{cfg.seed}:{rep}")
        session = ScriptedSession(relay, script, cutoff, noise, worker, seed=f"{cfg.seed}:{rep}")
        session.start()
        scheduler.run_until_idle()
        session.close()
        sessions.append(session)
    os.makedirs(cfg.out, exist_ok=True)
    events_path = os.path.join(cfg.out, "events.jsonl")
    csv_path = os.path.join(cfg.out, "metrics.csv")
    hist_path = os.path.join(cfg.out, "histogram.csv")
    relay.event_log.write_jsonl(events_path)
    metrics.export_csv(csv_path)
    metrics.export_histogram(hist_path, worker_budget=cfg.worker_budget)
    for line in summary_lines(metrics.summarize()):
        print(line)
    total_responses = sum(len(s.result.responses) for s in sessions)
    total_abandoned = sum(s.result.abandoned for s in sessions)
    print(f"# responses={total_responses} abandoned={total_abandoned}")
    print(f"# wrote {events_path}, {csv_path}, {hist_path}")
    return 0


def cmd_repair_eval(args: argparse.Namespace) -> int:
    cfg = _config_from(args, ("seed", "out", "noise_del", "noise_sub", "k", "sample"))
    res = load_resources(cfg)
    params = NoiseParams(p_delete=cfg.noise_del, p_substitute=cfg.noise_sub, rng_seed=cfg.seed)
    report = evaluate_repair(res.corpus, params, cfg.k, cfg.sample, res.inventory)
    print(f"samples={report.samples} k={report.k}")
    print(f"top1_rate={report.top1_rate:.4f}")
    print(f"top{report.k}_rate={report.topk_rate:.4f}")
    print(f"mean_distance={report.mean_distance:.4f}")
    return 0


def cmd_augment(args: argparse.Namespace) -> int:
    cfg = _config_from(args, ("seed", "out", "times", "noise_del", "noise_sub"))
    res = load_resources(cfg)
    params = NoiseParams(p_delete=cfg.noise_del, p_substitute=cfg.noise_sub, rng_seed=cfg.seed)
    os.makedirs(cfg.out, exist_ok=True)
    out_path = os.path.join(cfg.out, "training_pairs.tsv")
    pairs = generate_training_pairs(res.corpus, times=cfg.times, params=params, inv=res.inventory)
    count = write_training_pairs(pairs, out_path)
    print(f"wrote {count} pairs to {out_path}")
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    from .report import render_latency_figures

    cfg = _config_from(args, ("seed", "out"))
    csv_path = args.csv or os.path.join(cfg.out, "metrics.csv")
    if not os.path.exists(csv_path):
        raise FileNotFoundError(f"latency csv not found: {csv_path}")
    store = MetricsStore.from_csv(csv_path)
    os.makedirs(cfg.out, exist_ok=True)
    lines = summary_lines(store.summarize())
    summary_path = os.path.join(cfg.out, "summary.csv")
    with open(summary_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    hist_path = os.path.join(cfg.out, "histogram.csv")
    store.export_histogram(hist_path)
    figures = render_latency_figures(store, cfg.out)
    for line in lines:
        print(line)
    print(f"# wrote {summary_path}, {hist_path}, {', '.join(figures)}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    from .server import serve

    cfg = _config_from(args, ("seed", "out", "listen", "token"))
    return serve(cfg)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "serve": cmd_serve,
        "simulate": cmd_simulate,
        "repair-eval": cmd_repair_eval,
        "augment": cmd_augment,
        "report": cmd_report,
    }
    try:
        return handlers[args.command](args)
    except (ConfigError, FileNotFoundError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RUNTIME_EXIT


if __name__ == "__main__":
    sys.exit(main())
