"""Human-in-the-loop conversational relay with hard per-turn deadlines."""

from .model import DeadlineConfig, LatencyRecord, Session, TranscriptBundle, Turn, WorkerAction, validate_config

__all__ = [
    "DeadlineConfig",
    "LatencyRecord",
    "Session",
    "TranscriptBundle",
    "Turn",
    "WorkerAction",
    "validate_config",
]

__version__ = "0.1.0"
