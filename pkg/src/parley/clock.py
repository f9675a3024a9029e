"""Injectable clocks and a deterministic event scheduler.

Everything time-dependent in this package runs against a Clock object so
simulations execute on a virtual timeline (fast, reproducible) while the
live server runs on the wall clock. The scheduler orders callbacks by
(time, insertion order), which makes event interleaving deterministic for
a fixed seed and input.
"""

from __future__ import annotations

import heapq
import itertools
import time
from typing import Callable, Protocol


class Clock(Protocol):
    def now(self) -> float: ...


class WallClock:
    """Real time, seconds since the Unix epoch."""

    def now(self) -> float:
        return time.time()


class VirtualClock:
    """Simulated time. Advanced only by the scheduler or explicitly."""

    def __init__(self, start: float = 0.0):
        self._now = start

    def now(self) -> float:
        return self._now

    def advance_to(self, t: float) -> None:
        if t < self._now:
            raise ValueError(f"virtual clock cannot move backwards ({t} < {self._now})")
        self._now = t


class Handle:
    """Cancelable reference to a scheduled callback."""

    __slots__ = ("when", "canceled")

    def __init__(self, when: float):
        self.when = when
        self.canceled = False

    def cancel(self) -> None:
        self.canceled = True


class Scheduler:
    """Priority-queue event scheduler over an injected clock.

    With a VirtualClock, `run_until_idle` drives the simulation: it pops
    events in (time, seq) order and advances the clock to each event's
    timestamp. With a WallClock, an external loop calls `run_due`
    periodically and the clock is never touched.
    """

    def __init__(self, clock: Clock):
        self.clock = clock
        self._heap: list[tuple[float, int, Handle, Callable[[], None]]] = []
        self._seq = itertools.count()

    def call_at(self, when: float, fn: Callable[[], None]) -> Handle:
        if when < self.clock.now():
            when = self.clock.now()
        handle = Handle(when)
        heapq.heappush(self._heap, (when, next(self._seq), handle, fn))
        return handle

    def call_later(self, delay: float, fn: Callable[[], None]) -> Handle:
        return self.call_at(self.clock.now() + max(0.0, delay), fn)

    def pending(self) -> int:
        return sum(1 for _, _, h, _ in self._heap if not h.canceled)

    def next_event_time(self) -> float | None:
        while self._heap and self._heap[0][2].canceled:
            heapq.heappop(self._heap)
        return self._heap[0][0] if self._heap else None

    def run_due(self, now: float) -> int:
        """Run every event scheduled at or before `now`. Returns count run."""
        ran = 0
        while self._heap and self._heap[0][0] <= now:
            _, _, handle, fn = heapq.heappop(self._heap)
            if handle.canceled:
                continue
            fn()
            ran += 1
        return ran

    def run_until_idle(self, max_time: float | None = None) -> None:
        """Virtual-clock driver: consume events in order, advancing time.

        Stops when the queue is empty or the next event lies beyond
        `max_time` (clock is then left at max_time).
        """
        clock = self.clock
        if not isinstance(clock, VirtualClock):
            raise TypeError("run_until_idle requires a VirtualClock")
        while True:
            when = self.next_event_time()
            if when is None:
                break
            if max_time is not None and when > max_time:
                clock.advance_to(max_time)
                return
            _, _, handle, fn = heapq.heappop(self._heap)
            if handle.canceled:
                continue
            clock.advance_to(when)
            fn()
