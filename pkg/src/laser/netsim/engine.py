"""Discrete-event core. Time is an integer count of nanoseconds."""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

NS_PER_S = 1_000_000_000
NS_PER_US = 1_000

FRAME_RX = "frame-rx"
TIMER = "timer"
APP_START = "app-start"


def seconds(t: float) -> int:
    return round(t * NS_PER_S)


@dataclass(eq=False)
class SimEvent:
    time: int
    seq: int
    kind: str
    node: Optional[str]
    fn: Callable[..., Any] = field(repr=False)
    args: tuple = field(repr=False, default=())
    cancelled: bool = False

    def cancel(self):
        self.cancelled = True


class Simulator:
    def __init__(self, trace: bool = False):
        self.now_ns = 0
        # heap of (time, seq, event): plain tuples compare much faster than dataclasses
        self._queue: list[tuple[int, int, SimEvent]] = []
        self._seq = 0
        self.trace: Optional[list[tuple[int, int, str, Optional[str]]]] = [] if trace else None
        self.processed = 0

    @property
    def now(self) -> float:
        return self.now_ns / NS_PER_S

    def at(self, time_ns: int, fn, *args, kind: str = TIMER, node: Optional[str] = None) -> SimEvent:
        if time_ns < self.now_ns:
            raise ValueError("cannot schedule into the past")
        ev = SimEvent(time_ns, self._seq, kind, node, fn, args)
        self._seq += 1
        heapq.heappush(self._queue, (time_ns, ev.seq, ev))
        return ev

    def after(self, delay_ns: int, fn, *args, kind: str = TIMER, node: Optional[str] = None) -> SimEvent:
        return self.at(self.now_ns + max(0, delay_ns), fn, *args, kind=kind, node=node)

    def after_s(self, delay_s: float, fn, *args, kind: str = TIMER, node: Optional[str] = None) -> SimEvent:
        return self.after(seconds(delay_s), fn, *args, kind=kind, node=node)

    def pending(self) -> int:
        return sum(1 for _, _, ev in self._queue if not ev.cancelled)

    def run(self, until_ns: Optional[int] = None, stop: Optional[Callable[[], bool]] = None) -> int:
        """Process events in (time, insertion) order. Returns the stop time."""
        queue = self._queue
        while queue:
            if until_ns is not None and queue[0][0] > until_ns:
                break
            ev = heapq.heappop(queue)[2]
            if ev.cancelled:
                continue
            self.now_ns = ev.time
            if self.trace is not None:
                self.trace.append((ev.time, ev.seq, ev.kind, ev.node))
            self.processed += 1
            ev.fn(*ev.args)
            if stop is not None and stop():
                return self.now_ns
        if until_ns is not None and until_ns > self.now_ns:
            self.now_ns = until_ns
        return self.now_ns
