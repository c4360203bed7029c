"""Time-ordered event queue driving the simulation.

Sessions are scheduled as single events and executed strictly in
(time, insertion) order: ties at the same minute resolve in the order
the events were pushed, which keeps runs replayable.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

ACCESS_SESSION = "access_session"


@dataclass(frozen=True)
class SimEvent:
    time: float
    seq: int
    actor_id: str
    kind: str = ACCESS_SESSION


class EventQueue:
    """Min-heap over (time, seq); supports pushes while popping."""

    def __init__(self, horizon: float):
        self.horizon = horizon
        self._heap: list[tuple[float, int, SimEvent]] = []
        self._next_seq = 0

    def __len__(self) -> int:
        return len(self._heap)

    def __bool__(self) -> bool:
        return bool(self._heap)

    def push(self, time: float, actor_id: str, kind: str = ACCESS_SESSION) -> SimEvent:
        if not 0.0 <= time <= self.horizon:
            raise ValueError(f"event time {time!r} outside [0, {self.horizon:g}]")
        event = SimEvent(time=float(time), seq=self._next_seq, actor_id=actor_id, kind=kind)
        self._next_seq += 1
        heapq.heappush(self._heap, (event.time, event.seq, event))
        return event

    def pop(self) -> SimEvent:
        if not self._heap:
            raise IndexError("pop from empty event queue")
        return heapq.heappop(self._heap)[2]
