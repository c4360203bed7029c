"""Append-only JSON-lines event log and its reader.

One record per simulation happening, strictly ordered by (time, seq):
``time`` is the minute of the queue event that produced the record, and
``seq`` is a global record counter.  Sub-step timing (the in-session
clock) lives in the payload.  Records are serialized with a fixed key
order so identical runs produce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

RECORD_KINDS = (
    "access",
    "observe",
    "impression",
    "action",
    "mutation",
    "reflect",
    "censor",
    "error",
)


@dataclass(frozen=True)
class EventLogRecord:
    time: float
    seq: int
    actor_id: str
    kind: str
    payload: dict

    def to_json(self) -> str:
        obj = {
            "time": self.time,
            "seq": self.seq,
            "actor_id": self.actor_id,
            "kind": self.kind,
            "payload": self.payload,
        }
        return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


class MalformedLogError(Exception):
    def __init__(self, path, line_number, reason):
        super().__init__(f"{path}:{line_number}: {reason}")
        self.line_number = line_number


class EventLogWriter:
    """Appends records in strictly increasing (time, seq) order."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = self.path.open("w", encoding="utf-8")
        self._seq = 0
        self._last_time = float("-inf")

    def append(self, time: float, actor_id: str, kind: str, payload: dict) -> EventLogRecord:
        if kind not in RECORD_KINDS:
            raise ValueError(f"unknown record kind {kind!r}")
        if time < self._last_time:
            raise ValueError(
                f"record time {time} precedes previous record at {self._last_time}"
            )
        self._last_time = time
        record = EventLogRecord(
            time=time, seq=self._seq, actor_id=actor_id, kind=kind, payload=payload
        )
        self._seq += 1
        self._fh.write(record.to_json() + "\n")
        return record

    def close(self) -> None:
        self._fh.close()

    def __enter__(self) -> "EventLogWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def read_event_log(path: str | Path) -> Iterator[EventLogRecord]:
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                yield EventLogRecord(
                    time=float(obj["time"]),
                    seq=int(obj["seq"]),
                    actor_id=str(obj["actor_id"]),
                    kind=str(obj["kind"]),
                    payload=dict(obj["payload"]),
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise MalformedLogError(path, line_number, str(exc)) from exc


def rebuild_topic_state(records: list[EventLogRecord]) -> dict:
    """Reconstruct hub state from mutation/censor records.

    Returns {"like_count", "repost_count", "comments": {id: {...}}} so
    tests can compare against the in-memory topic after a run.
    """
    state: dict = {"like_count": 0, "repost_count": 0, "comments": {}}
    for record in records:
        if record.kind == "mutation":
            p = record.payload
            op = p["op"]
            if op == "like_topic":
                state["like_count"] = p["like_count"]
            elif op == "repost":
                state["repost_count"] = p["repost_count"]
            elif op == "comment":
                state["comments"][p["comment_id"]] = {
                    "author_id": p["author_id"],
                    "text": p["text"],
                    "created_at": p["created_at"],
                    "is_poison": p["is_poison"],
                    "flagged": p["flagged"],
                    "like_count": 0,
                    "replies": {},
                }
            elif op == "like_comment":
                state["comments"][p["comment_id"]]["like_count"] = p["like_count"]
            elif op == "reply":
                state["comments"][p["comment_id"]]["replies"][p["reply_id"]] = {
                    "author_id": p["author_id"],
                    "text": p["text"],
                    "created_at": p["created_at"],
                    "is_poison": p["is_poison"],
                    "flagged": p["flagged"],
                }
        elif record.kind == "censor":
            p = record.payload
            target = state["comments"].get(p["comment_id"])
            if target is not None:
                target["flagged"] = p["flagged"]
            else:
                for comment in state["comments"].values():
                    reply = comment["replies"].get(p["comment_id"])
                    if reply is not None:
                        reply["flagged"] = p["flagged"]
    return state
