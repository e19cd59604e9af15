"""Append-only event log and snapshots.

The log is newline-delimited JSON, one event per line, UTF-8. Appends are
flushed and fsynced before returning, so an acknowledged event survives a
crash; a torn trailing line (a crash mid-write) is detected when the log
is opened, truncated away and reported. Anything else malformed — a
sequence gap, a corrupt line in the middle — raises CorruptLog with the
offending sequence number.

Snapshots store a full state document plus the sequence number it covers;
replay resumes from there.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Optional

from .errors import CorruptLog, SnapshotVersionMismatch, ValidationError

EVENT_KINDS = (
    "contact_registered",
    "situation_added",
    "elicitation_answered",
    "feedback_recorded",
    "model_refit",
    "decision_made",
)

#: Required payload keys per event kind.
_PAYLOAD_SCHEMAS: dict[str, set[str]] = {
    "contact_registered": {"contact"},
    "situation_added": {"situation"},
    "elicitation_answered": {"request_id", "situation_id", "answers"},
    "feedback_recorded": {"feedback"},
    "model_refit": {"targets"},
    "decision_made": {"decision"},
}

SNAPSHOT_VERSION = 1


@dataclass(frozen=True)
class EventRecord:
    seq: int
    timestamp: float
    kind: str
    payload: dict

    def to_dict(self) -> dict:
        return {
            "seq": self.seq,
            "timestamp": self.timestamp,
            "kind": self.kind,
            "payload": self.payload,
        }


def validate_event(kind: str, payload: dict) -> None:
    if kind not in EVENT_KINDS:
        raise ValidationError(f"unknown event kind {kind!r}", field="kind")
    if not isinstance(payload, dict):
        raise ValidationError("event payload must be an object", field="payload")
    missing = _PAYLOAD_SCHEMAS[kind] - set(payload)
    if missing:
        raise ValidationError(
            f"{kind} payload missing key(s): {', '.join(sorted(missing))}", field=kind
        )


class EventLog:
    """Single-writer append-only log backed by one NDJSON file."""

    def __init__(self, path: str | Path, clock: Callable[[], float] = time.time):
        self.path = Path(path)
        self._clock = clock
        self.recovered_bytes = 0  # torn tail truncated on open, if any
        self._events: list[EventRecord] = []
        self._load()
        self._fh = open(self.path, "a", encoding="utf-8")

    def _load(self) -> None:
        if not self.path.exists():
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self.path.touch()
            return
        raw = self.path.read_bytes()
        lines = raw.split(b"\n")
        # Everything before the final newline must parse; a torn trailing
        # fragment (no newline, or unparsable last line) is truncated.
        trailing = lines.pop() if lines else b""
        good_bytes = 0
        expected_seq = 1
        for line in lines:
            if not line.strip():
                good_bytes += len(line) + 1
                continue
            try:
                doc = json.loads(line.decode("utf-8"))
                event = EventRecord(
                    seq=doc["seq"],
                    timestamp=doc["timestamp"],
                    kind=doc["kind"],
                    payload=doc["payload"],
                )
                validate_event(event.kind, event.payload)
            except (ValueError, KeyError, UnicodeDecodeError):
                raise CorruptLog(
                    f"unparsable event at seq {expected_seq}", seq=expected_seq
                )
            if event.seq != expected_seq:
                raise CorruptLog(
                    f"sequence gap: expected {expected_seq}, found {event.seq}",
                    seq=event.seq,
                )
            self._events.append(event)
            expected_seq += 1
            good_bytes += len(line) + 1
        if trailing.strip():
            self.recovered_bytes = len(trailing)
            with open(self.path, "r+b") as fh:
                fh.truncate(good_bytes)

    @property
    def last_seq(self) -> int:
        return self._events[-1].seq if self._events else 0

    def events(self, after_seq: int = 0) -> list[EventRecord]:
        return [e for e in self._events if e.seq > after_seq]

    def append(self, kind: str, payload: dict) -> EventRecord:
        """Validate, assign the next sequence number and persist durably
        before returning."""
        validate_event(kind, payload)
        event = EventRecord(
            seq=self.last_seq + 1, timestamp=self._clock(), kind=kind, payload=payload
        )
        line = json.dumps(event.to_dict(), separators=(",", ":")) + "\n"
        self._fh.write(line)
        self._fh.flush()
        os.fsync(self._fh.fileno())
        self._events.append(event)
        return event

    def close(self) -> None:
        self._fh.close()


def replay(
    events: Iterable[EventRecord],
    apply: Callable[[object, EventRecord], None],
    state: object,
) -> object:
    """Fold events into state, checking the sequence is gap-free from the
    state's last applied seq."""
    expected = getattr(state, "last_seq", 0) + 1
    for event in events:
        if event.seq != expected:
            raise CorruptLog(
                f"sequence gap during replay: expected {expected}, found {event.seq}",
                seq=event.seq,
            )
        apply(state, event)
        expected += 1
    return state


def write_snapshot(path: str | Path, state_doc: dict, covered_seq: int) -> None:
    doc = {"version": SNAPSHOT_VERSION, "covered_seq": covered_seq, "state": state_doc}
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(doc, separators=(",", ":")), encoding="utf-8")
    os.replace(tmp, path)


def load_snapshot(path: str | Path) -> tuple[dict, int]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("version") != SNAPSHOT_VERSION:
        raise SnapshotVersionMismatch(
            f"snapshot version {doc.get('version')!r} != {SNAPSHOT_VERSION}"
        )
    return doc["state"], doc["covered_seq"]
