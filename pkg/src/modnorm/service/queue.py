"""Triage queue with an append-only, replayable decision log."""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union


class ItemNotFoundError(Exception):
    pass


class DecisionConflictError(Exception):
    """The item already carries a decision."""


PENDING = "pending"
REMOVED = "removed"
APPROVED = "approved"
_ACTION_TO_STATUS = {"remove": REMOVED, "approve": APPROVED}


@dataclass
class RulePrediction:
    rule_index: int
    rule_text: str
    coarse_type: str
    probability: float

    def to_record(self) -> dict:
        return self.__dict__.copy()

    @classmethod
    def from_record(cls, record: dict) -> "RulePrediction":
        return cls(
            rule_index=int(record["rule_index"]),
            rule_text=record["rule_text"],
            coarse_type=record["coarse_type"],
            probability=float(record["probability"]),
        )


@dataclass
class Decision:
    actor: str
    action: str
    timestamp: float
    rule_index: Optional[int] = None

    def to_record(self) -> dict:
        return self.__dict__.copy()

    @classmethod
    def from_record(cls, record: dict) -> "Decision":
        return cls(
            actor=record["actor"],
            action=record["action"],
            timestamp=float(record["timestamp"]),
            rule_index=record.get("rule_index"),
        )


@dataclass
class TriageItem:
    item_id: str
    subreddit: str
    conversation: list[dict]  # [{author, body, created_utc}, ...] oldest first
    predictions: list[RulePrediction]
    status: str = PENDING
    decision: Optional[Decision] = None
    created_seq: int = 0
    created_ts: float = 0.0

    @property
    def top_probability(self) -> float:
        return max((p.probability for p in self.predictions), default=0.0)

    def to_record(self) -> dict:
        return {
            "item_id": self.item_id,
            "subreddit": self.subreddit,
            "conversation": self.conversation,
            "predictions": [p.to_record() for p in self.predictions],
            "status": self.status,
            "decision": self.decision.to_record() if self.decision else None,
            "created_seq": self.created_seq,
            "created_ts": self.created_ts,
        }

    @classmethod
    def from_record(cls, record: dict) -> "TriageItem":
        decision = record.get("decision")
        return cls(
            item_id=record["item_id"],
            subreddit=record["subreddit"],
            conversation=list(record["conversation"]),
            predictions=[RulePrediction.from_record(p) for p in record["predictions"]],
            status=record.get("status", PENDING),
            decision=Decision.from_record(decision) if decision else None,
            created_seq=int(record.get("created_seq", 0)),
            created_ts=float(record.get("created_ts", 0.0)),
        )


class DecisionLog:
    """Append-only event log; replaying it reconstructs every item state.

    Two event kinds: ``item_created`` (full item payload) and ``decision``.
    Writes are serialized through a lock; timestamps never decrease.
    """

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._seq = 0
        self._last_ts = 0.0
        if self.path.exists():
            for event in self.read_events():
                self._seq = max(self._seq, int(event.get("seq", 0)))
                self._last_ts = max(self._last_ts, float(event.get("ts", 0.0)))

    def _stamp(self) -> tuple[int, float]:
        self._seq += 1
        now = max(time.time(), self._last_ts)
        self._last_ts = now
        return self._seq, now

    def append(self, event: dict) -> dict:
        with self._lock:
            seq, ts = self._stamp()
            event = {"seq": seq, "ts": ts, **event}
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as handle:
                handle.write(json.dumps(event, sort_keys=True) + "\n")
            return event

    def read_events(self) -> list[dict]:
        if not self.path.exists():
            return []
        events = []
        with open(self.path, "r", encoding="utf-8") as handle:
            for line in handle:
                if line.strip():
                    events.append(json.loads(line))
        events.sort(key=lambda e: e.get("seq", 0))
        return events


class TriageQueue:
    """In-memory item states backed by the decision log."""

    def __init__(self, log: DecisionLog, export_path: Optional[Union[str, Path]] = None):
        self.log = log
        self.export_path = Path(export_path) if export_path else None
        self._lock = threading.Lock()
        self._items: dict[str, TriageItem] = {}
        self._by_payload: dict[str, str] = {}  # payload fingerprint -> item id
        self._next_item = 0
        for event in log.read_events():
            self._apply(event, replaying=True)

    # -- event application ---------------------------------------------------

    def _apply(self, event: dict, replaying: bool = False) -> TriageItem:
        kind = event.get("event")
        if kind == "item_created":
            item = TriageItem.from_record(event["item"])
            item.created_seq = int(event["seq"])
            item.created_ts = float(event["ts"])
            self._items[item.item_id] = item
            self._by_payload[self._fingerprint_record(item)] = item.item_id
            number = int(item.item_id.rsplit("-", 1)[-1], 16)
            self._next_item = max(self._next_item, number)
            return item
        if kind == "decision":
            item = self._items[event["item_id"]]
            item.status = _ACTION_TO_STATUS[event["action"]]
            item.decision = Decision(
                actor=event["actor"],
                action=event["action"],
                timestamp=float(event["ts"]),
                rule_index=event.get("rule_index"),
            )
            self._by_payload.pop(self._fingerprint_record(item), None)
            return item
        raise ValueError(f"unknown event kind: {kind!r}")

    @staticmethod
    def _fingerprint(subreddit: str, conversation: Sequence[dict]) -> str:
        return json.dumps([subreddit, list(conversation)], sort_keys=True)

    def _fingerprint_record(self, item: TriageItem) -> str:
        return self._fingerprint(item.subreddit, item.conversation)

    # -- operations ----------------------------------------------------------

    def find_pending(
        self, subreddit: str, conversation: Sequence[dict]
    ) -> Optional[TriageItem]:
        """An existing pending item for an identical payload, if any."""
        with self._lock:
            item_id = self._by_payload.get(self._fingerprint(subreddit, conversation))
            if item_id is None:
                return None
            item = self._items.get(item_id)
            return item if item is not None and item.status == PENDING else None

    def create_item(
        self,
        subreddit: str,
        conversation: Sequence[dict],
        predictions: Sequence[RulePrediction],
    ) -> TriageItem:
        with self._lock:
            self._next_item += 1
            item = TriageItem(
                item_id=f"item-{self._next_item:06x}",
                subreddit=subreddit,
                conversation=list(conversation),
                predictions=list(predictions),
            )
            event = self.log.append({"event": "item_created", "item": item.to_record()})
            return self._apply(event)

    def get(self, item_id: str) -> TriageItem:
        item = self._items.get(item_id)
        if item is None:
            raise ItemNotFoundError(item_id)
        return item

    def decide(
        self,
        item_id: str,
        action: str,
        actor: str,
        rule_index: Optional[int] = None,
    ) -> TriageItem:
        if action not in _ACTION_TO_STATUS:
            raise ValueError(f"unknown action {action!r}")
        with self._lock:
            item = self.get(item_id)
            if item.status != PENDING:
                raise DecisionConflictError(
                    f"{item_id} already decided: {item.status}"
                )
            event = self.log.append(
                {
                    "event": "decision",
                    "item_id": item_id,
                    "action": action,
                    "actor": actor,
                    "rule_index": rule_index,
                }
            )
            item = self._apply(event)
            self._export_labeled(item)
            return item

    def _export_labeled(self, item: TriageItem) -> None:
        """Write the decision out as a retraining example."""
        if self.export_path is None:
            return
        record = {
            "item_id": item.item_id,
            "subreddit": item.subreddit,
            "conversation": item.conversation,
            "action": item.decision.action if item.decision else None,
            "rule_index": item.decision.rule_index if item.decision else None,
            "label": 1 if item.status == REMOVED else 0,
            "provenance": "moderator_decision",
        }
        self.export_path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.export_path, "a", encoding="utf-8") as handle:
            handle.write(json.dumps(record, sort_keys=True) + "\n")

    def pending_page(
        self, cursor: Optional[str] = None, limit: int = 50
    ) -> tuple[list[TriageItem], Optional[str]]:
        """Pending items by descending top probability, keyset-paginated.

        The cursor encodes the last returned item's sort key, so pages stay
        stable and duplicate-free while items are being decided.
        """
        with self._lock:
            pending = [i for i in self._items.values() if i.status == PENDING]
        pending.sort(key=lambda i: (-i.top_probability, i.created_seq))
        if cursor:
            prob_part, seq_part = cursor.split(":")
            key = (-float(prob_part), int(seq_part))
            pending = [
                i for i in pending if (-i.top_probability, i.created_seq) > key
            ]
        page = pending[:limit]
        next_cursor = None
        if len(pending) > limit and page:
            last = page[-1]
            next_cursor = f"{last.top_probability:.9f}:{last.created_seq}"
        return page, next_cursor

    def items(self) -> list[TriageItem]:
        with self._lock:
            return list(self._items.values())


def replay_log(path: Union[str, Path]) -> dict[str, TriageItem]:
    """Rebuild all item states from a decision log file alone."""
    queue = TriageQueue(DecisionLog(path), export_path=None)
    return {item.item_id: item for item in queue.items()}
