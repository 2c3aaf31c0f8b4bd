"""Privacy-preserving dataset serialization: ids out, text stays home."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional, Union

from modnorm.corpus.build import CorpusDataset, DatasetEntry
from modnorm.corpus.threads import reconstruct_thread
from modnorm.corpus.types import (
    CommentStore,
    CommunityRule,
    MatchMethod,
    ModerationEvent,
    RuleBook,
)

# Field names that must never appear in a release record.
_FORBIDDEN_KEYS = {"body", "author", "author_pseudonym", "text", "description"}


class ScrubberError(Exception):
    """A release record failed the privacy scrub."""


@dataclass(frozen=True)
class ReleaseRecord:
    """One conversation reduced to identifiers and labels."""

    entry_id: int
    role: str  # "moderated" | "control"
    subreddit: str
    comment_ids: tuple[str, ...]
    moderated: bool
    violated_rule_indexes: tuple[int, ...] = ()
    violation_types: tuple[str, ...] = ()
    # Parallel arrays, one slot per moderation event.
    moderation_comment_ids: tuple[str, ...] = ()
    event_rule_indexes: tuple[int, ...] = ()
    match_methods: tuple[str, ...] = ()
    forecast_only: bool = False

    def to_record(self) -> dict:
        return {
            "entry_id": self.entry_id,
            "role": self.role,
            "subreddit": self.subreddit,
            "comment_ids": list(self.comment_ids),
            "moderated": self.moderated,
            "violated_rule_indexes": list(self.violated_rule_indexes),
            "violation_types": list(self.violation_types),
            "moderation_comment_ids": list(self.moderation_comment_ids),
            "event_rule_indexes": list(self.event_rule_indexes),
            "match_methods": list(self.match_methods),
            "forecast_only": self.forecast_only,
        }

    @classmethod
    def from_record(cls, record: dict) -> "ReleaseRecord":
        return cls(
            entry_id=int(record["entry_id"]),
            role=record["role"],
            subreddit=record["subreddit"],
            comment_ids=tuple(record["comment_ids"]),
            moderated=bool(record["moderated"]),
            violated_rule_indexes=tuple(record.get("violated_rule_indexes", ())),
            violation_types=tuple(record.get("violation_types", ())),
            moderation_comment_ids=tuple(record.get("moderation_comment_ids", ())),
            event_rule_indexes=tuple(record.get("event_rule_indexes", ())),
            match_methods=tuple(record.get("match_methods", ())),
            forecast_only=bool(record.get("forecast_only", False)),
        )


def scrub_record(record: dict, forbidden_strings: Iterable[str] = ()) -> None:
    """Raise ScrubberError if a record leaks text or usernames."""

    def walk(node) -> None:
        if isinstance(node, dict):
            for key, value in node.items():
                if key in _FORBIDDEN_KEYS:
                    raise ScrubberError(f"release record contains a {key!r} field")
                walk(value)
        elif isinstance(node, (list, tuple)):
            for value in node:
                walk(value)

    walk(record)
    serialized = json.dumps(record)
    for text in forbidden_strings:
        if text and text in serialized:
            raise ScrubberError("release record leaks source text")


def _entry_records(entry_id: int, entry: DatasetEntry) -> list[ReleaseRecord]:
    conv = entry.conversation
    records = [
        ReleaseRecord(
            entry_id=entry_id,
            role="moderated",
            subreddit=conv.subreddit,
            comment_ids=tuple(conv.comment_ids()),
            moderated=True,
            violated_rule_indexes=tuple(r.rule_index for r in entry.violated_rules),
            violation_types=tuple(sorted(t.value for t in entry.violation_types)),
            moderation_comment_ids=tuple(
                e.moderation_comment_id for e in entry.events
            ),
            event_rule_indexes=tuple(
                e.matched_rule.rule_index for e in entry.events
            ),
            match_methods=tuple(e.match_method.value for e in entry.events),
            forecast_only=entry.forecast_only,
        )
    ]
    for control in entry.controls:
        records.append(
            ReleaseRecord(
                entry_id=entry_id,
                role="control",
                subreddit=control.subreddit,
                comment_ids=tuple(control.comment_ids()),
                moderated=False,
            )
        )
    return records


def serialize_release(
    dataset: CorpusDataset, check_against_corpus: bool = True
) -> tuple[list[ReleaseRecord], dict[str, str]]:
    """Serialize a dataset to id-only release records.

    Returns the records and the private anonymization map (source author
    name -> release alias). Aborts with ScrubberError if any record would
    leak text or a raw username.
    """
    forbidden: set[str] = set()
    authors: list[str] = []
    seen_authors: set[str] = set()
    for entry in dataset.entries:
        for conv in (entry.conversation, *entry.controls):
            for comment in conv.utterances():
                if check_against_corpus and comment.body:
                    forbidden.add(comment.body)
                if comment.author_pseudonym not in seen_authors:
                    seen_authors.add(comment.author_pseudonym)
                    authors.append(comment.author_pseudonym)
    if check_against_corpus:
        forbidden.update(seen_authors)

    records: list[ReleaseRecord] = []
    for entry_id, entry in enumerate(dataset.entries):
        for record in _entry_records(entry_id, entry):
            scrub_record(record.to_record(), forbidden)
            records.append(record)

    anonymization_map = {
        author: f"author-{index:05d}" for index, author in enumerate(authors)
    }
    return records, anonymization_map


def write_release(records: Iterable[ReleaseRecord], path) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record.to_record(), sort_keys=True) + "\n")
            count += 1
    return count


def read_release(path) -> list[ReleaseRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                records.append(ReleaseRecord.from_record(json.loads(line)))
    return records


def rehydrate(
    records: Iterable[ReleaseRecord], store: CommentStore, rules: RuleBook
) -> CorpusDataset:
    """Rebuild the full dataset from release records and a comment store."""
    from modnorm.corpus.build import BuildReport  # cycle-free local import

    by_entry: dict[int, dict[str, list[ReleaseRecord]]] = {}
    for record in records:
        slot = by_entry.setdefault(record.entry_id, {"moderated": [], "control": []})
        slot[record.role].append(record)

    entries: list[DatasetEntry] = []
    moderator_ids: set[str] = set()
    for entry_id in sorted(by_entry):
        slot = by_entry[entry_id]
        if len(slot["moderated"]) != 1:
            raise ValueError(f"entry {entry_id} must have exactly one moderated record")
        mod_record = slot["moderated"][0]

        def lookup_rule(rule_index: int) -> CommunityRule:
            rule = rules.lookup(mod_record.subreddit, rule_index)
            if rule is None:
                raise KeyError(
                    f"rule {rule_index} of r/{mod_record.subreddit} not in rulebook"
                )
            return rule

        events = []
        for mod_comment_id, rule_index, method in zip(
            mod_record.moderation_comment_ids,
            mod_record.event_rule_indexes,
            mod_record.match_methods,
        ):
            mod_comment = store.get(mod_comment_id)
            if mod_comment is None:
                raise KeyError(f"moderation comment {mod_comment_id} not in store")
            moderator_ids.add(mod_comment.author_pseudonym)
            events.append(
                ModerationEvent(
                    moderation_comment_id=mod_comment_id,
                    removed_comment_id=mod_record.comment_ids[-1],
                    matched_rule=lookup_rule(rule_index),
                    match_method=MatchMethod(method),
                )
            )
        violated_rules = [
            lookup_rule(rule_index)
            for rule_index in mod_record.violated_rule_indexes
        ]

        conversation = reconstruct_thread(
            mod_record.comment_ids[-1], store, moderation_event=events[0] if events else None
        )
        controls = tuple(
            reconstruct_thread(record.comment_ids[-1], store)
            for record in slot["control"]
        )
        entries.append(
            DatasetEntry(
                conversation=conversation,
                violated_rules=tuple(violated_rules),
                controls=controls,
                events=tuple(events),
                forecast_only=mod_record.forecast_only,
            )
        )

    return CorpusDataset(
        entries=entries,
        rules=rules,
        moderator_ids=frozenset(moderator_ids),
        report=BuildReport(entries=len(entries)),
    )
