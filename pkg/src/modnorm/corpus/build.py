"""End-to-end corpus construction from a comment dump and a rules file."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, Optional

from modnorm.corpus.archive import ArchiveClient, fetch_removed_body
from modnorm.corpus.controls import pair_controls
from modnorm.corpus.events import detect_moderation_event
from modnorm.corpus.threads import PartialThreadError, reconstruct_thread
from modnorm.corpus.types import (
    Comment,
    CommentStore,
    CommunityRule,
    Conversation,
    ModerationEvent,
    RuleBook,
)
from modnorm.taxonomy.types import CoarseRuleType

log = logging.getLogger(__name__)

# Removed comments in dumps carry an empty or placeholder body until restored.
_REMOVED_BODY_PLACEHOLDERS = {"", "[removed]", "[deleted]"}


@dataclass(frozen=True)
class DatasetEntry:
    """A moderated conversation, its cited rules, and its paired controls."""

    conversation: Conversation
    violated_rules: tuple[CommunityRule, ...]
    controls: tuple[Conversation, ...]
    events: tuple[ModerationEvent, ...]
    forecast_only: bool = False

    @property
    def violation_types(self) -> FrozenSet[CoarseRuleType]:
        types: set[CoarseRuleType] = set()
        for rule in self.violated_rules:
            types.update(rule.coarse_types)
        return frozenset(types)


@dataclass
class BuildReport:
    """Counters from a corpus build."""

    moderation_events: int = 0
    entries: int = 0
    forecast_only: int = 0
    skipped_missing_parent: int = 0
    skipped_unremoved_parent: int = 0
    skipped_partial_thread: int = 0


@dataclass
class CorpusDataset:
    """The built corpus: moderated entries with controls, plus the rules."""

    entries: list[DatasetEntry]
    rules: RuleBook
    moderator_ids: frozenset[str] = frozenset()
    report: BuildReport = field(default_factory=BuildReport)

    def conversations(self) -> list[Conversation]:
        out = []
        for entry in self.entries:
            out.append(entry.conversation)
            out.extend(entry.controls)
        return out


def eligible_control_finals(
    store: CommentStore, post_id: str, event_comment_ids: FrozenSet[str]
) -> list[Comment]:
    """Leaf comments whose path back to the post is clean.

    A path is clean when no comment on it was removed and none is a
    moderation comment. Leaves are comments without replies.
    """
    finals = []
    for comment in store.in_post(post_id):
        if store.children_of(comment.comment_id):
            continue
        if _path_is_clean(store, comment, event_comment_ids):
            finals.append(comment)
    finals.sort(key=lambda c: (c.created_utc, c.comment_id))
    return finals


def _path_is_clean(
    store: CommentStore, leaf: Comment, event_comment_ids: FrozenSet[str]
) -> bool:
    current: Optional[Comment] = leaf
    while current is not None:
        if current.removed or current.comment_id in event_comment_ids:
            return False
        if current.parent_id is None:
            return True
        current = store.get(current.parent_id)
    return False  # broken chain


def build_dataset(
    comments: Iterable[Comment],
    rules: Iterable[CommunityRule],
    archive_client: Optional[ArchiveClient] = None,
) -> CorpusDataset:
    """Detect moderation events, reconstruct threads, and pair controls.

    Moderator comments are matched against their community's rules; each
    match yields a moderated conversation ending at the removed parent
    comment. Removed bodies are restored from the archive when available;
    conversations without a restorable body are kept and flagged
    forecast-only.
    """
    store = comments if isinstance(comments, CommentStore) else CommentStore(comments)
    rulebook = rules if isinstance(rules, RuleBook) else RuleBook(rules)
    report = BuildReport()

    # Collect events grouped by removed comment; a removed comment may be
    # cited by several moderation comments (several violated rules).
    events_by_removed: dict[str, list[ModerationEvent]] = {}
    moderator_ids: set[str] = set()
    moderator_comments = sorted(
        (c for c in store if c.author_is_moderator and c.parent_id is not None),
        key=lambda c: (c.created_utc, c.comment_id),
    )
    for comment in moderator_comments:
        match = detect_moderation_event(
            comment, rulebook.for_subreddit(comment.subreddit)
        )
        if match is None:
            continue
        rule, method = match
        parent = store.get(comment.parent_id)
        if parent is None:
            report.skipped_missing_parent += 1
            continue
        if not parent.removed:
            report.skipped_unremoved_parent += 1
            continue
        event = ModerationEvent(
            moderation_comment_id=comment.comment_id,
            removed_comment_id=parent.comment_id,
            matched_rule=rule,
            match_method=method,
        )
        events_by_removed.setdefault(parent.comment_id, []).append(event)
        moderator_ids.add(comment.author_pseudonym)
        report.moderation_events += 1

    event_comment_ids = frozenset(
        event.moderation_comment_id
        for events in events_by_removed.values()
        for event in events
    )

    entries: list[DatasetEntry] = []
    for removed_id in sorted(events_by_removed):
        events = events_by_removed[removed_id]
        removed = store.get(removed_id)

        forecast_only = False
        if removed.body in _REMOVED_BODY_PLACEHOLDERS:
            body = (
                fetch_removed_body(removed_id, archive_client)
                if archive_client is not None
                else None
            )
            if body is None:
                forecast_only = True
                report.forecast_only += 1
            else:
                store.with_body(removed_id, body)

        try:
            conversation = reconstruct_thread(
                removed_id, store, moderation_event=events[0]
            )
        except PartialThreadError as exc:
            log.warning("skipping %s: %s", removed_id, exc)
            report.skipped_partial_thread += 1
            continue

        violated_rules: list[CommunityRule] = []
        for event in events:
            if event.matched_rule not in violated_rules:
                violated_rules.append(event.matched_rule)

        candidates = []
        for final in eligible_control_finals(
            store, conversation.post.post_id, event_comment_ids
        ):
            try:
                candidates.append(reconstruct_thread(final.comment_id, store))
            except PartialThreadError:
                continue
        controls = pair_controls(conversation, candidates)

        entries.append(
            DatasetEntry(
                conversation=conversation,
                violated_rules=tuple(violated_rules),
                controls=tuple(controls),
                events=tuple(events),
                forecast_only=forecast_only,
            )
        )
        report.entries += 1

    return CorpusDataset(
        entries=entries,
        rules=rulebook,
        moderator_ids=frozenset(moderator_ids),
        report=report,
    )
