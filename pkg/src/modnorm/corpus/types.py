"""Core corpus domain types: comments, conversations, rules, moderation events."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, Iterator, Optional, Sequence

from modnorm.taxonomy.types import CoarseRuleType, FineRuleType, coarsen


@dataclass(frozen=True)
class Comment:
    """One utterance in a thread. ``parent_id`` of None marks the root post."""

    comment_id: str
    parent_id: Optional[str]
    post_id: str
    subreddit: str
    author_pseudonym: str
    body: str
    created_utc: int
    removed: bool = False
    author_is_moderator: bool = False

    def __post_init__(self) -> None:
        if self.parent_id == self.comment_id:
            raise ValueError(f"comment {self.comment_id} is its own parent")

    @property
    def is_root(self) -> bool:
        return self.parent_id is None


@dataclass(frozen=True)
class CommunityRule:
    """A community rule with its fine and coarse type labels."""

    subreddit: str
    rule_index: int  # 1-based within its subreddit
    short_name: str
    description: str
    fine_types: FrozenSet[FineRuleType] = frozenset()

    def __post_init__(self) -> None:
        if self.rule_index < 1:
            raise ValueError("rule_index is 1-based")
        object.__setattr__(self, "fine_types", frozenset(self.fine_types))

    @property
    def coarse_types(self) -> FrozenSet[CoarseRuleType]:
        return coarsen(self.fine_types)

    @property
    def key(self) -> tuple[str, int]:
        return (self.subreddit, self.rule_index)

    def display_text(self) -> str:
        """Rule text presented to models: short name and description combined."""
        if self.short_name and self.description:
            return f"{self.short_name}: {self.description}"
        return self.short_name or self.description


class MatchMethod(enum.Enum):
    RULE_NUMBER_PHRASE = "rule_number_phrase"
    VERBATIM_RULE_TEXT = "verbatim_rule_text"


@dataclass(frozen=True)
class ModerationEvent:
    """Links a moderator's explanation comment to the removed comment and rule."""

    moderation_comment_id: str
    removed_comment_id: str
    matched_rule: CommunityRule
    match_method: MatchMethod

    @property
    def violation_types(self) -> FrozenSet[CoarseRuleType]:
        return self.matched_rule.coarse_types


@dataclass(frozen=True)
class Conversation:
    """A root post plus the parent-chain of comments ending at a final comment.

    ``chain`` holds the comments strictly between the post and the final
    comment, oldest first. The conversation length counts utterances after
    the post: a final comment replying directly to the post has length 1,
    and a conversation whose final comment is the post itself has length 0.
    """

    post: Comment
    chain: tuple[Comment, ...]
    final_comment: Comment
    moderation_event: Optional[ModerationEvent] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "chain", tuple(self.chain))
        previous = self.post
        for comment in (*self.chain, self.final_comment):
            if comment.comment_id == self.post.comment_id:
                continue  # final comment may be the post itself
            if comment.parent_id != previous.comment_id:
                raise ValueError(
                    f"broken chain: {comment.comment_id} does not reply to "
                    f"{previous.comment_id}"
                )
            previous = comment

    @property
    def moderated(self) -> bool:
        return self.moderation_event is not None

    @property
    def subreddit(self) -> str:
        return self.final_comment.subreddit

    @property
    def length(self) -> int:
        """Utterances between the post and the final comment, post excluded."""
        if self.final_comment.comment_id == self.post.comment_id:
            return 0
        return len(self.chain) + 1

    def utterances(self) -> list[Comment]:
        """All utterances oldest first, including the post and final comment."""
        if self.final_comment.comment_id == self.post.comment_id:
            return [self.post]
        return [self.post, *self.chain, self.final_comment]

    def comment_ids(self) -> list[str]:
        return [c.comment_id for c in self.utterances()]


class CommentStore:
    """Immutable comment lookup by id, with parent/child and post indexes.

    Built once by a single writer; afterwards reads are side-effect free and
    safe to share across threads.
    """

    def __init__(self, comments: Iterable[Comment]):
        self._by_id: dict[str, Comment] = {}
        self._children: dict[str, list[str]] = {}
        self._by_post: dict[str, list[str]] = {}
        for comment in comments:
            if comment.comment_id in self._by_id:
                raise ValueError(f"duplicate comment id: {comment.comment_id}")
            self._by_id[comment.comment_id] = comment
            self._by_post.setdefault(comment.post_id, []).append(comment.comment_id)
            if comment.parent_id is not None:
                self._children.setdefault(comment.parent_id, []).append(
                    comment.comment_id
                )

    def __len__(self) -> int:
        return len(self._by_id)

    def __contains__(self, comment_id: str) -> bool:
        return comment_id in self._by_id

    def __iter__(self) -> Iterator[Comment]:
        return iter(self._by_id.values())

    def get(self, comment_id: str) -> Optional[Comment]:
        return self._by_id.get(comment_id)

    def children_of(self, comment_id: str) -> list[Comment]:
        return [self._by_id[cid] for cid in self._children.get(comment_id, [])]

    def in_post(self, post_id: str) -> list[Comment]:
        return [self._by_id[cid] for cid in self._by_post.get(post_id, [])]

    def with_body(self, comment_id: str, body: str) -> Comment:
        """Return a copy of the stored comment carrying a restored body."""
        comment = self._by_id[comment_id]
        restored = Comment(
            comment_id=comment.comment_id,
            parent_id=comment.parent_id,
            post_id=comment.post_id,
            subreddit=comment.subreddit,
            author_pseudonym=comment.author_pseudonym,
            body=body,
            created_utc=comment.created_utc,
            removed=comment.removed,
            author_is_moderator=comment.author_is_moderator,
        )
        self._by_id[comment_id] = restored
        return restored


class RuleBook:
    """Community rules indexed by subreddit and rule number."""

    def __init__(self, rules: Iterable[CommunityRule]):
        self._by_subreddit: dict[str, dict[int, CommunityRule]] = {}
        for rule in rules:
            per_sub = self._by_subreddit.setdefault(rule.subreddit, {})
            if rule.rule_index in per_sub:
                raise ValueError(
                    f"duplicate rule index {rule.rule_index} in r/{rule.subreddit}"
                )
            per_sub[rule.rule_index] = rule

    def __len__(self) -> int:
        return sum(len(v) for v in self._by_subreddit.values())

    def __iter__(self) -> Iterator[CommunityRule]:
        for subreddit in self._by_subreddit:
            yield from self.for_subreddit(subreddit)

    @property
    def subreddits(self) -> list[str]:
        return sorted(self._by_subreddit)

    def for_subreddit(self, subreddit: str) -> list[CommunityRule]:
        """Rules of one community ordered by rule number."""
        per_sub = self._by_subreddit.get(subreddit, {})
        return [per_sub[idx] for idx in sorted(per_sub)]

    def lookup(self, subreddit: str, rule_index: int) -> Optional[CommunityRule]:
        return self._by_subreddit.get(subreddit, {}).get(rule_index)
