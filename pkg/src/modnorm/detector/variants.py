"""Detector input variants: which context the model sees."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import FrozenSet

from modnorm.corpus.types import Conversation
from modnorm.taxonomy.types import CoarseRuleType


class DetectorVariant(enum.Enum):
    COMMENT = "comment"
    HISTORY = "history"
    COMMUNITY = "community"
    HISTORY_COMMUNITY = "history_community"

    @property
    def uses_history(self) -> bool:
        return self in (DetectorVariant.HISTORY, DetectorVariant.HISTORY_COMMUNITY)

    @property
    def uses_community(self) -> bool:
        return self in (DetectorVariant.COMMUNITY, DetectorVariant.HISTORY_COMMUNITY)


@dataclass(frozen=True)
class DetectionExample:
    """A conversation with its per-coarse-type violation labels.

    Controls carry an empty label set; moderated examples carry every coarse
    type of their violated rules.
    """

    conversation: Conversation
    violation_types: FrozenSet[CoarseRuleType] = frozenset()

    @property
    def subreddit(self) -> str:
        return self.conversation.subreddit

    def label(self, coarse_type: CoarseRuleType) -> int:
        return 1 if coarse_type in self.violation_types else 0

    @property
    def violates_any(self) -> int:
        return 1 if self.violation_types else 0


def community_prefix(subreddit: str, text: str) -> str:
    return f"r/{subreddit} {text}"


def build_input(
    example: DetectionExample,
    variant: DetectorVariant,
    prefix_all_utterances: bool = False,
) -> list[str]:
    """Ordered utterance texts for one example under a variant.

    Community variants prepend the community name to the final comment; with
    ``prefix_all_utterances`` the prefix is applied to every utterance
    instead.
    """
    conversation = example.conversation
    final_text = conversation.final_comment.body
    subreddit = conversation.subreddit

    if variant is DetectorVariant.COMMENT:
        return [final_text]
    if variant is DetectorVariant.COMMUNITY:
        return [community_prefix(subreddit, final_text)]

    texts = [c.body for c in conversation.utterances()]
    if variant is DetectorVariant.HISTORY_COMMUNITY:
        if prefix_all_utterances:
            texts = [community_prefix(subreddit, t) for t in texts]
        else:
            texts[-1] = community_prefix(subreddit, texts[-1])
    return texts
