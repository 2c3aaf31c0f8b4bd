"""Rule-type taxonomy: 21 fine-grained categories and the 9 coarse buckets."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import AbstractSet, FrozenSet, Iterable


class FineRuleType(enum.Enum):
    """Fine-grained community rule categories. Serialized names are stable."""

    ADVERTISING = "Advertising"
    MODERATION_ENFORCEMENT = "Moderation Enforcement"
    COPYRIGHT_PIRACY = "Copyright/Piracy"
    DOXXING = "Doxxing"
    FORMAT = "Format"
    HARASSMENT = "Harassment"
    HATE_SPEECH = "Hate Speech"
    IMAGES = "Images"
    OUTSIDE_CONTENT = "Outside Content"
    LOW_QUALITY_CONTENT = "Low-Quality Content"
    NSFW = "NSFW"
    OFF_TOPIC = "Off-topic"
    PERSONAL_ARMY = "Personal Army"
    PERSONALITY = "Personality"
    POLITICS = "Politics"
    REDDIQUETTE = "Reddiquette"
    REPOSTING = "Reposting"
    SPAM = "Spam"
    SPOILERS = "Spoilers"
    TROLLING = "Trolling"
    VOTING = "Voting"

    @classmethod
    def from_name(cls, name: str) -> "FineRuleType":
        for member in cls:
            if member.value == name:
                return member
        raise ValueError(f"unknown fine rule type: {name!r}")


class CoarseRuleType(enum.Enum):
    """Coarse rule categories used for violation detection."""

    INCIVILITY = "Incivility"
    HARASSMENT = "Harassment"
    SPAM = "Spam"
    FORMAT = "Format"
    CONTENT = "Content"
    OFF_TOPIC = "Off-topic"
    HATE_SPEECH = "Hate speech"
    TROLLING = "Trolling"
    META_RULES = "Meta-rules"

    @classmethod
    def from_name(cls, name: str) -> "CoarseRuleType":
        for member in cls:
            if member.value == name:
                return member
        raise ValueError(f"unknown coarse rule type: {name!r}")


# Every fine type maps to exactly one coarse type (total, surjective).
# Advertising is folded into Spam; see docs/data-format notes.
COARSE_FROM_FINE: dict[FineRuleType, CoarseRuleType] = {
    FineRuleType.PERSONALITY: CoarseRuleType.INCIVILITY,
    FineRuleType.HARASSMENT: CoarseRuleType.HARASSMENT,
    FineRuleType.DOXXING: CoarseRuleType.HARASSMENT,
    FineRuleType.SPAM: CoarseRuleType.SPAM,
    FineRuleType.REPOSTING: CoarseRuleType.SPAM,
    FineRuleType.COPYRIGHT_PIRACY: CoarseRuleType.SPAM,
    FineRuleType.ADVERTISING: CoarseRuleType.SPAM,
    FineRuleType.FORMAT: CoarseRuleType.FORMAT,
    FineRuleType.IMAGES: CoarseRuleType.FORMAT,
    FineRuleType.OUTSIDE_CONTENT: CoarseRuleType.FORMAT,
    FineRuleType.LOW_QUALITY_CONTENT: CoarseRuleType.CONTENT,
    FineRuleType.NSFW: CoarseRuleType.CONTENT,
    FineRuleType.SPOILERS: CoarseRuleType.CONTENT,
    FineRuleType.OFF_TOPIC: CoarseRuleType.OFF_TOPIC,
    FineRuleType.POLITICS: CoarseRuleType.OFF_TOPIC,
    FineRuleType.HATE_SPEECH: CoarseRuleType.HATE_SPEECH,
    FineRuleType.TROLLING: CoarseRuleType.TROLLING,
    FineRuleType.PERSONAL_ARMY: CoarseRuleType.TROLLING,
    FineRuleType.VOTING: CoarseRuleType.META_RULES,
    FineRuleType.MODERATION_ENFORCEMENT: CoarseRuleType.META_RULES,
    FineRuleType.REDDIQUETTE: CoarseRuleType.META_RULES,
}


def coarsen(fine_types: Iterable[FineRuleType]) -> FrozenSet[CoarseRuleType]:
    """Map a set of fine rule types onto their coarse categories."""
    return frozenset(COARSE_FROM_FINE[fine] for fine in fine_types)


@dataclass(frozen=True)
class AnnotatedRule:
    """A rule description with its gold fine-type label set."""

    text: str
    labels: FrozenSet[FineRuleType]

    def __post_init__(self) -> None:
        if not self.labels:
            raise ValueError("annotated rule must carry at least one label")
        object.__setattr__(self, "labels", frozenset(self.labels))

    def has(self, fine_type: FineRuleType) -> bool:
        return fine_type in self.labels
