"""Training and evaluation pair construction for the rule-text model."""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from modnorm.corpus.build import CorpusDataset, DatasetEntry
from modnorm.corpus.types import CommunityRule, Conversation, RuleBook


class PairProvenance(enum.Enum):
    OBSERVED_POSITIVE = "observed_positive"
    UNMODERATED_NEGATIVE = "unmoderated_negative"
    MISMATCHED_RULE_NEGATIVE = "mismatched_rule_negative"
    AUGMENTED_EVAL_NEGATIVE = "augmented_eval_negative"


@dataclass(frozen=True)
class RulePairExample:
    """A (conversation, rule) pair with its label and origin."""

    conversation: Conversation
    rule: CommunityRule
    label: int
    provenance: PairProvenance

    def __post_init__(self) -> None:
        if self.provenance is PairProvenance.OBSERVED_POSITIVE and self.label != 1:
            raise ValueError("observed positives must be labeled 1")
        if (
            self.provenance
            in (
                PairProvenance.UNMODERATED_NEGATIVE,
                PairProvenance.MISMATCHED_RULE_NEGATIVE,
                PairProvenance.AUGMENTED_EVAL_NEGATIVE,
            )
            and self.label != 0
        ):
            raise ValueError("negative provenances must be labeled 0")


@dataclass
class PairSet(Sequence[RulePairExample]):
    """Built pairs plus skip counters."""

    pairs: list[RulePairExample] = field(default_factory=list)
    skipped_no_mismatch_candidates: int = 0
    skipped_zero_rule_conversations: int = 0

    def __len__(self) -> int:
        return len(self.pairs)

    def __getitem__(self, index):
        return self.pairs[index]

    def __iter__(self) -> Iterator[RulePairExample]:
        return iter(self.pairs)


def build_training_pairs(
    dataset: CorpusDataset,
    rules: RuleBook | None = None,
    seed: int = 0,
    mismatched_per_conversation: int = 1,
) -> PairSet:
    """Construct the training pairs for the rule-text model.

    Per moderated conversation: one positive per violated rule, one negative
    carrying the violated rule's text per paired control, and seeded
    mismatched-rule negatives drawn uniformly from the subreddit's
    non-violated rules. Conversations in single-rule communities simply skip
    the mismatched draw.
    """
    rules = rules if rules is not None else dataset.rules
    rng = random.Random(seed)
    out = PairSet()
    for entry in dataset.entries:
        if entry.forecast_only:
            continue
        conversation = entry.conversation
        violated = list(entry.violated_rules)
        if not violated:
            continue
        for rule in violated:
            out.pairs.append(
                RulePairExample(
                    conversation, rule, 1, PairProvenance.OBSERVED_POSITIVE
                )
            )
        primary = violated[0]
        for control in entry.controls:
            out.pairs.append(
                RulePairExample(
                    control, primary, 0, PairProvenance.UNMODERATED_NEGATIVE
                )
            )
        violated_keys = {rule.key for rule in violated}
        candidates = [
            rule
            for rule in rules.for_subreddit(conversation.subreddit)
            if rule.key not in violated_keys
        ]
        if not candidates:
            out.skipped_no_mismatch_candidates += 1
            continue
        for _ in range(mismatched_per_conversation):
            chosen = rng.choice(candidates)
            out.pairs.append(
                RulePairExample(
                    conversation, chosen, 0, PairProvenance.MISMATCHED_RULE_NEGATIVE
                )
            )
    return out


def build_augmented_eval(
    test_items: Sequence[tuple[Conversation, Sequence[CommunityRule]]],
    rules: RuleBook,
) -> PairSet:
    """Cross each test conversation with every rule of its subreddit.

    Pairs observed as violated in the test set are positive; every other
    pair is an augmented negative. Conversations from communities with no
    known rules are excluded with a counter.
    """
    out = PairSet()
    for conversation, violated in test_items:
        community_rules = rules.for_subreddit(conversation.subreddit)
        if not community_rules:
            out.skipped_zero_rule_conversations += 1
            continue
        violated_keys = {rule.key for rule in violated}
        for rule in community_rules:
            if rule.key in violated_keys:
                out.pairs.append(
                    RulePairExample(
                        conversation, rule, 1, PairProvenance.OBSERVED_POSITIVE
                    )
                )
            else:
                out.pairs.append(
                    RulePairExample(
                        conversation, rule, 0, PairProvenance.AUGMENTED_EVAL_NEGATIVE
                    )
                )
    return out


def eval_items_from_entries(
    entries: Sequence[DatasetEntry],
) -> list[tuple[Conversation, Sequence[CommunityRule]]]:
    """Test items for augmented evaluation: moderated convs and their controls."""
    items: list[tuple[Conversation, Sequence[CommunityRule]]] = []
    for entry in entries:
        if entry.forecast_only:
            continue
        items.append((entry.conversation, list(entry.violated_rules)))
        for control in entry.controls:
            items.append((control, []))
    return items
