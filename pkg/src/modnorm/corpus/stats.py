"""Summary statistics over a built corpus."""

from __future__ import annotations

from dataclasses import dataclass, field

from modnorm.corpus.build import CorpusDataset
from modnorm.taxonomy.types import CoarseRuleType


@dataclass
class CorpusStats:
    """Totals, length averages, and per-coarse-type breakdowns.

    Comment counts follow the release convention: one moderated comment per
    entry, one unmoderated comment per control conversation. Length averages
    run over the final comments with a known body; context counts include
    the original post.
    """

    total_comments: int = 0
    moderated_comments: int = 0
    unmoderated_comments: int = 0
    subreddits: int = 0
    rules: int = 0
    moderators: int = 0
    avg_comment_length_words: float = 0.0
    avg_context_per_comment: float = 0.0
    avg_rules_per_community: float = 0.0
    rule_type_counts: dict[str, int] = field(default_factory=dict)
    rule_type_proportions: dict[str, float] = field(default_factory=dict)
    violation_type_counts: dict[str, int] = field(default_factory=dict)
    violation_type_proportions: dict[str, float] = field(default_factory=dict)
    avg_utterances_before_violation: dict[str, float] = field(default_factory=dict)

    def to_record(self) -> dict:
        return {
            "total_comments": self.total_comments,
            "moderated_comments": self.moderated_comments,
            "unmoderated_comments": self.unmoderated_comments,
            "subreddits": self.subreddits,
            "rules": self.rules,
            "moderators": self.moderators,
            "avg_comment_length_words": self.avg_comment_length_words,
            "avg_context_per_comment": self.avg_context_per_comment,
            "avg_rules_per_community": self.avg_rules_per_community,
            "rule_type_counts": self.rule_type_counts,
            "rule_type_proportions": self.rule_type_proportions,
            "violation_type_counts": self.violation_type_counts,
            "violation_type_proportions": self.violation_type_proportions,
            "avg_utterances_before_violation": self.avg_utterances_before_violation,
        }


def corpus_stats(dataset: CorpusDataset) -> CorpusStats:
    stats = CorpusStats()
    stats.moderated_comments = len(dataset.entries)
    stats.unmoderated_comments = sum(len(e.controls) for e in dataset.entries)
    stats.total_comments = stats.moderated_comments + stats.unmoderated_comments
    stats.subreddits = len(
        {e.conversation.subreddit for e in dataset.entries}
    )
    stats.rules = len(dataset.rules)
    stats.moderators = len(dataset.moderator_ids)

    lengths: list[int] = []
    contexts: list[int] = []
    for conversation in dataset.conversations():
        contexts.append(1 + len(conversation.chain))
        body = conversation.final_comment.body
        if body:
            lengths.append(len(body.split()))
    if lengths:
        stats.avg_comment_length_words = sum(lengths) / len(lengths)
    if contexts:
        stats.avg_context_per_comment = sum(contexts) / len(contexts)

    rule_subreddits = dataset.rules.subreddits
    if rule_subreddits:
        stats.avg_rules_per_community = len(dataset.rules) / len(rule_subreddits)

    rule_counts = {t: 0 for t in CoarseRuleType}
    for rule in dataset.rules:
        for coarse in rule.coarse_types:
            rule_counts[coarse] += 1
    violation_counts = {t: 0 for t in CoarseRuleType}
    length_sums = {t: 0 for t in CoarseRuleType}
    for entry in dataset.entries:
        for coarse in entry.violation_types:
            violation_counts[coarse] += 1
            length_sums[coarse] += entry.conversation.length

    total_rule_tags = sum(rule_counts.values())
    total_violation_tags = sum(violation_counts.values())
    for coarse in CoarseRuleType:
        name = coarse.value
        stats.rule_type_counts[name] = rule_counts[coarse]
        stats.violation_type_counts[name] = violation_counts[coarse]
        if total_rule_tags:
            stats.rule_type_proportions[name] = rule_counts[coarse] / total_rule_tags
        if total_violation_tags:
            stats.violation_type_proportions[name] = (
                violation_counts[coarse] / total_violation_tags
            )
        if violation_counts[coarse]:
            stats.avg_utterances_before_violation[name] = (
                length_sums[coarse] / violation_counts[coarse]
            )
    return stats
