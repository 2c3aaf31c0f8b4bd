"""Moderation-event detection from moderator comments."""

from __future__ import annotations

import logging
import re
from typing import Optional, Sequence

from modnorm.corpus.types import Comment, CommunityRule, MatchMethod

log = logging.getLogger(__name__)

# "rule" followed by up to a few punctuation/whitespace characters and a
# 1-2 digit number ("Rule 2", "rule #12", "Rule: 3").
_RULE_NUMBER_RE = re.compile(r"\brule\W{0,3}(\d{1,2})\b", re.IGNORECASE)

# Shorter normalized rule texts ("spam") would match almost anything.
MIN_VERBATIM_LENGTH = 8


def normalize_text(text: str) -> str:
    """Lowercase, collapse whitespace, strip punctuation at word boundaries.

    Inner punctuation survives so contractions like "don't" keep matching.
    """
    tokens = []
    for token in text.lower().split():
        token = token.strip("!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~")
        if token:
            tokens.append(token)
    return " ".join(tokens)


def detect_moderation_event(
    comment: Comment, rules: Sequence[CommunityRule]
) -> Optional[tuple[CommunityRule, MatchMethod]]:
    """Match a moderator comment against its community's rules.

    Rule-number phrases ("this violates Rule 2") take precedence over
    verbatim quotes of a rule's text. The first resolvable rule number wins;
    verbatim matching scans rules in rule-number order. Returns None when
    nothing matches.
    """
    if not comment.author_is_moderator:
        return None
    by_index = {rule.rule_index: rule for rule in rules}

    for match in _RULE_NUMBER_RE.finditer(comment.body):
        index = int(match.group(1))
        rule = by_index.get(index)
        if rule is not None:
            return rule, MatchMethod.RULE_NUMBER_PHRASE
        log.debug(
            "moderator comment %s references rule %d, not found in r/%s",
            comment.comment_id,
            index,
            comment.subreddit,
        )

    body_norm = normalize_text(comment.body)
    for rule in sorted(rules, key=lambda r: r.rule_index):
        for rule_text in (rule.description, rule.short_name):
            text_norm = normalize_text(rule_text)
            if len(text_norm) >= MIN_VERBATIM_LENGTH and text_norm in body_norm:
                return rule, MatchMethod.VERBATIM_RULE_TEXT
    return None
