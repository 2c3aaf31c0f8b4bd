"""Shared test utilities: tiny training configs and independent oracles."""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Optional, Sequence

from modnorm.corpus.types import Comment, Conversation
from modnorm.encoding import EncoderSettings
from modnorm.training import TrainConfig


class DictArchiveClient:
    """Archive stub over an in-memory dict."""

    retries = 0

    def __init__(self, bodies: dict[str, str]):
        self.bodies = bodies

    def get_body(self, comment_id: str) -> Optional[str]:
        return self.bodies.get(comment_id)


def tiny_train_config(seed: int = 0, **overrides) -> TrainConfig:
    """Small, fast settings that let tiny encoders learn in a few epochs."""
    defaults = dict(
        epochs=10,
        learning_rate=1e-3,
        batch_size=8,
        patience=10,
        seed=seed,
        context_hidden=32,
        context_layers=2,
        encoder=EncoderSettings(
            checkpoint="tiny",
            max_length=48,
            hidden_size=64,
            num_layers=2,
            num_attention_heads=2,
            intermediate_size=128,
        ),
    )
    defaults.update(overrides)
    return TrainConfig(**defaults)


def make_comment(
    comment_id: str,
    parent_id: Optional[str],
    post_id: str = "post-1",
    subreddit: str = "testsub",
    author: str = "user-a",
    body: str = "hello world",
    created_utc: int = 0,
    removed: bool = False,
    moderator: bool = False,
) -> Comment:
    return Comment(
        comment_id=comment_id,
        parent_id=parent_id,
        post_id=post_id,
        subreddit=subreddit,
        author_pseudonym=author,
        body=body,
        created_utc=created_utc,
        removed=removed,
        author_is_moderator=moderator,
    )


def chain_conversation(
    n_comments: int,
    post_id: str = "post-1",
    subreddit: str = "testsub",
    prefix: str = "c",
    base_utc: int = 100,
) -> Conversation:
    """A post followed by n_comments chained replies."""
    post = make_comment(f"{prefix}-post", None, post_id, subreddit, created_utc=base_utc)
    comments = [post]
    for i in range(n_comments):
        comments.append(
            make_comment(
                f"{prefix}-{i}",
                comments[-1].comment_id,
                post_id,
                subreddit,
                created_utc=base_utc + (i + 1) * 10,
            )
        )
    if n_comments == 0:
        return Conversation(post=post, chain=(), final_comment=post)
    return Conversation(post=post, chain=tuple(comments[1:-1]), final_comment=comments[-1])


# ---------------------------------------------------------------------------
# Independent oracles (deliberately separate code paths from the package).
# ---------------------------------------------------------------------------


def oracle_macro_f1(decisions: Sequence[int], labels: Sequence[int]) -> Fraction:
    """Macro F1 from raw confusion counts in exact arithmetic."""
    tp = sum(1 for d, l in zip(decisions, labels) if d == 1 and l == 1)
    fp = sum(1 for d, l in zip(decisions, labels) if d == 1 and l == 0)
    tn = sum(1 for d, l in zip(decisions, labels) if d == 0 and l == 0)
    fn = sum(1 for d, l in zip(decisions, labels) if d == 0 and l == 1)

    def f1(a: int, b: int, c: int) -> Fraction:
        denominator = 2 * a + b + c
        return Fraction(0) if denominator == 0 else Fraction(2 * a, denominator)

    return (f1(tp, fp, fn) + f1(tn, fn, fp)) / 2


def oracle_tune_threshold(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Exhaustive grid evaluation, smallest threshold attaining best F1."""
    best_threshold, best = 0.0, Fraction(-1)
    for i in range(101):
        threshold = i / 100
        decisions = [1 if s >= threshold else 0 for s in scores]
        value = oracle_macro_f1(decisions, labels)
        if value > best:
            best = value
            best_threshold = threshold
    return best_threshold


def oracle_pair_controls(target_len: int, candidates) -> list:
    """Brute force over all subsets of size <= 2 minimizing total length gap.

    Ties inside the chosen subset order by (distance, final created_utc,
    final comment id), mirroring the documented tie-break.
    """
    def sort_key(conversation):
        return (
            abs(conversation.length - target_len),
            conversation.final_comment.created_utc,
            conversation.final_comment.comment_id,
        )

    size = min(2, len(candidates))
    if size == 0:
        return []
    best_subset = None
    best_cost = None
    for subset in itertools.combinations(range(len(candidates)), size):
        chosen = [candidates[i] for i in subset]
        cost = (
            sum(abs(c.length - target_len) for c in chosen),
            tuple(sorted(sort_key(c) for c in chosen)),
        )
        if best_cost is None or cost < best_cost:
            best_cost = cost
            best_subset = chosen
    return sorted(best_subset, key=sort_key)
