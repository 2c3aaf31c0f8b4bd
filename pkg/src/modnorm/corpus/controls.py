"""Control pairing: length-matched unmoderated conversations from the same post."""

from __future__ import annotations

from typing import Sequence

from modnorm.corpus.types import Conversation

MAX_CONTROLS = 2


def pair_controls(
    target: Conversation, candidates: Sequence[Conversation]
) -> list[Conversation]:
    """Pick up to two candidates closest in length to the target.

    Ties break on earlier final-comment timestamp, then lexicographic
    comment id. Candidates must share the target's post and carry no
    moderation event.
    """
    for candidate in candidates:
        if candidate.post.post_id != target.post.post_id:
            raise ValueError(
                f"candidate {candidate.final_comment.comment_id} is from another post"
            )
        if candidate.moderated:
            raise ValueError(
                f"candidate {candidate.final_comment.comment_id} is moderated"
            )

    ranked = sorted(
        candidates,
        key=lambda c: (
            abs(c.length - target.length),
            c.final_comment.created_utc,
            c.final_comment.comment_id,
        ),
    )
    return ranked[:MAX_CONTROLS]
