"""Thread reconstruction: parent-chain walk from a comment back to the post."""

from __future__ import annotations

from typing import Optional

from modnorm.corpus.types import Comment, CommentStore, Conversation, ModerationEvent


class PartialThreadError(Exception):
    """A parent link pointed at a comment missing from the store.

    Carries the deepest reachable prefix (oldest first, ending at the
    requested comment) so callers can keep what survived.
    """

    def __init__(self, missing_id: str, reachable: list[Comment]):
        self.missing_id = missing_id
        self.reachable = reachable
        super().__init__(
            f"broken parent chain: {missing_id} missing; "
            f"recovered {len(reachable)} trailing comments"
        )


def reconstruct_thread(
    removed_comment_id: str,
    store: CommentStore,
    moderation_event: Optional[ModerationEvent] = None,
) -> Conversation:
    """Follow parent links from a comment up to its root post.

    Returns a Conversation with the chain in chronological order and the
    requested comment as the final comment. Raises KeyError when the comment
    itself is unknown and PartialThreadError when an ancestor is missing.
    """
    final = store.get(removed_comment_id)
    if final is None:
        raise KeyError(f"comment {removed_comment_id} not in store")

    lineage = [final]  # leaf-to-root while walking, reversed at the end
    current = final
    while current.parent_id is not None:
        parent = store.get(current.parent_id)
        if parent is None:
            raise PartialThreadError(current.parent_id, list(reversed(lineage)))
        lineage.append(parent)
        current = parent

    lineage.reverse()
    post = lineage[0]
    if len(lineage) == 1:
        return Conversation(
            post=post, chain=(), final_comment=post, moderation_event=moderation_event
        )
    return Conversation(
        post=post,
        chain=tuple(lineage[1:-1]),
        final_comment=lineage[-1],
        moderation_event=moderation_event,
    )
