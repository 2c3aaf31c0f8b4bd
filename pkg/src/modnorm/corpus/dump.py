"""Reading and writing the newline-delimited comment dump and rules files."""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import IO, Iterable, Iterator, Sequence, Union

from modnorm.corpus.types import Comment, CommunityRule
from modnorm.taxonomy.types import FineRuleType

log = logging.getLogger(__name__)

# Dump field names -> Comment attributes. One JSON object per line.
_REQUIRED_FIELDS = ("id", "post_id", "subreddit", "author", "body", "created_utc")

# Below this many lines the malformed-fraction abort is not applied; tiny
# hand-made dumps with a bad line or two should not be fatal.
MALFORMED_CHECK_MIN_LINES = 100
MAX_MALFORMED_FRACTION = 0.10


class IngestionError(Exception):
    """Raised when a dump stream is unreadable or too dirty to trust."""


class ParseResult(Sequence[Comment]):
    """Comments parsed from a dump plus skip accounting."""

    def __init__(self, comments: list[Comment], skipped: int, total_lines: int):
        self.comments = comments
        self.skipped = skipped
        self.total_lines = total_lines

    def __len__(self) -> int:
        return len(self.comments)

    def __getitem__(self, index):
        return self.comments[index]

    def __iter__(self) -> Iterator[Comment]:
        return iter(self.comments)


def _comment_from_record(record: dict) -> Comment:
    for name in _REQUIRED_FIELDS:
        if name not in record:
            raise KeyError(name)
    return Comment(
        comment_id=str(record["id"]),
        parent_id=None if record.get("parent_id") in (None, "") else str(record["parent_id"]),
        post_id=str(record["post_id"]),
        subreddit=str(record["subreddit"]),
        author_pseudonym=str(record["author"]),
        body=str(record["body"]),
        created_utc=int(record["created_utc"]),
        removed=bool(record.get("removed", False)),
        author_is_moderator=bool(record.get("is_moderator", False)),
    )


def parse_dump(stream: Union[IO[str], Iterable[str]]) -> ParseResult:
    """Parse a newline-delimited comment dump.

    Malformed lines are counted and skipped. The parse aborts only when more
    than 10% of a non-trivial dump (>= 100 lines) is malformed.
    """
    comments: list[Comment] = []
    skipped = 0
    total = 0
    try:
        for line in stream:
            if not line.strip():
                continue
            total += 1
            try:
                record = json.loads(line)
                comments.append(_comment_from_record(record))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError):
                skipped += 1
    except (OSError, UnicodeDecodeError) as exc:
        raise IngestionError(f"unreadable dump stream: {exc}") from exc

    if total >= MALFORMED_CHECK_MIN_LINES and skipped > MAX_MALFORMED_FRACTION * total:
        raise IngestionError(
            f"{skipped} of {total} dump lines were malformed "
            f"(> {MAX_MALFORMED_FRACTION:.0%}); refusing to continue"
        )
    if skipped:
        log.warning("skipped %d malformed dump lines of %d", skipped, total)
    return ParseResult(comments, skipped, total)


def parse_dump_file(path: Union[str, Path]) -> ParseResult:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_dump(handle)


def write_dump(comments: Iterable[Comment], path: Union[str, Path]) -> int:
    """Write comments as a dump file; returns the number of lines written."""
    count = 0
    with open(path, "w", encoding="utf-8") as handle:
        for comment in comments:
            handle.write(json.dumps(comment_record(comment), sort_keys=True) + "\n")
            count += 1
    return count


def comment_record(comment: Comment) -> dict:
    return {
        "id": comment.comment_id,
        "parent_id": comment.parent_id,
        "post_id": comment.post_id,
        "subreddit": comment.subreddit,
        "author": comment.author_pseudonym,
        "body": comment.body,
        "created_utc": comment.created_utc,
        "removed": comment.removed,
        "is_moderator": comment.author_is_moderator,
    }


def load_rules(path: Union[str, Path]) -> list[CommunityRule]:
    """Read a rules file: one JSON record per rule."""
    rules: list[CommunityRule] = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            if not line.strip():
                continue
            record = json.loads(line)
            rules.append(
                CommunityRule(
                    subreddit=record["subreddit"],
                    rule_index=int(record["rule_index"]),
                    short_name=record.get("short_name", ""),
                    description=record.get("description", ""),
                    fine_types=frozenset(
                        FineRuleType.from_name(name)
                        for name in record.get("fine_types", [])
                    ),
                )
            )
    return rules


def write_rules(rules: Iterable[CommunityRule], path: Union[str, Path]) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as handle:
        for rule in rules:
            record = {
                "subreddit": rule.subreddit,
                "rule_index": rule.rule_index,
                "short_name": rule.short_name,
                "description": rule.description,
                "fine_types": sorted(t.value for t in rule.fine_types),
            }
            handle.write(json.dumps(record, sort_keys=True) + "\n")
            count += 1
    return count
