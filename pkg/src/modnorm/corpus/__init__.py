"""Corpus construction: ingestion, moderation events, threads, controls, release."""

from modnorm.corpus.archive import (
    ArchiveClient,
    ArchiveTransportError,
    FileArchiveClient,
    HttpArchiveClient,
    fetch_removed_body,
    write_archive,
)
from modnorm.corpus.build import (
    BuildReport,
    CorpusDataset,
    DatasetEntry,
    build_dataset,
    eligible_control_finals,
)
from modnorm.corpus.controls import pair_controls
from modnorm.corpus.dump import (
    IngestionError,
    ParseResult,
    load_rules,
    parse_dump,
    parse_dump_file,
    write_dump,
    write_rules,
)
from modnorm.corpus.events import detect_moderation_event, normalize_text
from modnorm.corpus.release import (
    ReleaseRecord,
    ScrubberError,
    read_release,
    rehydrate,
    scrub_record,
    serialize_release,
    write_release,
)
from modnorm.corpus.split import DatasetSplit, split_dataset
from modnorm.corpus.stats import CorpusStats, corpus_stats
from modnorm.corpus.threads import PartialThreadError, reconstruct_thread
from modnorm.corpus.types import (
    Comment,
    CommentStore,
    CommunityRule,
    Conversation,
    MatchMethod,
    ModerationEvent,
    RuleBook,
)

__all__ = [
    "ArchiveClient",
    "ArchiveTransportError",
    "BuildReport",
    "Comment",
    "CommentStore",
    "CommunityRule",
    "Conversation",
    "CorpusDataset",
    "CorpusStats",
    "DatasetEntry",
    "DatasetSplit",
    "FileArchiveClient",
    "HttpArchiveClient",
    "IngestionError",
    "MatchMethod",
    "ModerationEvent",
    "ParseResult",
    "PartialThreadError",
    "ReleaseRecord",
    "RuleBook",
    "ScrubberError",
    "build_dataset",
    "corpus_stats",
    "detect_moderation_event",
    "eligible_control_finals",
    "fetch_removed_body",
    "load_rules",
    "normalize_text",
    "pair_controls",
    "parse_dump",
    "parse_dump_file",
    "read_release",
    "reconstruct_thread",
    "rehydrate",
    "scrub_record",
    "serialize_release",
    "split_dataset",
    "write_archive",
    "write_dump",
    "write_release",
    "write_rules",
]
