"""Release serialization, privacy scrubbing, rehydration, archive clients."""

import json

import pytest

from modnorm.corpus import (
    ArchiveTransportError,
    CommentStore,
    FileArchiveClient,
    ScrubberError,
    fetch_removed_body,
    read_release,
    rehydrate,
    scrub_record,
    serialize_release,
    write_archive,
    write_release,
)

from helpers import DictArchiveClient


class TestSerializeRelease:
    def test_one_moderated_conversation_yields_id_only_record(self, built_dataset):
        records, _ = serialize_release(built_dataset)
        moderated = [r for r in records if r.role == "moderated"]
        assert len(moderated) == len(built_dataset.entries)
        first = moderated[0].to_record()
        assert set(first["comment_ids"]) <= {
            c.comment_id for c in built_dataset.entries[0].conversation.utterances()
        } | {c.comment_id for e in built_dataset.entries for c in e.conversation.utterances()}
        assert "body" not in json.dumps(first)

    def test_record_with_body_field_aborts(self):
        with pytest.raises(ScrubberError):
            scrub_record({"entry_id": 0, "body": "leaky"})
        with pytest.raises(ScrubberError):
            scrub_record({"nested": [{"author": "someone"}]})

    def test_leaked_string_aborts(self):
        record = {"ids": ["the whole secret comment text"]}
        with pytest.raises(ScrubberError):
            scrub_record(record, forbidden_strings=["secret comment text"])

    def test_release_greps_clean(self, built_dataset):
        records, _ = serialize_release(built_dataset)
        serialized = "\n".join(json.dumps(r.to_record(), sort_keys=True) for r in records)
        for entry in built_dataset.entries:
            for conversation in (entry.conversation, *entry.controls):
                for comment in conversation.utterances():
                    if comment.body:
                        assert comment.body not in serialized
                    assert comment.author_pseudonym not in serialized

    def test_anonymization_map_covers_all_authors(self, built_dataset):
        _, anonymization = serialize_release(built_dataset)
        authors = {
            c.author_pseudonym
            for e in built_dataset.entries
            for conv in (e.conversation, *e.controls)
            for c in conv.utterances()
        }
        assert set(anonymization) == authors
        assert len(set(anonymization.values())) == len(authors)

    def test_round_trip_rebuilds_dataset(self, synth_corpus, built_dataset, tmp_path):
        records, _ = serialize_release(built_dataset)
        path = tmp_path / "release.jsonl"
        write_release(records, path)

        store = CommentStore(synth_corpus.comments)
        for comment_id, body in synth_corpus.archive_bodies.items():
            store.with_body(comment_id, body)
        rebuilt = rehydrate(read_release(path), store, built_dataset.rules)

        assert len(rebuilt.entries) == len(built_dataset.entries)
        for original, restored in zip(built_dataset.entries, rebuilt.entries):
            assert restored.conversation == original.conversation
            assert restored.controls == original.controls
            assert restored.violated_rules == original.violated_rules
            assert restored.events == original.events
            assert restored.forecast_only == original.forecast_only
        assert rebuilt.moderator_ids == built_dataset.moderator_ids


class TestArchive:
    def test_present_id_returns_body(self, tmp_path):
        path = tmp_path / "archive.jsonl"
        write_archive({"c1": "restored text"}, path)
        client = FileArchiveClient(path)
        assert fetch_removed_body("c1", client) == "restored text"

    def test_absent_id_returns_none(self, tmp_path):
        path = tmp_path / "archive.jsonl"
        write_archive({}, path)
        assert fetch_removed_body("ghost", FileArchiveClient(path)) is None

    def test_transient_failures_retried(self):
        class FlakyClient:
            retries = 2

            def __init__(self):
                self.calls = 0

            def get_body(self, comment_id):
                self.calls += 1
                if self.calls <= 2:
                    raise ArchiveTransportError("connection reset")
                return "recovered"

        client = FlakyClient()
        assert fetch_removed_body("c1", client) == "recovered"
        assert client.calls == 3

    def test_retries_exhausted_returns_none(self):
        class DownClient:
            retries = 2

            def get_body(self, comment_id):
                raise ArchiveTransportError("still down")

        assert fetch_removed_body("c1", DownClient()) is None

    def test_unavailable_body_flags_forecast_only(self, synth_corpus):
        from modnorm.corpus import build_dataset

        dataset = build_dataset(
            synth_corpus.comments,
            synth_corpus.rules,
            archive_client=DictArchiveClient(synth_corpus.archive_bodies),
        )
        flagged = {
            e.conversation.final_comment.comment_id
            for e in dataset.entries
            if e.forecast_only
        }
        assert flagged == set(synth_corpus.truth.forecast_only)
        # Forecast-only conversations are retained, not dropped.
        assert len(dataset.entries) == len(synth_corpus.truth.threads)
