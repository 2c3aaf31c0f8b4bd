"""Corpus statistics against generator ground truth; the shared split."""

from modnorm.corpus import CorpusDataset, RuleBook, corpus_stats, split_dataset


class TestCorpusStats:
    def test_counts_match_generator(self, synth_corpus, built_dataset):
        stats = corpus_stats(built_dataset)
        truth = synth_corpus.truth
        assert stats.moderated_comments == len(truth.threads)
        assert stats.subreddits == len(truth.subreddit_names)
        assert stats.rules == len(synth_corpus.rules)
        assert stats.total_comments == stats.moderated_comments + stats.unmoderated_comments

        event_moderators = {
            comment.author_pseudonym
            for comment in synth_corpus.comments
            if comment.comment_id
            in {e.moderation_comment_id for e in truth.events}
        }
        assert stats.moderators == len(event_moderators)

    def test_violation_counts_match_generator(self, synth_corpus, built_dataset):
        stats = corpus_stats(built_dataset)
        assert stats.violation_type_counts == {
            **{name: 0 for name in stats.violation_type_counts},
            **synth_corpus.truth.violations_per_coarse(),
        }

    def test_avg_utterances_match_generator(self, synth_corpus, built_dataset):
        stats = corpus_stats(built_dataset)
        truth = synth_corpus.truth
        sums: dict[str, list[int]] = {}
        for removed_id, types in truth.violation_coarse.items():
            for name in types:
                sums.setdefault(name, []).append(truth.lengths[removed_id])
        for name, lengths in sums.items():
            expected = sum(lengths) / len(lengths)
            assert abs(stats.avg_utterances_before_violation[name] - expected) < 1e-12

    def test_rules_per_community(self, built_dataset):
        stats = corpus_stats(built_dataset)
        expected = len(built_dataset.rules) / len(built_dataset.rules.subreddits)
        assert abs(stats.avg_rules_per_community - expected) < 1e-12

    def test_empty_dataset_is_all_zeros(self):
        stats = corpus_stats(CorpusDataset(entries=[], rules=RuleBook([])))
        assert stats.total_comments == 0
        assert stats.moderated_comments == 0
        assert stats.unmoderated_comments == 0
        assert stats.subreddits == 0
        assert stats.rules == 0
        assert stats.moderators == 0
        assert stats.avg_comment_length_words == 0.0
        assert stats.avg_context_per_comment == 0.0
        assert stats.avg_rules_per_community == 0.0
        assert all(v == 0 for v in stats.rule_type_counts.values())

    def test_context_counts_include_the_post(self, built_dataset):
        stats = corpus_stats(built_dataset)
        conversations = built_dataset.conversations()
        expected = sum(1 + len(c.chain) for c in conversations) / len(conversations)
        assert abs(stats.avg_context_per_comment - expected) < 1e-12


def test_event_rules_share_the_conversation_subreddit(built_dataset):
    for entry in built_dataset.entries:
        for event in entry.events:
            assert event.matched_rule.subreddit == entry.conversation.subreddit
        for rule in entry.violated_rules:
            assert rule.coarse_types  # labels derived from the coarsening map


class TestSplit:
    def test_split_is_a_partition(self, built_dataset):
        split = split_dataset(built_dataset, seed=0)
        ids = lambda entries: {
            e.conversation.final_comment.comment_id for e in entries
        }
        train, dev, test = ids(split.train), ids(split.dev), ids(split.test)
        assert not (train & dev) and not (train & test) and not (dev & test)
        assert len(train | dev | test) == len(built_dataset.entries)

    def test_split_proportions(self, built_dataset):
        split = split_dataset(built_dataset, seed=0)
        n = len(built_dataset.entries)
        assert len(split.train) == int(n * 0.8)
        assert len(split.dev) == int(n * 0.1)

    def test_same_seed_same_split(self, built_dataset):
        first = split_dataset(built_dataset, seed=3)
        second = split_dataset(built_dataset, seed=3)
        assert [e.conversation.final_comment.comment_id for e in first.test] == [
            e.conversation.final_comment.comment_id for e in second.test
        ]

    def test_controls_follow_their_entry(self, built_dataset):
        split = split_dataset(built_dataset, seed=0)
        # Controls are attached to entries, so by construction they live in
        # exactly one split; spot-check there is no cross-split sharing.
        seen: dict[str, str] = {}
        for name, entries in (("train", split.train), ("dev", split.dev), ("test", split.test)):
            for entry in entries:
                for control in entry.controls:
                    key = control.final_comment.comment_id
                    assert seen.setdefault(key, name) == name
