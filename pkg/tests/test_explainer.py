"""Explainer: pair construction, augmented evaluation, training, ranking."""

import pytest

from modnorm.corpus import CorpusDataset, RuleBook, CommunityRule
from modnorm.corpus.build import DatasetEntry, ModerationEvent
from modnorm.corpus.types import MatchMethod
from modnorm.evalkit import macro_f1
from modnorm.explainer import (
    ExplainerVariant,
    PairProvenance,
    RulePairExample,
    build_augmented_eval,
    build_pair_input,
    build_training_pairs,
    eval_items_from_entries,
    explain,
    load_explainer,
    save_explainer,
    score_pairs,
    train_explainer,
)
from modnorm.synthetic import separable_pair_examples
from modnorm.taxonomy import FineRuleType
from modnorm.training import TrainingError

from helpers import chain_conversation, tiny_train_config


def _rule(subreddit, index, fine=FineRuleType.SPAM):
    names = {
        FineRuleType.SPAM: ("No spam", "unsolicited promotions are banned"),
        FineRuleType.POLITICS: ("No politics", "political campaigning belongs elsewhere"),
        FineRuleType.FORMAT: ("Format", "posts must follow the template"),
        FineRuleType.NSFW: ("Tag NSFW", "mature content requires a tag"),
        FineRuleType.TROLLING: ("No trolling", "bait posts are banned"),
        FineRuleType.VOTING: ("No vote begging", "asking for upvotes is banned"),
    }
    short, desc = names[fine]
    return CommunityRule(
        subreddit=subreddit,
        rule_index=index,
        short_name=short,
        description=desc,
        fine_types=frozenset({fine}),
    )


def _entry(subreddit, violated, all_rules, n_controls=1, prefix="t"):
    conversation = chain_conversation(2, subreddit=subreddit, prefix=prefix)
    events = tuple(
        ModerationEvent(
            moderation_comment_id=f"{prefix}-mod-{i}",
            removed_comment_id=conversation.final_comment.comment_id,
            matched_rule=rule,
            match_method=MatchMethod.RULE_NUMBER_PHRASE,
        )
        for i, rule in enumerate(violated)
    )
    from modnorm.corpus import Conversation

    conversation = Conversation(
        post=conversation.post,
        chain=conversation.chain,
        final_comment=conversation.final_comment,
        moderation_event=events[0] if events else None,
    )
    controls = tuple(
        chain_conversation(2, subreddit=subreddit, prefix=f"{prefix}-ctl{i}")
        for i in range(n_controls)
    )
    return DatasetEntry(
        conversation=conversation,
        violated_rules=tuple(violated),
        controls=controls,
        events=events,
    )


@pytest.fixture()
def six_rule_dataset():
    fines = [
        FineRuleType.SPAM,
        FineRuleType.POLITICS,
        FineRuleType.FORMAT,
        FineRuleType.NSFW,
        FineRuleType.TROLLING,
        FineRuleType.VOTING,
    ]
    rules = [_rule("sixer", i + 1, fine) for i, fine in enumerate(fines)]
    book = RuleBook(rules)
    entry = _entry("sixer", [rules[1], rules[4]], rules, n_controls=2)
    dataset = CorpusDataset(entries=[entry], rules=book)
    return dataset, rules, entry


class TestBuildTrainingPairs:
    def test_multi_rule_conversation_counts(self, six_rule_dataset):
        dataset, rules, entry = six_rule_dataset
        pairs = build_training_pairs(dataset, seed=3)
        positives = [p for p in pairs if p.provenance is PairProvenance.OBSERVED_POSITIVE]
        controls = [p for p in pairs if p.provenance is PairProvenance.UNMODERATED_NEGATIVE]
        mismatched = [p for p in pairs if p.provenance is PairProvenance.MISMATCHED_RULE_NEGATIVE]
        assert len(positives) == 2  # one per violated rule
        assert {p.rule.rule_index for p in positives} == {2, 5}
        assert len(controls) == 2  # one per paired control
        assert all(p.rule.rule_index == 2 for p in controls)  # primary violated rule's text
        assert len(mismatched) == 1
        # The draw must come from the non-violated complement {1, 3, 4, 6}.
        assert mismatched[0].rule.rule_index in {1, 3, 4, 6}

    def test_mismatched_draw_membership_over_many_seeds(self, six_rule_dataset):
        dataset, _, _ = six_rule_dataset
        drawn = set()
        for seed in range(200):
            pairs = build_training_pairs(dataset, seed=seed)
            for pair in pairs:
                if pair.provenance is PairProvenance.MISMATCHED_RULE_NEGATIVE:
                    assert pair.rule.subreddit == "sixer"
                    assert pair.rule.rule_index in {1, 3, 4, 6}
                    drawn.add(pair.rule.rule_index)
        assert drawn == {1, 3, 4, 6}  # uniform seeded choice reaches every candidate

    def test_single_rule_subreddit_skips_mismatch_with_counter(self):
        rule = _rule("solo", 1)
        dataset = CorpusDataset(
            entries=[_entry("solo", [rule], [rule], n_controls=0)],
            rules=RuleBook([rule]),
        )
        pairs = build_training_pairs(dataset, seed=0)
        assert len(pairs) == 1
        assert pairs[0].provenance is PairProvenance.OBSERVED_POSITIVE
        assert pairs.skipped_no_mismatch_candidates == 1

    def test_control_negative_carries_violated_rule_text(self):
        rules = [_rule("ctrlsub", 1), _rule("ctrlsub", 2, FineRuleType.POLITICS)]
        entry = _entry("ctrlsub", [rules[0]], rules, n_controls=1)
        dataset = CorpusDataset(entries=[entry], rules=RuleBook(rules))
        pairs = build_training_pairs(dataset, seed=0)
        control = next(
            p for p in pairs if p.provenance is PairProvenance.UNMODERATED_NEGATIVE
        )
        assert control.rule == rules[0]
        assert control.label == 0

    def test_deterministic_given_seed_and_seed_changes_only_draws(self, six_rule_dataset):
        dataset, _, _ = six_rule_dataset

        def fingerprint(pairs):
            return [
                (p.conversation.final_comment.comment_id, p.rule.rule_index,
                 p.label, p.provenance.value)
                for p in pairs
            ]

        first = fingerprint(build_training_pairs(dataset, seed=5))
        second = fingerprint(build_training_pairs(dataset, seed=5))
        assert first == second

        other = fingerprint(build_training_pairs(dataset, seed=6))
        non_mismatch = lambda fp: [
            row for row in fp if row[3] != "mismatched_rule_negative"
        ]
        assert non_mismatch(first) == non_mismatch(other)

    def test_mismatched_never_violated_same_subreddit_property(self, built_dataset):
        for seed in range(25):
            pairs = build_training_pairs(built_dataset, seed=seed)
            for pair in pairs:
                if pair.provenance is PairProvenance.MISMATCHED_RULE_NEGATIVE:
                    entry = next(
                        e
                        for e in built_dataset.entries
                        if e.conversation.final_comment.comment_id
                        == pair.conversation.final_comment.comment_id
                    )
                    assert pair.rule.subreddit == pair.conversation.subreddit
                    assert pair.rule.key not in {r.key for r in entry.violated_rules}


class TestBuildAugmentedEval:
    def test_three_rule_subreddit_single_violation(self):
        rules = [_rule("aug", 1), _rule("aug", 2, FineRuleType.POLITICS), _rule("aug", 3, FineRuleType.NSFW)]
        conversation = chain_conversation(1, subreddit="aug", prefix="a")
        pairs = build_augmented_eval([(conversation, [rules[1]])], RuleBook(rules))
        assert len(pairs) == 3
        assert sum(p.label for p in pairs) == 1
        positive = next(p for p in pairs if p.label == 1)
        assert positive.rule.rule_index == 2

    def test_two_violations_of_three(self):
        rules = [_rule("aug2", 1), _rule("aug2", 2, FineRuleType.POLITICS), _rule("aug2", 3, FineRuleType.NSFW)]
        conversation = chain_conversation(1, subreddit="aug2", prefix="b")
        pairs = build_augmented_eval(
            [(conversation, [rules[0], rules[2]])], RuleBook(rules)
        )
        assert len(pairs) == 3
        assert sum(p.label for p in pairs) == 2

    def test_single_rule_subreddit_yields_one_positive_pair(self):
        rule = _rule("mono", 1)
        conversation = chain_conversation(0, subreddit="mono", prefix="c")
        pairs = build_augmented_eval([(conversation, [rule])], RuleBook([rule]))
        assert len(pairs) == 1
        assert pairs[0].label == 1

    def test_zero_rule_subreddit_excluded_with_counter(self):
        conversation = chain_conversation(1, subreddit="ruleless", prefix="d")
        pairs = build_augmented_eval([(conversation, [])], RuleBook([]))
        assert len(pairs) == 0
        assert pairs.skipped_zero_rule_conversations == 1

    def test_pair_count_is_rule_count_sum(self, built_dataset):
        from modnorm.corpus import split_dataset

        split = split_dataset(built_dataset, seed=0)
        items = eval_items_from_entries(split.test)
        pairs = build_augmented_eval(items, built_dataset.rules)
        expected = sum(
            len(built_dataset.rules.for_subreddit(conv.subreddit))
            for conv, _ in items
        )
        assert len(pairs) == expected
        observed = {
            (conv.final_comment.comment_id, rule.key)
            for conv, violated in items
            for rule in violated
        }
        labeled_positive = {
            (p.conversation.final_comment.comment_id, p.rule.key)
            for p in pairs
            if p.label == 1
        }
        assert labeled_positive == observed


@pytest.fixture(scope="module")
def trained_explainer():
    pairs, rules = separable_pair_examples(seed=23, n=80)
    model, result = train_explainer(
        pairs,
        seed=0,
        config=tiny_train_config(seed=0, epochs=15, learning_rate=1.5e-3, patience=15),
        variant=ExplainerVariant.RULE,
    )
    return model, result, pairs, rules


class TestTrainExplainer:
    def test_memorizes_separable_pairs(self, trained_explainer):
        model, result, pairs, _ = trained_explainer
        probs = score_pairs(model, pairs)
        decisions = [1 if p >= 0.5 else 0 for p in probs]
        assert macro_f1(decisions, [p.label for p in pairs]) >= 0.95

    def test_generalizes_to_held_out_marker_pairs(self, trained_explainer):
        model, _, _, _ = trained_explainer
        held_out, _ = separable_pair_examples(seed=24, n=32)
        probs = score_pairs(model, held_out)
        decisions = [1 if p >= 0.5 else 0 for p in probs]
        assert macro_f1(decisions, [p.label for p in held_out]) >= 0.95

    def test_single_class_pairs_is_an_error(self, trained_explainer):
        _, _, pairs, _ = trained_explainer
        positives = [p for p in pairs if p.label == 1]
        with pytest.raises(TrainingError):
            train_explainer(positives, seed=0, config=tiny_train_config())

    def test_empty_pairs_is_an_error(self):
        with pytest.raises(TrainingError):
            train_explainer([], seed=0, config=tiny_train_config())


class TestExplain:
    def test_orders_by_probability_with_index_tiebreak(self, trained_explainer):
        model, _, pairs, rules = trained_explainer
        conversation = pairs[0].conversation
        ranked = explain(model, conversation, rules)
        assert len(ranked) == len(rules)
        probs = [p for _, p in ranked]
        assert probs == sorted(probs, reverse=True)
        for (r1, p1), (r2, p2) in zip(ranked, ranked[1:]):
            if p1 == p2:
                assert r1.rule_index < r2.rule_index

    def test_empty_rules_returns_empty(self, trained_explainer):
        model, _, pairs, _ = trained_explainer
        assert explain(model, pairs[0].conversation, []) == []

    def test_memorized_positive_ranks_first(self, trained_explainer):
        model, _, pairs, rules = trained_explainer
        positives = [p for p in pairs if p.label == 1][:6]
        for pair in positives:
            ranked = explain(model, pair.conversation, rules)
            assert ranked[0][0].rule_index == pair.rule.rule_index


class TestVariantsAndPersistence:
    def test_history_variants_consume_prior_turns(self):
        conversation = chain_conversation(2, subreddit="vartest", prefix="v")
        rule = _rule("vartest", 1)
        rule_only = build_pair_input(conversation, rule, ExplainerVariant.RULE)
        with_history = build_pair_input(conversation, rule, ExplainerVariant.RULE_HISTORY)
        with_community = build_pair_input(
            conversation, rule, ExplainerVariant.RULE_HISTORY_COMMUNITY
        )
        assert len(rule_only) == 1 and isinstance(rule_only[0], tuple)
        assert len(with_history) == 3
        assert with_history[-1][1] == rule.display_text()
        assert with_community[-1][0].startswith("r/vartest ")

    def test_save_load_round_trip(self, trained_explainer, tmp_path):
        model, _, pairs, _ = trained_explainer
        save_explainer(model, tmp_path / "exp")
        loaded = load_explainer(tmp_path / "exp")
        assert loaded.variant is ExplainerVariant.RULE
        original = score_pairs(model, pairs[:6])
        restored = score_pairs(loaded, pairs[:6])
        assert original == pytest.approx(restored, abs=1e-6)
