"""Trained rule classifiers: separable data, thresholds, cross validation."""

import random

import pytest

from modnorm.evalkit import macro_f1
from modnorm.synthetic import separable_annotated_rules
from modnorm.taxonomy import (
    AnnotatedRule,
    FineRuleType,
    RuleTypeModel,
    StratificationError,
    classify_rule,
    crossval_rule_classifier,
    stratified_folds,
    train_rule_classifier,
)
from modnorm.training import TrainingError

from helpers import tiny_train_config


@pytest.fixture(scope="module")
def separable_scorer():
    rules = separable_annotated_rules(seed=21, fine_type=FineRuleType.SPAM)
    held_out = separable_annotated_rules(seed=22, fine_type=FineRuleType.SPAM)
    scorer, _ = train_rule_classifier(
        FineRuleType.SPAM, rules, tiny_train_config(seed=1)
    )
    return scorer, held_out


class TestTrainRuleClassifier:
    def test_separates_marker_rules_on_held_out_data(self, separable_scorer):
        scorer, held_out = separable_scorer
        probs = scorer.score_many([r.text for r in held_out])
        decisions = [1 if p >= 0.5 else 0 for p in probs]
        labels = [1 if r.has(FineRuleType.SPAM) else 0 for r in held_out]
        assert macro_f1(decisions, labels) >= 0.95

    def test_zero_positives_is_an_error_naming_the_type(self):
        rules = [
            AnnotatedRule(text=f"something benign {i}", labels=frozenset({FineRuleType.FORMAT}))
            for i in range(10)
        ]
        with pytest.raises(TrainingError, match="Spam"):
            train_rule_classifier(FineRuleType.SPAM, rules, tiny_train_config())

    def test_manifest_records_seed_and_threshold(self, separable_scorer):
        scorer, _ = separable_scorer
        assert scorer.manifest["seed"] == 1
        assert scorer.manifest["threshold"] == 0.5
        assert scorer.manifest["encoder_checkpoint"] == "tiny"

    def test_scores_are_probabilities_and_deterministic(self, separable_scorer):
        scorer, _ = separable_scorer
        text = "unsolicited promotions and repeated self links count as spam"
        first, second = scorer.score(text), scorer.score(text)
        assert first == second
        assert 0.0 <= first <= 1.0


class TestClassifyRule:
    def _suite_with_one_real_scorer(self, scorer):
        class FixedScorer:
            def __init__(self, fine_type, value):
                self.fine_type = fine_type
                self.value = value

            def score(self, text):
                return self.value

        suite = RuleTypeModel()
        suite.add(scorer)
        for fine_type in FineRuleType:
            if fine_type not in suite.scorers:
                suite.add(FixedScorer(fine_type, 0.0))
        return suite

    def test_marker_rule_maps_to_exactly_its_type(self, separable_scorer):
        scorer, _ = separable_scorer
        suite = self._suite_with_one_real_scorer(scorer)
        matched = classify_rule(
            "unsolicited promotions and repeated self links count as spam", suite
        )
        assert matched == frozenset({FineRuleType.SPAM})

    def test_empty_string_returns_a_set(self, separable_scorer):
        scorer, _ = separable_scorer
        suite = self._suite_with_one_real_scorer(scorer)
        result = classify_rule("", suite)
        assert isinstance(result, frozenset)

    def test_incomplete_suite_is_an_error(self, separable_scorer):
        scorer, _ = separable_scorer
        suite = RuleTypeModel()
        suite.add(scorer)
        with pytest.raises(ValueError, match="incomplete"):
            classify_rule("anything", suite)

    def test_monotone_in_threshold(self, separable_scorer):
        scorer, held_out = separable_scorer
        suite = self._suite_with_one_real_scorer(scorer)
        texts = [r.text for r in held_out[:10]]
        for text in texts:
            previous = None
            for threshold in (0.1, 0.3, 0.5, 0.7, 0.9):
                current = classify_rule(text, suite, threshold)
                if previous is not None:
                    assert current <= previous
                previous = current


class TestStratifiedFolds:
    def test_folds_are_a_partition(self):
        labels = [1] * 12 + [0] * 28
        folds = stratified_folds(labels, k=10, seed=0)
        flat = [i for fold in folds for i in fold]
        assert sorted(flat) == list(range(40))
        assert len(folds) == 10

    def test_every_fold_has_a_positive(self):
        labels = [1] * 10 + [0] * 30
        for fold in stratified_folds(labels, k=10, seed=1):
            assert any(labels[i] for i in fold)

    def test_too_few_positives_raises(self):
        with pytest.raises(StratificationError):
            stratified_folds([1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0], k=10)


class TestCrossval:
    def test_separable_data_scores_one(self):
        rules = separable_annotated_rules(
            seed=31, fine_type=FineRuleType.POLITICS, positives=15, negatives=15
        )
        result = crossval_rule_classifier(
            FineRuleType.POLITICS, rules, k=3, config=tiny_train_config(seed=2)
        )
        assert result.mean == pytest.approx(1.0)
        assert all(score == pytest.approx(1.0) for score in result.fold_scores)

    def test_fold_assignment_is_seeded_and_a_partition(self):
        rules = separable_annotated_rules(seed=31, fine_type=FineRuleType.POLITICS)
        labels = [1 if r.has(FineRuleType.POLITICS) else 0 for r in rules]
        first = stratified_folds(labels, k=5, seed=9)
        second = stratified_folds(labels, k=5, seed=9)
        assert first == second
        flat = sorted(i for fold in first for i in fold)
        assert flat == list(range(len(rules)))

    def test_label_shuffled_data_scores_near_chance(self):
        rng = random.Random(5)
        rules = separable_annotated_rules(
            seed=41, fine_type=FineRuleType.NSFW, positives=30, negatives=30
        )
        # Shuffle the label assignment away from the texts.
        labels = [r.labels for r in rules]
        rng.shuffle(labels)
        shuffled = [
            AnnotatedRule(text=r.text, labels=l) for r, l in zip(rules, labels)
        ]
        result = crossval_rule_classifier(
            FineRuleType.NSFW,
            shuffled,
            k=5,
            config=tiny_train_config(seed=3, epochs=6),
        )
        assert 0.4 <= result.mean <= 0.6
