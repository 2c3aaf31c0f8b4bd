"""Detectors: input building, training, prediction, gradient checks."""

import torch
from torch import nn

import pytest

from modnorm.corpus import split_dataset
from modnorm.detector import (
    DetectionExample,
    DetectorVariant,
    VariantMismatchError,
    build_input,
    detection_examples,
    load_detector,
    predict,
    predict_many,
    save_detector,
    train_detector,
)
from modnorm.evalkit import macro_f1
from modnorm.synthetic import community_conditional_examples
from modnorm.taxonomy import CoarseRuleType
from modnorm.training import (
    TrainingError,
    fit_binary_classifier,
    head_gradient_check,
    predict_probs,
)

from helpers import chain_conversation, make_comment, tiny_train_config


def _example(bodies, subreddit="AskReddit", violations=frozenset()):
    conversation = chain_conversation(len(bodies) - 1, subreddit=subreddit, prefix="e")
    comments = conversation.utterances()
    rebodied = []
    for comment, body in zip(comments, bodies):
        rebodied.append(
            make_comment(
                comment.comment_id,
                comment.parent_id,
                comment.post_id,
                subreddit,
                body=body,
                created_utc=comment.created_utc,
            )
        )
    from modnorm.corpus import Conversation

    if len(rebodied) == 1:
        conversation = Conversation(post=rebodied[0], chain=(), final_comment=rebodied[0])
    else:
        conversation = Conversation(
            post=rebodied[0], chain=tuple(rebodied[1:-1]), final_comment=rebodied[-1]
        )
    return DetectionExample(conversation, violations)


class TestBuildInput:
    def test_community_prepends_subreddit_name(self):
        example = _example(["the post", "ask anything!"])
        assert build_input(example, DetectorVariant.COMMUNITY) == [
            "r/AskReddit ask anything!"
        ]

    def test_comment_variant_is_final_text_only(self):
        example = _example(["the post", "middle", "final words"])
        assert build_input(example, DetectorVariant.COMMENT) == ["final words"]

    def test_history_lists_all_utterances_in_order(self):
        example = _example(["post", "one", "two", "final"])
        assert build_input(example, DetectorVariant.HISTORY) == [
            "post",
            "one",
            "two",
            "final",
        ]

    def test_history_community_prefixes_only_the_final(self):
        example = _example(["post", "mid", "final"])
        assert build_input(example, DetectorVariant.HISTORY_COMMUNITY) == [
            "post",
            "mid",
            "r/AskReddit final",
        ]

    def test_history_community_can_prefix_everything(self):
        example = _example(["post", "final"])
        assert build_input(
            example, DetectorVariant.HISTORY_COMMUNITY, prefix_all_utterances=True
        ) == ["r/AskReddit post", "r/AskReddit final"]


@pytest.fixture(scope="module")
def overfit_model():
    examples = community_conditional_examples(seed=13, n=50)
    model, result = train_detector(
        CoarseRuleType.INCIVILITY,
        DetectorVariant.COMMUNITY,
        split=None,
        seed=0,
        config=tiny_train_config(seed=0),
        train_examples=examples,
        dev_examples=examples,
    )
    return model, result, examples


class TestTrainDetector:
    def test_memorizes_fifty_examples(self, overfit_model):
        model, result, examples = overfit_model
        probs = predict_many(model, examples)
        decisions = [1 if p >= 0.5 else 0 for p in probs]
        labels = [e.label(CoarseRuleType.INCIVILITY) for e in examples]
        assert macro_f1(decisions, labels) >= 0.95
        assert len(result.history) <= 10

    def test_no_positives_is_a_training_error(self):
        examples = [
            _example(["post", f"benign text {i}"], violations=frozenset())
            for i in range(10)
        ]
        with pytest.raises(TrainingError):
            train_detector(
                CoarseRuleType.SPAM,
                DetectorVariant.COMMENT,
                split=None,
                seed=0,
                config=tiny_train_config(),
                train_examples=examples,
                dev_examples=examples,
            )

    def test_manifest_records_seed_variant_and_type(self, overfit_model):
        model, _, _ = overfit_model
        assert model.manifest.seed == 0
        assert model.manifest.variant == "community"
        assert model.manifest.coarse_type == "Incivility"

    def test_distinct_seeds_distinct_manifests(self):
        examples = community_conditional_examples(seed=14, n=20)
        manifests = []
        for seed in (0, 1):
            model, _ = train_detector(
                CoarseRuleType.INCIVILITY,
                DetectorVariant.COMMENT,
                split=None,
                seed=seed,
                config=tiny_train_config(epochs=2),
                train_examples=examples,
                dev_examples=examples,
            )
            manifests.append(model.manifest)
        assert manifests[0].seed != manifests[1].seed

    def test_training_from_split(self, built_dataset):
        split = split_dataset(built_dataset, seed=0)
        model, result = train_detector(
            CoarseRuleType.SPAM,
            DetectorVariant.COMMENT,
            split,
            seed=0,
            config=tiny_train_config(epochs=3),
        )
        assert 0.0 <= result.best_dev_macro_f1 <= 1.0


class TestEarlyStopping:
    class ScriptedModel(nn.Module):
        """Dev F1 follows a script; training loss nudges a scalar weight."""

        def __init__(self, schedule):
            super().__init__()
            self.weight = nn.Parameter(torch.zeros(()))
            self.schedule = schedule
            self.dev_calls = 0
            self.weight_at_epoch = []

        def logits(self, items):
            values = torch.tensor([float(v[0]) for v in items])
            if self.training:
                return self.weight * values
            epoch = self.dev_calls
            self.dev_calls += 1
            self.weight_at_epoch.append(float(self.weight.item()))
            good = self.schedule[epoch] == "good"
            first = 10.0 if good else -10.0
            return torch.tensor([first, -first])

    def test_best_dev_checkpoint_restored_not_last(self):
        schedule = ["bad", "good", "bad", "bad", "bad", "bad", "bad", "bad", "bad", "bad"]
        model = self.ScriptedModel(schedule)
        result = fit_binary_classifier(
            model,
            train_items=[[1.0], [-1.0]],
            train_labels=[1, 0],
            dev_items=[[1.0], [-1.0]],
            dev_labels=[1, 0],
            config=tiny_train_config(epochs=10, patience=5, batch_size=2),
        )
        assert result.stopped_early
        assert result.best_epoch == 1
        assert len(result.history) == 7  # epochs 0..6: five bad epochs after the best
        # Weights match the best epoch's snapshot, not the final epoch's.
        assert float(model.weight.item()) == pytest.approx(model.weight_at_epoch[1])
        assert float(model.weight.item()) != pytest.approx(model.weight_at_epoch[6])


class TestPredict:
    def test_identical_input_identical_score(self, overfit_model):
        model, _, examples = overfit_model
        example = examples[0]
        assert predict(model, example) == predict(model, example)

    def test_memorized_positive_scores_high(self, overfit_model):
        model, _, examples = overfit_model
        positive = next(e for e in examples if e.violates_any)
        assert predict(model, positive) > 0.5

    def test_history_input_to_comment_model_is_usage_error(self, overfit_model):
        model, _, _ = overfit_model  # community variant: no context encoder
        with pytest.raises(VariantMismatchError):
            model.score_utterances(["post text", "final text"])

    def test_variable_length_history_never_crashes(self):
        examples = community_conditional_examples(seed=15, n=16)
        model, _ = train_detector(
            CoarseRuleType.INCIVILITY,
            DetectorVariant.HISTORY,
            split=None,
            seed=0,
            config=tiny_train_config(epochs=1),
            train_examples=examples,
            dev_examples=examples,
        )
        for texts in (["one"], ["a", "b", "c"], ["w"] * 9):
            prob = model.score_utterances(texts)
            assert 0.0 <= prob <= 1.0

    def test_retraining_same_seed_is_bit_for_bit_reproducible(self):
        examples = community_conditional_examples(seed=16, n=20)

        def run():
            model, _ = train_detector(
                CoarseRuleType.INCIVILITY,
                DetectorVariant.COMMUNITY,
                split=None,
                seed=7,
                config=tiny_train_config(seed=7, epochs=3),
                train_examples=examples,
                dev_examples=examples,
            )
            return predict_many(model, examples)

        assert run() == run()


class TestGradientCheck:
    def test_head_gradients_match_finite_differences(self, overfit_model):
        model, _, examples = overfit_model
        texts = [model.inputs_for(e)[0] for e in examples[:8]]
        features = model.classifier.encoder.encode_batch(texts).detach()
        labels = torch.tensor([float(e.violates_any) for e in examples[:8]])
        error = head_gradient_check(model.classifier.head, features, labels)
        assert error < 1e-4


class TestSaveLoad:
    def test_round_trip_preserves_predictions(self, overfit_model, tmp_path):
        model, _, examples = overfit_model
        save_detector(model, tmp_path / "det")
        loaded = load_detector(tmp_path / "det")
        assert loaded.variant is DetectorVariant.COMMUNITY
        original = predict_many(model, examples[:8])
        restored = predict_many(loaded, examples[:8])
        assert original == pytest.approx(restored, abs=1e-6)


def test_detection_examples_labels(built_dataset):
    examples = detection_examples(built_dataset.entries)
    moderated = [e for e in examples if e.violates_any]
    controls = [e for e in examples if not e.violates_any]
    assert moderated and controls
    kept_entries = [e for e in built_dataset.entries if not e.forecast_only]
    assert len(moderated) == len(kept_entries)
    for entry in kept_entries:
        assert entry.violation_types  # moderated examples carry >=1 positive type
