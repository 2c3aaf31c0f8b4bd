"""Reference baselines: majority class, toxicity score, incivility/hate model."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Protocol, Sequence

from modnorm.corpus.split import DatasetSplit
from modnorm.detector.model import detection_examples, predict_many, train_detector
from modnorm.detector.variants import DetectionExample, DetectorVariant
from modnorm.evalkit.confusion import AggregateConfusion, aggregate_confusion
from modnorm.evalkit.metrics import MetricError, macro_f1, mean_and_ci95, tune_threshold
from modnorm.evalkit.records import PredictionRecord, thresholded_record
from modnorm.taxonomy.types import CoarseRuleType
from modnorm.training import TrainConfig

log = logging.getLogger(__name__)

ABUSIVE_TYPES = frozenset({CoarseRuleType.INCIVILITY, CoarseRuleType.HATE_SPEECH})


@dataclass
class TypeScore:
    scores: list[float]
    mean: float
    ci95: Optional[float]  # None below two seed runs

    @classmethod
    def from_scores(cls, scores: Sequence[float]) -> "TypeScore":
        mean, ci = mean_and_ci95(list(scores))
        return cls(list(scores), mean, ci if len(scores) >= 2 else None)


@dataclass
class EvalReport:
    """Per-type macro F1 plus an optional aggregate confusion matrix."""

    label: str
    per_type: dict[str, TypeScore] = field(default_factory=dict)
    confusion: Optional[AggregateConfusion] = None
    variant: str = ""
    notes: dict = field(default_factory=dict)

    def average(self) -> float:
        """Unweighted mean over types of the per-type mean F1."""
        if not self.per_type:
            return 0.0
        return sum(score.mean for score in self.per_type.values()) / len(self.per_type)

    def to_record(self) -> dict:
        return {
            "label": self.label,
            "variant": self.variant,
            "per_type": {
                name: {"scores": s.scores, "mean": s.mean, "ci95": s.ci95}
                for name, s in self.per_type.items()
            },
            "average": self.average(),
            "confusion": self.confusion.to_record() if self.confusion else None,
            "notes": self.notes,
        }


class ToxicityError(Exception):
    """Transient failure from a toxicity-scoring backend."""


class ToxicityClient(Protocol):
    def score(self, text: str) -> float: ...


class StubToxicityClient:
    """Deterministic stand-in: high score iff the text contains a marker."""

    def __init__(
        self,
        markers: Sequence[str],
        hit_score: float = 0.9,
        miss_score: float = 0.1,
    ):
        self.markers = list(markers)
        self.hit_score = hit_score
        self.miss_score = miss_score

    def score(self, text: str) -> float:
        lowered = text.lower()
        if any(marker.lower() in lowered for marker in self.markers):
            return self.hit_score
        return self.miss_score


class ConstantToxicityClient:
    def __init__(self, value: float = 0.5):
        self.value = value

    def score(self, text: str) -> float:
        return self.value


def _example_id(example: DetectionExample) -> str:
    return example.conversation.final_comment.comment_id


def baseline_majority(split: DatasetSplit) -> EvalReport:
    """Predict the training majority class for every test item, per type."""
    train = detection_examples(split.train)
    test = detection_examples(split.test)
    if not test:
        raise MetricError("empty test split")
    report = EvalReport(label="majority")
    predictions: dict[str, list[PredictionRecord]] = {}
    for coarse in CoarseRuleType:
        train_labels = [e.label(coarse) for e in train]
        majority = 1 if sum(train_labels) * 2 > len(train_labels) else 0
        records = [
            PredictionRecord(
                example_id=_example_id(e),
                target=coarse.value,
                score=float(majority),
                decision=majority,
                gold=e.label(coarse),
            )
            for e in test
        ]
        predictions[coarse.value] = records
        score = macro_f1([r.decision for r in records], [r.gold for r in records])
        report.per_type[coarse.value] = TypeScore.from_scores([score])
    report.confusion = aggregate_confusion(predictions)
    return report


def baseline_toxicity(
    split: DatasetSplit,
    client: ToxicityClient,
    retries: int = 1,
) -> EvalReport:
    """Threshold a toxicity score of the final comment, tuned on dev per type."""
    dev = detection_examples(split.dev)
    test = detection_examples(split.test)
    if not dev or not test:
        raise MetricError("toxicity baseline needs dev and test items")

    def score_items(
        examples: Sequence[DetectionExample],
    ) -> tuple[list[DetectionExample], list[float], int]:
        kept: list[DetectionExample] = []
        scores: list[float] = []
        excluded = 0
        for example in examples:
            text = example.conversation.final_comment.body
            value: Optional[float] = None
            for _ in range(retries + 1):
                try:
                    value = client.score(text)
                    break
                except ToxicityError:
                    continue
            if value is None:
                excluded += 1
                continue
            kept.append(example)
            scores.append(value)
        return kept, scores, excluded

    dev_kept, dev_scores, dev_excluded = score_items(dev)
    test_kept, test_scores, test_excluded = score_items(test)

    report = EvalReport(
        label="toxicity",
        notes={"dev_excluded": dev_excluded, "test_excluded": test_excluded},
    )
    predictions: dict[str, list[PredictionRecord]] = {}
    for coarse in CoarseRuleType:
        dev_labels = [e.label(coarse) for e in dev_kept]
        try:
            threshold = tune_threshold(dev_scores, dev_labels)
        except MetricError:
            threshold = 0.0  # degenerate dev set: everything on one side
        records = [
            thresholded_record(
                example_id=_example_id(e),
                target=coarse.value,
                score=score,
                gold=e.label(coarse),
                threshold=threshold,
            )
            for e, score in zip(test_kept, test_scores)
        ]
        predictions[coarse.value] = records
        report.per_type[coarse.value] = TypeScore.from_scores(
            [macro_f1([r.decision for r in records], [r.gold for r in records])]
        )
        report.notes.setdefault("thresholds", {})[coarse.value] = threshold
    report.confusion = aggregate_confusion(predictions)
    return report


def baseline_incivil_hate(
    split: DatasetSplit,
    variant: DetectorVariant,
    seed: int,
    config: Optional[TrainConfig] = None,
) -> EvalReport:
    """Train on incivility/hate-speech violations only; score all types.

    The model learns "does this violate?" from the abusive-language subset;
    its test predictions are then evaluated against every coarse type's
    labels, exposing how much of the wider violation space it misses.
    """
    config = config or TrainConfig()

    def subset(entries) -> list[DetectionExample]:
        examples = []
        for entry in entries:
            if entry.forecast_only:
                continue
            if entry.violation_types & ABUSIVE_TYPES:
                examples.append(
                    DetectionExample(entry.conversation, entry.violation_types)
                )
            for control in entry.controls:
                examples.append(DetectionExample(control))
        return examples

    train_examples = subset(split.train)
    dev_examples = subset(split.dev)
    if not any(e.violates_any for e in train_examples):
        raise MetricError("no incivility or hate-speech violations in training data")

    model, _ = train_detector(
        "incivil_hate_any",
        variant,
        split,
        seed,
        config,
        train_examples=train_examples,
        dev_examples=dev_examples,
    )

    test = detection_examples(split.test)
    probs = predict_many(model, test)
    report = EvalReport(label="incivil_hate", variant=variant.value)
    predictions: dict[str, list[PredictionRecord]] = {}
    recalls: dict[str, float] = {}
    for coarse in CoarseRuleType:
        records = [
            thresholded_record(
                example_id=_example_id(e),
                target=coarse.value,
                score=prob,
                gold=e.label(coarse),
                threshold=config.decision_threshold,
                seed=seed,
            )
            for e, prob in zip(test, probs)
        ]
        predictions[coarse.value] = records
        report.per_type[coarse.value] = TypeScore.from_scores(
            [macro_f1([r.decision for r in records], [r.gold for r in records])]
        )
        positives = [r for r in records if r.gold == 1]
        recalls[coarse.value] = (
            sum(r.decision for r in positives) / len(positives) if positives else 0.0
        )
    report.notes["recall"] = recalls
    report.confusion = aggregate_confusion(predictions)
    return report
