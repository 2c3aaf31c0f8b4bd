"""Stratified k-fold cross validation for the rule classifiers."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional, Sequence

from modnorm.evalkit.metrics import macro_f1, mean_and_ci95
from modnorm.taxonomy.model import train_rule_classifier
from modnorm.taxonomy.types import AnnotatedRule, FineRuleType
from modnorm.training import TrainConfig


class StratificationError(Exception):
    """Raised when a fold cannot receive at least one positive."""


@dataclass
class CrossvalResult:
    fine_type: FineRuleType
    fold_scores: list[float]
    mean: float
    ci95: float
    folds: list[list[int]]  # validation indexes per fold (a partition)


def stratified_folds(
    labels: Sequence[int], k: int, seed: int = 0
) -> list[list[int]]:
    """Partition indexes into k folds, keeping labels balanced per fold."""
    positives = [i for i, label in enumerate(labels) if label]
    negatives = [i for i, label in enumerate(labels) if not label]
    if len(positives) < k:
        raise StratificationError(
            f"need >= {k} positives for {k}-fold stratification, got {len(positives)}"
        )
    rng = random.Random(seed)
    rng.shuffle(positives)
    rng.shuffle(negatives)
    folds: list[list[int]] = [[] for _ in range(k)]
    for position, index in enumerate(positives):
        folds[position % k].append(index)
    for position, index in enumerate(negatives):
        folds[position % k].append(index)
    return [sorted(fold) for fold in folds]


def crossval_rule_classifier(
    fine_type: FineRuleType,
    annotated_rules: Sequence[AnnotatedRule],
    k: int = 10,
    config: Optional[TrainConfig] = None,
    seed: int = 0,
) -> CrossvalResult:
    """Seeded stratified k-fold macro F1 for one rule type."""
    labels = [1 if rule.has(fine_type) else 0 for rule in annotated_rules]
    folds = stratified_folds(labels, k, seed)
    fold_scores: list[float] = []
    threshold = (config.decision_threshold if config else 0.5)
    for fold in folds:
        held_out = set(fold)
        train_rules = [r for i, r in enumerate(annotated_rules) if i not in held_out]
        scorer, _ = train_rule_classifier(fine_type, train_rules, config)
        val_texts = [annotated_rules[i].text for i in fold]
        val_labels = [labels[i] for i in fold]
        probs = scorer.score_many(val_texts)
        decisions = [1 if p >= threshold else 0 for p in probs]
        fold_scores.append(macro_f1(decisions, val_labels))
    mean, ci95 = mean_and_ci95(fold_scores)
    return CrossvalResult(
        fine_type=fine_type,
        fold_scores=fold_scores,
        mean=mean,
        ci95=ci95,
        folds=folds,
    )
