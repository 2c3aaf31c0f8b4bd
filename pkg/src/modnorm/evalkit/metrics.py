"""Evaluation metrics: binary-task macro F1, threshold tuning, seed CIs."""

from __future__ import annotations

import math
from typing import Sequence

THRESHOLD_GRID_STEP = 0.01


class MetricError(Exception):
    """Raised for malformed metric inputs."""


def binary_counts(
    decisions: Sequence[int], labels: Sequence[int]
) -> tuple[int, int, int, int]:
    """Confusion counts (tp, fp, tn, fn) for binary decisions."""
    if len(decisions) != len(labels):
        raise MetricError(
            f"length mismatch: {len(decisions)} decisions vs {len(labels)} labels"
        )
    tp = fp = tn = fn = 0
    for decision, label in zip(decisions, labels):
        if decision and label:
            tp += 1
        elif decision and not label:
            fp += 1
        elif not decision and not label:
            tn += 1
        else:
            fn += 1
    return tp, fp, tn, fn


def f1_from_counts(tp: int, fp: int, fn: int) -> float:
    """F1 with the zero-denominator convention: empty classes score 0."""
    denominator = 2 * tp + fp + fn
    if denominator == 0:
        return 0.0
    return 2 * tp / denominator


def macro_f1(decisions: Sequence[int], labels: Sequence[int]) -> float:
    """Unweighted mean of the positive-class and negative-class F1 scores."""
    if not labels:
        raise MetricError("macro F1 over an empty set is undefined")
    tp, fp, tn, fn = binary_counts(decisions, labels)
    positive = f1_from_counts(tp, fp, fn)
    # For the negative class the roles swap: tn are its true positives.
    negative = f1_from_counts(tn, fn, fp)
    return (positive + negative) / 2


def tune_threshold(
    dev_scores: Sequence[float], dev_labels: Sequence[int]
) -> float:
    """Grid-search [0, 1] in steps of 0.01 for the best dev macro F1.

    Returns the smallest threshold attaining the maximum; decisions use
    score >= threshold.
    """
    if not dev_labels:
        raise MetricError("cannot tune a threshold on an empty dev set")
    if len(dev_scores) != len(dev_labels):
        raise MetricError("dev scores and labels are misaligned")
    if len(set(dev_labels)) < 2:
        raise MetricError("threshold tuning needs both classes in the dev set")

    best_threshold = 0.0
    best_f1 = -1.0
    steps = int(round(1.0 / THRESHOLD_GRID_STEP))
    for i in range(steps + 1):
        threshold = i / steps
        decisions = [1 if score >= threshold else 0 for score in dev_scores]
        score = macro_f1(decisions, dev_labels)
        if score > best_f1:
            best_f1 = score
            best_threshold = threshold
    return best_threshold


def mean_and_ci95(values: Sequence[float]) -> tuple[float, float]:
    """Mean and 95% confidence half-width under a normal approximation.

    With fewer than two values the half-width is 0.
    """
    if not values:
        raise MetricError("no values to aggregate")
    mean = sum(values) / len(values)
    if len(values) < 2:
        return mean, 0.0
    variance = sum((v - mean) ** 2 for v in values) / (len(values) - 1)
    half_width = 1.96 * math.sqrt(variance / len(values))
    return mean, half_width
