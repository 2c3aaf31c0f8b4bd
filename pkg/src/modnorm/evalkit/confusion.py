"""Aggregate confusion over all violation types."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from modnorm.evalkit.records import PredictionRecord


class SplitMismatchError(Exception):
    """Per-type reports cover different example sets."""


@dataclass
class AggregateConfusion:
    """Detected/missed violations vs flagged/passed controls.

    A violation counts as detected when any type's classifier fires on it;
    a control counts as flagged when any classifier fires.
    """

    detected_violations: int = 0
    missed_violations: int = 0
    flagged_controls: int = 0
    passed_controls: int = 0

    @property
    def total(self) -> int:
        return (
            self.detected_violations
            + self.missed_violations
            + self.flagged_controls
            + self.passed_controls
        )

    @property
    def miss_rate(self) -> float:
        violations = self.detected_violations + self.missed_violations
        return self.missed_violations / violations if violations else 0.0

    def as_matrix(self) -> list[list[int]]:
        """Rows: violation, control. Columns: detected, not detected."""
        return [
            [self.detected_violations, self.missed_violations],
            [self.flagged_controls, self.passed_controls],
        ]

    def to_record(self) -> dict:
        return {
            "detected_violations": self.detected_violations,
            "missed_violations": self.missed_violations,
            "flagged_controls": self.flagged_controls,
            "passed_controls": self.passed_controls,
            "miss_rate": self.miss_rate,
        }


def aggregate_confusion(
    per_type_predictions: Mapping[str, Sequence[PredictionRecord]],
) -> AggregateConfusion:
    """Fold per-type predictions over one shared test split into one matrix."""
    if not per_type_predictions:
        raise SplitMismatchError("no per-type predictions supplied")

    id_sets = {
        name: {record.example_id for record in records}
        for name, records in per_type_predictions.items()
    }
    reference = next(iter(id_sets.values()))
    for name, ids in id_sets.items():
        if ids != reference:
            raise SplitMismatchError(
                f"report {name!r} covers a different example set"
            )

    fired: dict[str, bool] = {example_id: False for example_id in reference}
    is_violation: dict[str, bool] = {example_id: False for example_id in reference}
    for records in per_type_predictions.values():
        for record in records:
            if record.decision:
                fired[record.example_id] = True
            if record.gold:
                is_violation[record.example_id] = True

    confusion = AggregateConfusion()
    for example_id in reference:
        if is_violation[example_id]:
            if fired[example_id]:
                confusion.detected_violations += 1
            else:
                confusion.missed_violations += 1
        else:
            if fired[example_id]:
                confusion.flagged_controls += 1
            else:
                confusion.passed_controls += 1
    return confusion
