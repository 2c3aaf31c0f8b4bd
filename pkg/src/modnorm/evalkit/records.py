"""Prediction records: the on-disk interface between models and evaluation."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Union


@dataclass(frozen=True)
class PredictionRecord:
    """One scored example: model output next to its gold label."""

    example_id: str
    target: str  # coarse type name or "subreddit/rule_index"
    score: float
    decision: int
    gold: int
    variant: str = ""
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score out of range: {self.score}")
        if self.decision not in (0, 1) or self.gold not in (0, 1):
            raise ValueError("decision and gold must be binary")

    def to_record(self) -> dict:
        return {
            "example_id": self.example_id,
            "target": self.target,
            "score": self.score,
            "decision": self.decision,
            "gold": self.gold,
            "variant": self.variant,
            "seed": self.seed,
        }

    @classmethod
    def from_record(cls, record: dict) -> "PredictionRecord":
        return cls(
            example_id=str(record["example_id"]),
            target=str(record["target"]),
            score=float(record["score"]),
            decision=int(record["decision"]),
            gold=int(record["gold"]),
            variant=str(record.get("variant", "")),
            seed=int(record.get("seed", 0)),
        )


def thresholded_record(
    example_id: str,
    target: str,
    score: float,
    gold: int,
    threshold: float,
    variant: str = "",
    seed: int = 0,
) -> PredictionRecord:
    """Build a record whose decision honors the threshold contract."""
    return PredictionRecord(
        example_id=example_id,
        target=target,
        score=score,
        decision=1 if score >= threshold else 0,
        gold=gold,
        variant=variant,
        seed=seed,
    )


def write_predictions(
    records: Iterable[PredictionRecord], path: Union[str, Path]
) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record.to_record(), sort_keys=True) + "\n")
            count += 1
    return count


def read_predictions(path: Union[str, Path]) -> list[PredictionRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                records.append(PredictionRecord.from_record(json.loads(line)))
    return records
