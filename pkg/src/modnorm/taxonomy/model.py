"""Per-fine-type binary rule classifiers over rule descriptions."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import FrozenSet, Optional, Sequence, Union

import torch

from modnorm.detector.model import classification_head
from modnorm.encoding import EncoderSettings, UtteranceEncoder, load_encoder, resolve_encoder, save_encoder
from modnorm.taxonomy.types import AnnotatedRule, FineRuleType
from modnorm.training import (
    FitResult,
    TrainConfig,
    TrainingError,
    fit_binary_classifier,
    predict_probs,
    set_seed,
)

DEFAULT_THRESHOLD = 0.5

MIN_POSITIVES = 2
MIN_NEGATIVES = 2


def taxonomy_train_config(**overrides) -> TrainConfig:
    """Training defaults for rule classifiers: 20 epochs, library-default LR."""
    config = TrainConfig(epochs=20, learning_rate=5e-5, patience=20)
    return replace(config, **overrides)


class RuleTypeScorer(torch.nn.Module):
    """Binary scorer for one fine rule type: rule text -> probability."""

    def __init__(self, fine_type: FineRuleType, encoder: UtteranceEncoder):
        super().__init__()
        self.fine_type = fine_type
        self.encoder = encoder
        self.head = classification_head(encoder.hidden_size)
        self.manifest: dict = {}

    def logits(self, texts: Sequence[str]) -> torch.Tensor:
        vectors = self.encoder.encode_batch(list(texts))
        return self.head(vectors).squeeze(-1)

    def score(self, text: str) -> float:
        return predict_probs(self, [text])[0]

    def score_many(self, texts: Sequence[str], batch_size: int = 32) -> list[float]:
        return predict_probs(self, list(texts), batch_size)


def train_rule_classifier(
    fine_type: FineRuleType,
    annotated_rules: Sequence[AnnotatedRule],
    config: Optional[TrainConfig] = None,
    dev_rules: Optional[Sequence[AnnotatedRule]] = None,
) -> tuple[RuleTypeScorer, FitResult]:
    """Fine-tune the binary classifier for one rule type.

    Training needs at least two positives and two negatives for the type.
    The seed and settings land in the scorer's manifest.
    """
    config = config or taxonomy_train_config()
    labels = [1 if rule.has(fine_type) else 0 for rule in annotated_rules]
    positives = sum(labels)
    negatives = len(labels) - positives
    if positives < MIN_POSITIVES or negatives < MIN_NEGATIVES:
        raise TrainingError(
            f"{fine_type.value}: need >= {MIN_POSITIVES} positives and "
            f">= {MIN_NEGATIVES} negatives, got {positives}/{negatives}"
        )

    texts = [rule.text for rule in annotated_rules]
    if dev_rules is None:
        dev_texts, dev_labels = texts, labels
    else:
        dev_texts = [rule.text for rule in dev_rules]
        dev_labels = [1 if rule.has(fine_type) else 0 for rule in dev_rules]

    set_seed(config.seed)  # model initialization must not depend on prior RNG use
    encoder = resolve_encoder(config.encoder, corpus_texts=texts)
    scorer = RuleTypeScorer(fine_type, encoder)
    result = fit_binary_classifier(
        scorer, texts, labels, dev_texts, dev_labels, config
    )
    scorer.manifest = {
        "fine_type": fine_type.value,
        "seed": config.seed,
        "threshold": config.decision_threshold,
        "encoder_checkpoint": config.encoder.checkpoint,
        "best_epoch": result.best_epoch,
        "best_dev_macro_f1": result.best_dev_macro_f1,
    }
    return scorer, result


@dataclass
class RuleTypeModel:
    """The full suite: one scorer per fine type."""

    scorers: dict[FineRuleType, RuleTypeScorer] = field(default_factory=dict)

    def add(self, scorer: RuleTypeScorer) -> None:
        self.scorers[scorer.fine_type] = scorer

    @property
    def complete(self) -> bool:
        return set(self.scorers) == set(FineRuleType)

    def missing_types(self) -> list[FineRuleType]:
        return [t for t in FineRuleType if t not in self.scorers]


def classify_rule(
    rule_text: str,
    models: RuleTypeModel,
    threshold: float = DEFAULT_THRESHOLD,
) -> FrozenSet[FineRuleType]:
    """Every fine type whose scorer reaches the threshold; may be empty."""
    if not models.complete:
        missing = ", ".join(t.value for t in models.missing_types())
        raise ValueError(f"rule-type model suite is incomplete; missing: {missing}")
    matched = set()
    for fine_type in FineRuleType:
        if models.scorers[fine_type].score(rule_text) >= threshold:
            matched.add(fine_type)
    return frozenset(matched)


def train_rule_suite(
    annotated_rules: Sequence[AnnotatedRule],
    config: Optional[TrainConfig] = None,
    types: Optional[Sequence[FineRuleType]] = None,
) -> RuleTypeModel:
    """Train scorers for the requested types (default: all 21)."""
    suite = RuleTypeModel()
    for fine_type in types or list(FineRuleType):
        scorer, _ = train_rule_classifier(fine_type, annotated_rules, config)
        suite.add(scorer)
    return suite


def save_rule_suite(suite: RuleTypeModel, path: Union[str, Path]) -> None:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    index = []
    for fine_type, scorer in suite.scorers.items():
        slug = fine_type.name.lower()
        scorer_dir = path / slug
        scorer_dir.mkdir(exist_ok=True)
        save_encoder(scorer.encoder, scorer_dir / "encoder")
        state = {
            k: v for k, v in scorer.state_dict().items() if not k.startswith("encoder.")
        }
        torch.save(state, scorer_dir / "model.pt")
        (scorer_dir / "manifest.json").write_text(
            json.dumps(scorer.manifest, indent=2, sort_keys=True)
        )
        index.append({"fine_type": fine_type.value, "dir": slug})
    (path / "suite.json").write_text(json.dumps(index, indent=2, sort_keys=True))


def load_rule_suite(path: Union[str, Path]) -> RuleTypeModel:
    path = Path(path)
    index = json.loads((path / "suite.json").read_text())
    suite = RuleTypeModel()
    for entry in index:
        fine_type = FineRuleType.from_name(entry["fine_type"])
        scorer_dir = path / entry["dir"]
        encoder = load_encoder(scorer_dir / "encoder")
        scorer = RuleTypeScorer(fine_type, encoder)
        state = torch.load(scorer_dir / "model.pt", weights_only=True)
        scorer.load_state_dict(state, strict=False)
        scorer.manifest = json.loads((scorer_dir / "manifest.json").read_text())
        scorer.eval()
        suite.add(scorer)
    return suite
