"""The universal rule-text violation model: scores (conversation, rule) pairs."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import torch

from modnorm.corpus.types import CommunityRule, Conversation
from modnorm.detector.model import SequenceClassifier
from modnorm.detector.variants import community_prefix
from modnorm.encoding import TextItem, UtteranceEncoder, load_encoder, resolve_encoder, save_encoder
from modnorm.explainer.pairs import RulePairExample
from modnorm.training import (
    FitResult,
    TrainConfig,
    TrainingError,
    fit_binary_classifier,
    predict_probs,
    set_seed,
)


class ExplainerVariant(enum.Enum):
    RULE = "rule"
    RULE_HISTORY = "rule_history"
    RULE_HISTORY_COMMUNITY = "rule_history_community"

    @property
    def uses_history(self) -> bool:
        return self in (
            ExplainerVariant.RULE_HISTORY,
            ExplainerVariant.RULE_HISTORY_COMMUNITY,
        )

    @property
    def uses_community(self) -> bool:
        return self is ExplainerVariant.RULE_HISTORY_COMMUNITY


def build_pair_input(
    conversation: Conversation,
    rule: CommunityRule,
    variant: ExplainerVariant,
) -> list[TextItem]:
    """Input sequence for one pair: history utterances, then final + rule.

    The rule text rides with the final comment as the second segment of a
    sentence pair; prior utterances pass through the context encoder alone.
    """
    final_text = conversation.final_comment.body
    if variant.uses_community:
        final_text = community_prefix(conversation.subreddit, final_text)
    final_item: TextItem = (final_text, rule.display_text())
    if not variant.uses_history:
        return [final_item]
    history = [c.body for c in conversation.utterances()[:-1]]
    return [*history, final_item]


@dataclass
class ExplainerManifest:
    variant: str
    seed: int
    config: dict
    best_epoch: int
    best_dev_macro_f1: float
    epochs_run: int

    def to_record(self) -> dict:
        return self.__dict__.copy()


class ExplainerModel(torch.nn.Module):
    """One universal model scoring conversations against free-form rule text."""

    def __init__(
        self,
        variant: ExplainerVariant,
        encoder: UtteranceEncoder,
        config: TrainConfig,
    ):
        super().__init__()
        self.variant = variant
        self.classifier = SequenceClassifier(
            encoder,
            uses_context=variant.uses_history,
            context_hidden=config.context_hidden,
            context_layers=config.context_layers,
            context_cell=config.context_cell,
        )
        self.manifest: Optional[ExplainerManifest] = None

    def inputs_for(self, pair: RulePairExample) -> list[TextItem]:
        return build_pair_input(pair.conversation, pair.rule, self.variant)

    def logits(self, items: Sequence[list[TextItem]]) -> torch.Tensor:
        return self.classifier.logits(items)


def train_explainer(
    pairs: Sequence[RulePairExample],
    seed: int,
    config: TrainConfig,
    variant: ExplainerVariant = ExplainerVariant.RULE,
    dev_pairs: Optional[Sequence[RulePairExample]] = None,
) -> tuple[ExplainerModel, FitResult]:
    """Train the universal rule-text model on labeled pairs.

    Same optimizer, epoch budget, and early-stopping contract as the
    detectors. Without a dev set the training pairs double as the monitor
    set (useful for memorization checks only).
    """
    if not pairs:
        raise TrainingError("no training pairs")
    labels = [pair.label for pair in pairs]
    if len(set(labels)) < 2:
        raise TrainingError("training pairs must contain both labels")
    if dev_pairs is None:
        dev_pairs = pairs

    from dataclasses import replace

    config = replace(config, seed=seed)
    train_inputs = [build_pair_input(p.conversation, p.rule, variant) for p in pairs]
    dev_inputs = [build_pair_input(p.conversation, p.rule, variant) for p in dev_pairs]
    dev_labels = [p.label for p in dev_pairs]

    corpus_texts: list[str] = []
    for item in train_inputs:
        for utterance in item:
            if isinstance(utterance, str):
                corpus_texts.append(utterance)
            else:
                corpus_texts.extend(utterance)
    set_seed(seed)  # model initialization must not depend on prior RNG use
    encoder = resolve_encoder(config.encoder, corpus_texts=corpus_texts)
    model = ExplainerModel(variant, encoder, config)
    result = fit_binary_classifier(
        model,
        train_inputs,
        labels,
        dev_inputs,
        dev_labels,
        config,
        uses_history=variant.uses_history,
    )
    model.manifest = ExplainerManifest(
        variant=variant.value,
        seed=seed,
        config=config.to_record(),
        best_epoch=result.best_epoch,
        best_dev_macro_f1=result.best_dev_macro_f1,
        epochs_run=len(result.history),
    )
    return model, result


def score_pairs(
    model: ExplainerModel, pairs: Sequence[RulePairExample], batch_size: int = 32
) -> list[float]:
    items = [model.inputs_for(p) for p in pairs]
    return predict_probs(model, items, batch_size)


def explain(
    model: ExplainerModel,
    conversation: Conversation,
    rules: Sequence[CommunityRule],
) -> list[tuple[CommunityRule, float]]:
    """Score every community rule against the conversation.

    Returns (rule, probability) pairs in descending probability order; ties
    break on the lower rule number.
    """
    if not rules:
        return []
    items = [build_pair_input(conversation, rule, model.variant) for rule in rules]
    probs = predict_probs(model, items)
    scored = list(zip(rules, probs))
    scored.sort(key=lambda pair: (-pair[1], pair[0].rule_index))
    return scored


def save_explainer(model: ExplainerModel, path: Union[str, Path]) -> None:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    save_encoder(model.classifier.encoder, path / "encoder")
    state = {
        k: v
        for k, v in model.state_dict().items()
        if not k.startswith("classifier.encoder.")
    }
    torch.save(state, path / "model.pt")
    record = {"variant": model.variant.value}
    if model.manifest:
        record["fit"] = model.manifest.to_record()
        record["config"] = model.manifest.config
    (path / "manifest.json").write_text(json.dumps(record, indent=2, sort_keys=True))


def load_explainer(path: Union[str, Path]) -> ExplainerModel:
    path = Path(path)
    manifest = json.loads((path / "manifest.json").read_text())
    config_record = manifest.get("config") or {}
    config = TrainConfig(
        context_hidden=config_record.get("context_hidden", 768),
        context_layers=config_record.get("context_layers", 2),
        context_cell=config_record.get("context_cell", "gru"),
    )
    encoder = load_encoder(
        path / "encoder", config_record.get("encoder", {}).get("max_length", 64)
    )
    model = ExplainerModel(ExplainerVariant(manifest["variant"]), encoder, config)
    state = torch.load(path / "model.pt", weights_only=True)
    model.load_state_dict(state, strict=False)
    model.eval()
    return model
