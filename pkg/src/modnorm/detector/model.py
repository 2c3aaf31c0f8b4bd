"""Per-coarse-type violation detectors over conversations."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import torch
from torch import nn
from torch.nn.utils.rnn import pack_padded_sequence

from modnorm.corpus.build import DatasetEntry
from modnorm.corpus.split import DatasetSplit
from modnorm.detector.variants import DetectionExample, DetectorVariant, build_input
from modnorm.encoding import UtteranceEncoder, load_encoder, resolve_encoder, save_encoder
from modnorm.taxonomy.types import CoarseRuleType
from modnorm.training import (
    FitResult,
    TrainConfig,
    TrainingError,
    fit_binary_classifier,
    predict_probs,
    set_seed,
)


class VariantMismatchError(Exception):
    """Input shape is inconsistent with the model's variant."""


def classification_head(in_features: int) -> nn.Module:
    """The two-affine-layer head shared by all model families."""
    return nn.Sequential(
        nn.Linear(in_features, in_features),
        nn.ReLU(),
        nn.Linear(in_features, 1),
    )


def make_context_encoder(
    input_size: int, hidden_size: int, num_layers: int, cell: str
) -> nn.Module:
    """Uni-directional recurrent encoder over per-utterance vectors."""
    if cell == "gru":
        return nn.GRU(input_size, hidden_size, num_layers=num_layers, batch_first=True)
    if cell == "lstm":
        return nn.LSTM(input_size, hidden_size, num_layers=num_layers, batch_first=True)
    raise ValueError(f"unknown context cell {cell!r} (expected 'gru' or 'lstm')")


class SequenceClassifier(nn.Module):
    """Utterance encoder + optional recurrent context encoder + head.

    Without the context encoder the single utterance vector feeds the head
    directly. With it, the sequence of utterance vectors runs through the
    recurrent stack and the final hidden state feeds the head.
    """

    def __init__(
        self,
        encoder: UtteranceEncoder,
        uses_context: bool,
        context_hidden: int = 768,
        context_layers: int = 2,
        context_cell: str = "gru",
    ):
        super().__init__()
        self.encoder = encoder
        self.uses_context = uses_context
        self.context_cell = context_cell
        if uses_context:
            self.context = make_context_encoder(
                encoder.hidden_size, context_hidden, context_layers, context_cell
            )
            self.head = classification_head(context_hidden)
        else:
            self.context = None
            self.head = classification_head(encoder.hidden_size)

    def logits(self, items: Sequence[list]) -> torch.Tensor:
        """One logit per item; each item is an ordered list of utterances."""
        if not self.uses_context:
            for item in items:
                if len(item) != 1:
                    raise VariantMismatchError(
                        "this variant has no context encoder and takes exactly "
                        f"one utterance, got {len(item)}"
                    )
            vectors = self.encoder.encode_batch([item[0] for item in items])
            return self.head(vectors).squeeze(-1)

        lengths = [len(item) for item in items]
        if any(length == 0 for length in lengths):
            raise VariantMismatchError("conversation input must not be empty")
        flat = [utterance for item in items for utterance in item]
        vectors = self.encoder.encode_batch(flat)

        max_len = max(lengths)
        padded = vectors.new_zeros(len(items), max_len, vectors.shape[-1])
        offset = 0
        for row, length in enumerate(lengths):
            padded[row, :length] = vectors[offset : offset + length]
            offset += length
        packed = pack_padded_sequence(
            padded,
            torch.tensor(lengths, dtype=torch.int64),
            batch_first=True,
            enforce_sorted=False,
        )
        if self.context_cell == "lstm":
            _, (h_n, _) = self.context(packed)
        else:
            _, h_n = self.context(packed)
        return self.head(h_n[-1]).squeeze(-1)


@dataclass
class DetectorManifest:
    """Reproducibility record for one trained detector."""

    coarse_type: str
    variant: str
    seed: int
    config: dict
    best_epoch: int
    best_dev_macro_f1: float
    epochs_run: int

    def to_record(self) -> dict:
        return self.__dict__.copy()


class DetectorModel(nn.Module):
    """A binary violation detector for one coarse type and one variant."""

    def __init__(
        self,
        coarse_type: Union[CoarseRuleType, str],
        variant: DetectorVariant,
        encoder: UtteranceEncoder,
        config: TrainConfig,
    ):
        super().__init__()
        self.coarse_type = coarse_type
        self.variant = variant
        self.prefix_all_utterances = config.community_prefix_all
        self.classifier = SequenceClassifier(
            encoder,
            uses_context=variant.uses_history,
            context_hidden=config.context_hidden,
            context_layers=config.context_layers,
            context_cell=config.context_cell,
        )
        self.manifest: Optional[DetectorManifest] = None

    def inputs_for(self, example: DetectionExample) -> list[str]:
        return build_input(example, self.variant, self.prefix_all_utterances)

    def logits(self, items: Sequence[list[str]]) -> torch.Tensor:
        return self.classifier.logits(items)

    def score_utterances(self, utterances: list[str]) -> float:
        """Score prebuilt utterance texts; validates the variant contract."""
        return predict_probs(self, [list(utterances)])[0]


def detection_examples(
    entries: Sequence[DatasetEntry], include_forecast_only: bool = False
) -> list[DetectionExample]:
    """Flatten dataset entries into labeled examples.

    Each moderated conversation is a positive for every coarse type of its
    violated rules; its controls are all-negative examples. Forecast-only
    entries have no final body to classify and are skipped by default.
    """
    examples: list[DetectionExample] = []
    for entry in entries:
        if entry.forecast_only and not include_forecast_only:
            continue
        examples.append(
            DetectionExample(entry.conversation, entry.violation_types)
        )
        for control in entry.controls:
            examples.append(DetectionExample(control))
    return examples


def train_detector(
    coarse_type: Union[CoarseRuleType, str],
    variant: DetectorVariant,
    split: DatasetSplit,
    seed: int,
    config: TrainConfig,
    train_examples: Optional[Sequence[DetectionExample]] = None,
    dev_examples: Optional[Sequence[DetectionExample]] = None,
) -> tuple[DetectorModel, FitResult]:
    """Fine-tune a detector for one coarse type under one variant.

    Examples default to the split's train/dev entries; pass explicit example
    lists to train on a filtered subset (as the incivility/hate-speech
    baseline does).
    """
    if train_examples is None:
        train_examples = detection_examples(split.train)
    if dev_examples is None:
        dev_examples = detection_examples(split.dev)

    def label_of(example: DetectionExample) -> int:
        if isinstance(coarse_type, CoarseRuleType):
            return example.label(coarse_type)
        return example.violates_any

    train_labels = [label_of(e) for e in train_examples]
    dev_labels = [label_of(e) for e in dev_examples]
    if sum(train_labels) == 0:
        raise TrainingError(f"no positive training examples for {coarse_type}")

    config = _with_seed(config, seed)
    train_inputs = [
        build_input(e, variant, config.community_prefix_all) for e in train_examples
    ]
    dev_inputs = [
        build_input(e, variant, config.community_prefix_all) for e in dev_examples
    ]
    set_seed(seed)  # model initialization must not depend on prior RNG use
    encoder = resolve_encoder(
        config.encoder, corpus_texts=[t for item in train_inputs for t in item]
    )
    model = DetectorModel(coarse_type, variant, encoder, config)
    result = fit_binary_classifier(
        model,
        train_inputs,
        train_labels,
        dev_inputs,
        dev_labels,
        config,
        uses_history=variant.uses_history,
    )
    model.manifest = DetectorManifest(
        coarse_type=coarse_type.value
        if isinstance(coarse_type, CoarseRuleType)
        else str(coarse_type),
        variant=variant.value,
        seed=seed,
        config=config.to_record(),
        best_epoch=result.best_epoch,
        best_dev_macro_f1=result.best_dev_macro_f1,
        epochs_run=len(result.history),
    )
    return model, result


def _with_seed(config: TrainConfig, seed: int) -> TrainConfig:
    from dataclasses import replace

    return replace(config, seed=seed)


def predict(model: DetectorModel, example: DetectionExample) -> float:
    """Probability that the example violates the model's coarse type."""
    return predict_probs(model, [model.inputs_for(example)])[0]


def predict_many(
    model: DetectorModel, examples: Sequence[DetectionExample], batch_size: int = 32
) -> list[float]:
    items = [model.inputs_for(e) for e in examples]
    return predict_probs(model, items, batch_size)


def save_detector(model: DetectorModel, path: Union[str, Path]) -> None:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    save_encoder(model.classifier.encoder, path / "encoder")
    state = {
        k: v for k, v in model.state_dict().items() if not k.startswith("classifier.encoder.")
    }
    torch.save(state, path / "model.pt")
    meta = {
        "coarse_type": model.manifest.coarse_type if model.manifest else None,
        "variant": model.variant.value,
        "prefix_all_utterances": model.prefix_all_utterances,
        "config": model.manifest.config if model.manifest else None,
    }
    (path / "manifest.json").write_text(
        json.dumps(
            {**meta, **({"fit": model.manifest.to_record()} if model.manifest else {})},
            indent=2,
            sort_keys=True,
        )
    )


def load_detector(path: Union[str, Path]) -> DetectorModel:
    path = Path(path)
    manifest = json.loads((path / "manifest.json").read_text())
    config_record = manifest.get("config") or {}
    config = TrainConfig(
        context_hidden=config_record.get("context_hidden", 768),
        context_layers=config_record.get("context_layers", 2),
        context_cell=config_record.get("context_cell", "gru"),
        community_prefix_all=manifest.get("prefix_all_utterances", False),
    )
    encoder = load_encoder(path / "encoder", config_record.get("encoder", {}).get("max_length", 64))
    coarse: Union[CoarseRuleType, str]
    try:
        coarse = CoarseRuleType.from_name(manifest["coarse_type"])
    except (ValueError, TypeError):
        coarse = manifest.get("coarse_type") or "any"
    model = DetectorModel(
        coarse, DetectorVariant(manifest["variant"]), encoder, config
    )
    state = torch.load(path / "model.pt", weights_only=True)
    model.load_state_dict(state, strict=False)
    model.eval()
    return model
