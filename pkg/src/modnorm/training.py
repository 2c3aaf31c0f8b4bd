"""Shared training loop for the binary classifiers in this package.

All model families (rule-type classifiers, violation detectors, the rule
explainer) train the same way: Adam, binary cross-entropy on logits, early
stopping on development-set macro F1, best-development checkpoint restored
at the end.
"""

from __future__ import annotations

import copy
import random
from dataclasses import dataclass, field
from typing import Callable, Optional, Protocol, Sequence

import torch
from torch import nn

from modnorm.encoding import EncoderSettings
from modnorm.evalkit.metrics import macro_f1


class TrainingError(Exception):
    """Raised for unusable training data (missing positives, single class)."""


class BinaryTextModel(Protocol):
    """A torch module scoring prebuilt inputs with one logit per item."""

    def logits(self, items: Sequence) -> torch.Tensor: ...

    def parameters(self): ...


@dataclass
class TrainConfig:
    """Optimization settings shared by all model families."""

    epochs: int = 10
    learning_rate: float = 1e-5
    batch_size: Optional[int] = None  # None: 32 without history, 8 with
    patience: int = 5
    seed: int = 0
    decision_threshold: float = 0.5
    context_hidden: int = 768
    context_layers: int = 2
    context_cell: str = "gru"  # or "lstm"
    community_prefix_all: bool = False
    encoder: EncoderSettings = field(default_factory=EncoderSettings)

    def resolved_batch_size(self, uses_history: bool) -> int:
        if self.batch_size is not None:
            return self.batch_size
        return 8 if uses_history else 32

    def to_record(self) -> dict:
        return {
            "epochs": self.epochs,
            "learning_rate": self.learning_rate,
            "batch_size": self.batch_size,
            "patience": self.patience,
            "seed": self.seed,
            "decision_threshold": self.decision_threshold,
            "context_hidden": self.context_hidden,
            "context_layers": self.context_layers,
            "context_cell": self.context_cell,
            "community_prefix_all": self.community_prefix_all,
            "encoder": self.encoder.to_record(),
        }


@dataclass
class EpochStats:
    epoch: int
    train_loss: float
    dev_macro_f1: float


@dataclass
class FitResult:
    history: list[EpochStats]
    best_epoch: int
    best_dev_macro_f1: float
    stopped_early: bool


def set_seed(seed: int) -> None:
    random.seed(seed)
    torch.manual_seed(seed)


def predict_probs(
    model: BinaryTextModel, items: Sequence, batch_size: int = 32
) -> list[float]:
    """Score items in eval mode; deterministic for fixed weights."""
    module = model if isinstance(model, nn.Module) else None
    if module is not None:
        was_training = module.training
        module.eval()
    probs: list[float] = []
    with torch.no_grad():
        for start in range(0, len(items), batch_size):
            batch = items[start : start + batch_size]
            probs.extend(torch.sigmoid(model.logits(batch)).tolist())
    if module is not None and was_training:
        module.train()
    return probs


def fit_binary_classifier(
    model: BinaryTextModel,
    train_items: Sequence,
    train_labels: Sequence[int],
    dev_items: Sequence,
    dev_labels: Sequence[int],
    config: TrainConfig,
    uses_history: bool = False,
) -> FitResult:
    """Train with early stopping on dev macro F1; restores the best epoch.

    Patience counts epochs without strict improvement; among equal-best
    epochs the latest state wins (more consolidated weights), but a
    degraded dev score never replaces the best checkpoint.
    """
    if len(set(train_labels)) < 2:
        raise TrainingError("training data must contain both classes")
    set_seed(config.seed)
    assert isinstance(model, nn.Module)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    loss_fn = nn.BCEWithLogitsLoss()
    batch_size = config.resolved_batch_size(uses_history)
    rng = random.Random(config.seed)

    history: list[EpochStats] = []
    best_f1 = float("-inf")
    best_epoch = -1
    best_state: Optional[dict] = None
    since_best = 0
    stopped_early = False

    for epoch in range(config.epochs):
        model.train()
        order = list(range(len(train_items)))
        rng.shuffle(order)
        total_loss = 0.0
        batches = 0
        for start in range(0, len(order), batch_size):
            index_batch = order[start : start + batch_size]
            logits = model.logits([train_items[i] for i in index_batch])
            target = torch.tensor(
                [float(train_labels[i]) for i in index_batch], dtype=logits.dtype
            )
            loss = loss_fn(logits, target)
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            total_loss += float(loss.item())
            batches += 1

        dev_probs = predict_probs(model, dev_items, batch_size)
        dev_decisions = [
            1 if p >= config.decision_threshold else 0 for p in dev_probs
        ]
        dev_f1 = macro_f1(dev_decisions, list(dev_labels))
        history.append(EpochStats(epoch, total_loss / max(batches, 1), dev_f1))

        if dev_f1 > best_f1:
            best_f1 = dev_f1
            best_epoch = epoch
            best_state = copy.deepcopy(model.state_dict())
            since_best = 0
        else:
            if dev_f1 == best_f1:
                best_epoch = epoch
                best_state = copy.deepcopy(model.state_dict())
            since_best += 1
            if since_best >= config.patience:
                stopped_early = True
                break

    if best_state is not None:
        model.load_state_dict(best_state)
    model.eval()
    return FitResult(
        history=history,
        best_epoch=best_epoch,
        best_dev_macro_f1=best_f1,
        stopped_early=stopped_early,
    )


def head_gradient_check(
    head: nn.Module,
    features: torch.Tensor,
    labels: torch.Tensor,
    eps: float = 1e-5,
) -> float:
    """Max relative error between analytic and finite-difference head gradients.

    The head is copied to float64 so the comparison isolates the math from
    single-precision noise.
    """
    head64 = copy.deepcopy(head).double()
    x = features.detach().double()
    y = labels.detach().double()
    loss_fn = nn.BCEWithLogitsLoss()

    def loss_value() -> torch.Tensor:
        return loss_fn(head64(x).squeeze(-1), y)

    head64.zero_grad()
    loss_value().backward()
    analytic = [p.grad.detach().clone() for p in head64.parameters()]

    max_rel = 0.0
    with torch.no_grad():
        for param, grad in zip(head64.parameters(), analytic):
            flat_param = param.view(-1)
            flat_grad = grad.view(-1)
            for i in range(flat_param.numel()):
                original = flat_param[i].item()
                flat_param[i] = original + eps
                plus = loss_value().item()
                flat_param[i] = original - eps
                minus = loss_value().item()
                flat_param[i] = original
                fd = (plus - minus) / (2 * eps)
                a = flat_grad[i].item()
                denom = max(abs(a), abs(fd), 1e-8)
                max_rel = max(max_rel, abs(a - fd) / denom)
    return max_rel
