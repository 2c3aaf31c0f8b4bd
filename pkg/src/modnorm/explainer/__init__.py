"""Text-based rule-violation model and its pair construction."""

from modnorm.explainer.model import (
    ExplainerManifest,
    ExplainerModel,
    ExplainerVariant,
    build_pair_input,
    explain,
    load_explainer,
    save_explainer,
    score_pairs,
    train_explainer,
)
from modnorm.explainer.pairs import (
    PairProvenance,
    PairSet,
    RulePairExample,
    build_augmented_eval,
    build_training_pairs,
    eval_items_from_entries,
)

__all__ = [
    "ExplainerManifest",
    "ExplainerModel",
    "ExplainerVariant",
    "PairProvenance",
    "PairSet",
    "RulePairExample",
    "build_augmented_eval",
    "build_pair_input",
    "build_training_pairs",
    "eval_items_from_entries",
    "explain",
    "load_explainer",
    "save_explainer",
    "score_pairs",
    "train_explainer",
]
