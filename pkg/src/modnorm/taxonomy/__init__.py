"""Rule-type taxonomy: fine/coarse types, classifiers, cross validation.

The type definitions load eagerly; classifier and cross-validation machinery
(which pull in torch) load on first attribute access.
"""

from modnorm.taxonomy.types import (
    COARSE_FROM_FINE,
    AnnotatedRule,
    CoarseRuleType,
    FineRuleType,
    coarsen,
)

_LAZY = {
    "CrossvalResult": "modnorm.taxonomy.crossval",
    "StratificationError": "modnorm.taxonomy.crossval",
    "crossval_rule_classifier": "modnorm.taxonomy.crossval",
    "stratified_folds": "modnorm.taxonomy.crossval",
    "RuleTypeModel": "modnorm.taxonomy.model",
    "RuleTypeScorer": "modnorm.taxonomy.model",
    "classify_rule": "modnorm.taxonomy.model",
    "load_rule_suite": "modnorm.taxonomy.model",
    "save_rule_suite": "modnorm.taxonomy.model",
    "taxonomy_train_config": "modnorm.taxonomy.model",
    "train_rule_classifier": "modnorm.taxonomy.model",
    "train_rule_suite": "modnorm.taxonomy.model",
}

__all__ = [
    "COARSE_FROM_FINE",
    "AnnotatedRule",
    "CoarseRuleType",
    "FineRuleType",
    "coarsen",
    *sorted(_LAZY),
]


def __getattr__(name: str):
    module_name = _LAZY.get(name)
    if module_name is None:
        raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
    import importlib

    return getattr(importlib.import_module(module_name), name)
