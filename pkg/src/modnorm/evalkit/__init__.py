"""Metrics, baselines, and confusion analyses.

Pure metric machinery loads eagerly; the baselines (which pull in the
detector stack) load on first attribute access.
"""

from modnorm.evalkit.confusion import (
    AggregateConfusion,
    SplitMismatchError,
    aggregate_confusion,
)
from modnorm.evalkit.metrics import (
    MetricError,
    binary_counts,
    f1_from_counts,
    macro_f1,
    mean_and_ci95,
    tune_threshold,
)
from modnorm.evalkit.records import (
    PredictionRecord,
    read_predictions,
    thresholded_record,
    write_predictions,
)

_LAZY = {
    "ABUSIVE_TYPES": "modnorm.evalkit.baselines",
    "ConstantToxicityClient": "modnorm.evalkit.baselines",
    "EvalReport": "modnorm.evalkit.baselines",
    "StubToxicityClient": "modnorm.evalkit.baselines",
    "ToxicityClient": "modnorm.evalkit.baselines",
    "ToxicityError": "modnorm.evalkit.baselines",
    "TypeScore": "modnorm.evalkit.baselines",
    "baseline_incivil_hate": "modnorm.evalkit.baselines",
    "baseline_majority": "modnorm.evalkit.baselines",
    "baseline_toxicity": "modnorm.evalkit.baselines",
    "read_report": "modnorm.evalkit.report",
    "render_table": "modnorm.evalkit.report",
    "report_from_predictions": "modnorm.evalkit.report",
    "write_report": "modnorm.evalkit.report",
}

__all__ = [
    "AggregateConfusion",
    "MetricError",
    "PredictionRecord",
    "SplitMismatchError",
    "aggregate_confusion",
    "binary_counts",
    "f1_from_counts",
    "macro_f1",
    "mean_and_ci95",
    "read_predictions",
    "thresholded_record",
    "tune_threshold",
    "write_predictions",
    *sorted(_LAZY),
]


def __getattr__(name: str):
    module_name = _LAZY.get(name)
    if module_name is None:
        raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
    import importlib

    return getattr(importlib.import_module(module_name), name)
