"""Type-based norm-violation detection in four context variants."""

from modnorm.detector.model import (
    DetectorManifest,
    DetectorModel,
    SequenceClassifier,
    VariantMismatchError,
    classification_head,
    detection_examples,
    load_detector,
    predict,
    predict_many,
    save_detector,
    train_detector,
)
from modnorm.detector.variants import (
    DetectionExample,
    DetectorVariant,
    build_input,
    community_prefix,
)

__all__ = [
    "DetectionExample",
    "DetectorManifest",
    "DetectorModel",
    "DetectorVariant",
    "SequenceClassifier",
    "VariantMismatchError",
    "build_input",
    "classification_head",
    "community_prefix",
    "detection_examples",
    "load_detector",
    "predict",
    "predict_many",
    "save_detector",
    "train_detector",
]
