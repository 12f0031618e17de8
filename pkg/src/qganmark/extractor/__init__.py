from .classifier import (
    ClassifierConfig,
    WatermarkClassifier,
    init_params,
    load_classifier,
    loss_and_grads,
    predict,
    predict_images8,
    prepare_inputs,
    save_classifier,
    train_classifier,
)
from .verify import NOT_PROVEN, OWNED, Verdict, compute_threshold, verify_ownership

__all__ = [
    "ClassifierConfig",
    "NOT_PROVEN",
    "OWNED",
    "Verdict",
    "WatermarkClassifier",
    "compute_threshold",
    "init_params",
    "load_classifier",
    "loss_and_grads",
    "predict",
    "predict_images8",
    "prepare_inputs",
    "save_classifier",
    "train_classifier",
    "verify_ownership",
]
