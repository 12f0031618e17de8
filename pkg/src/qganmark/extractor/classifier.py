"""Watermark-extraction CNN: attributes generated images to the hardware
schedule their generator was trained on.

Architecture: three 3x3 stride-1 conv layers (32, 64, 128 filters, ReLU),
each followed by 2x2 max pooling, then a 512-unit ReLU dense layer and a
softmax head over the schedule labels. 8x8 inputs are upscaled
(nearest-neighbor, preserving the blocky noise signature) and the gray
channel is replicated to 3 so the first conv layer carries its canonical
896 parameters. Trained with mini-batch adaptive-moment steps on
categorical cross-entropy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import json
from pathlib import Path

import numpy as np

from ..errors import ConfigError, DataError
from ..imaging import LabeledImageSet, upscale
from . import layers

MIN_INPUT_SIDE = 18  # three conv+pool stages need at least this much


@dataclass(frozen=True)
class ClassifierConfig:
    n_classes: int
    input_side: int = 150
    channels: int = 3
    conv_filters: tuple[int, int, int] = (32, 64, 128)
    kernel: int = 3
    pool: int = 2
    dense_units: int = 512
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    batch_size: int = 64
    epochs: int = 15
    val_fraction: float = 0.2

    def __post_init__(self):
        if self.n_classes < 2:
            raise ConfigError("classifier needs at least two classes")
        if self.input_side < MIN_INPUT_SIDE:
            raise ConfigError(
                f"input side {self.input_side} below minimum {MIN_INPUT_SIDE} "
                "for three conv+pool stages"
            )
        if self.batch_size < 1 or self.epochs < 0:
            raise ConfigError("batch_size must be positive and epochs nonnegative")
        if not 0.0 < self.val_fraction < 1.0:
            raise ConfigError("val_fraction must be in (0, 1)")

    def shape_chain(self) -> list[tuple[int, int]]:
        """(side, channels) after each conv+pool stage, ending at flatten."""
        side, ch = self.input_side, self.channels
        chain = []
        for filters in self.conv_filters:
            side = layers.conv_out_side(side, self.kernel)
            side_pooled = layers.pool_out_side(side, self.pool)
            chain.append((side, filters))
            chain.append((side_pooled, filters))
            side, ch = side_pooled, filters
        return chain

    def flatten_features(self) -> int:
        side, ch = self.shape_chain()[-1]
        return side * side * ch


PARAM_ORDER = (
    "conv1_w", "conv1_b", "conv2_w", "conv2_b", "conv3_w", "conv3_b",
    "dense_w", "dense_b", "out_w", "out_b",
)


@dataclass
class WatermarkClassifier:
    config: ClassifierConfig
    params: dict[str, np.ndarray]
    label_map: list[str] = field(default_factory=list)

    def __post_init__(self):
        if len(self.label_map) != self.config.n_classes:
            raise ConfigError("label map size must equal n_classes")
        want = set(PARAM_ORDER)
        if set(self.params) != want:
            raise ConfigError(f"parameter tensors {sorted(self.params)} != {sorted(want)}")

    def conv_parameter_counts(self) -> list[int]:
        return [
            self.params[f"conv{i}_w"].size + self.params[f"conv{i}_b"].size
            for i in (1, 2, 3)
        ]

    def parameter_count(self) -> int:
        return sum(v.size for v in self.params.values())


def init_params(cfg: ClassifierConfig, seed: int) -> dict[str, np.ndarray]:
    rng = np.random.default_rng(seed)
    params: dict[str, np.ndarray] = {}
    c_in = cfg.channels
    for i, filters in enumerate(cfg.conv_filters, start=1):
        fan_in = cfg.kernel * cfg.kernel * c_in
        params[f"conv{i}_w"] = rng.normal(
            0.0, np.sqrt(2.0 / fan_in), size=(cfg.kernel, cfg.kernel, c_in, filters)
        )
        params[f"conv{i}_b"] = np.zeros(filters)
        c_in = filters
    flat = cfg.flatten_features()
    params["dense_w"] = rng.normal(0.0, np.sqrt(2.0 / flat), size=(flat, cfg.dense_units))
    params["dense_b"] = np.zeros(cfg.dense_units)
    params["out_w"] = rng.normal(
        0.0, np.sqrt(2.0 / cfg.dense_units), size=(cfg.dense_units, cfg.n_classes)
    )
    params["out_b"] = np.zeros(cfg.n_classes)
    return params


def prepare_inputs(images8: np.ndarray, side: int) -> np.ndarray:
    """8x8 images -> (N, side, side, 3): nearest upscaling, gray replicated."""
    images8 = np.asarray(images8, dtype=float).reshape(-1, 8, 8)
    out = np.empty((images8.shape[0], side, side, 3))
    for i, img in enumerate(images8):
        big = upscale(img, side, method="nearest")
        out[i] = big[:, :, None]
    return out


def forward(params: dict, x: np.ndarray):
    """Logits plus the cache needed for backprop."""
    caches = {}
    h = x
    for i in (1, 2, 3):
        h, caches[f"conv{i}_x"] = layers.conv_forward(h, params[f"conv{i}_w"], params[f"conv{i}_b"])
        h, caches[f"relu{i}_x"] = layers.relu_forward(h)
        h, caches[f"pool{i}"] = layers.maxpool_forward(h)
    caches["flat_shape"] = h.shape
    h = h.reshape(h.shape[0], -1)
    h, caches["dense_x"] = layers.dense_forward(h, params["dense_w"], params["dense_b"])
    h, caches["relu4_x"] = layers.relu_forward(h)
    logits, caches["out_x"] = layers.dense_forward(h, params["out_w"], params["out_b"])
    return logits, caches


def backward(params: dict, caches: dict, dlogits: np.ndarray) -> dict[str, np.ndarray]:
    grads: dict[str, np.ndarray] = {}
    dh, grads["out_w"], grads["out_b"] = layers.dense_backward(
        dlogits, caches["out_x"], params["out_w"]
    )
    dh = layers.relu_backward(dh, caches["relu4_x"])
    dh, grads["dense_w"], grads["dense_b"] = layers.dense_backward(
        dh, caches["dense_x"], params["dense_w"]
    )
    dh = dh.reshape(caches["flat_shape"])
    for i in (3, 2, 1):
        dh = layers.maxpool_backward(dh, caches[f"pool{i}"])
        dh = layers.relu_backward(dh, caches[f"relu{i}_x"])
        dh, grads[f"conv{i}_w"], grads[f"conv{i}_b"] = layers.conv_backward(
            dh, caches[f"conv{i}_x"], params[f"conv{i}_w"]
        )
    return grads


def loss_and_grads(params: dict, x: np.ndarray, onehot: np.ndarray):
    """Mean cross-entropy and gradients for one mini-batch."""
    logits, caches = forward(params, x)
    probs = layers.softmax(logits)
    loss = layers.cross_entropy(probs, onehot)
    dlogits = (probs - onehot) / x.shape[0]
    return loss, backward(params, caches, dlogits)


class _Adam:
    def __init__(self, params: dict, lr: float, beta1: float, beta2: float, eps: float):
        self.lr, self.b1, self.b2, self.eps = lr, beta1, beta2, eps
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, params: dict, grads: dict) -> None:
        self.t += 1
        for k in params:
            self.m[k] = self.b1 * self.m[k] + (1 - self.b1) * grads[k]
            self.v[k] = self.b2 * self.v[k] + (1 - self.b2) * grads[k] ** 2
            mhat = self.m[k] / (1 - self.b1 ** self.t)
            vhat = self.v[k] / (1 - self.b2 ** self.t)
            params[k] = params[k] - self.lr * mhat / (np.sqrt(vhat) + self.eps)


def train_classifier(
    dataset: LabeledImageSet, cfg: ClassifierConfig | None, seed: int = 0
) -> tuple[WatermarkClassifier, list[dict]]:
    """Supervised attribution training on (image, training-hardware) pairs.

    Splits 80/20 into train/validation, returns the trained classifier and
    a per-epoch history of losses and validation accuracy.
    """
    labels = sorted(set(dataset.train_labels))
    if len(labels) < 2:
        raise DataError("dataset holds a single class; attribution needs at least two")
    if cfg is None:
        cfg = ClassifierConfig(n_classes=len(labels))
    elif cfg.n_classes != len(labels):
        raise ConfigError(f"config expects {cfg.n_classes} classes, dataset has {len(labels)}")

    label_idx = {name: i for i, name in enumerate(labels)}
    y = np.array([label_idx[name] for name in dataset.train_labels])
    x = prepare_inputs(dataset.images8(), cfg.input_side)

    rng = np.random.default_rng(seed)
    perm = rng.permutation(len(y))
    n_val = max(1, int(round(cfg.val_fraction * len(y))))
    val_idx, train_idx = perm[:n_val], perm[n_val:]
    if train_idx.size == 0:
        raise DataError("dataset too small for an 80/20 split")

    params = init_params(cfg, seed=rng.integers(2 ** 31))
    opt = _Adam(params, cfg.lr, cfg.beta1, cfg.beta2, cfg.eps)
    onehot = np.eye(cfg.n_classes)[y]

    history = []
    for epoch in range(cfg.epochs):
        order = rng.permutation(train_idx)
        losses = []
        for lo in range(0, len(order), cfg.batch_size):
            sel = order[lo : lo + cfg.batch_size]
            loss, grads = loss_and_grads(params, x[sel], onehot[sel])
            opt.step(params, grads)
            losses.append(loss)
        val_probs = predict_batch_params(params, x[val_idx], cfg)
        val_acc = float(np.mean(np.argmax(val_probs, axis=1) == y[val_idx]))
        val_loss = layers.cross_entropy(val_probs, onehot[val_idx])
        history.append(
            {
                "epoch": epoch,
                "train_loss": float(np.mean(losses)) if losses else float("nan"),
                "val_loss": val_loss,
                "val_accuracy": val_acc,
            }
        )
    clf = WatermarkClassifier(cfg, params, labels)
    return clf, history


def predict_batch_params(params: dict, x: np.ndarray, cfg: ClassifierConfig) -> np.ndarray:
    probs = np.empty((x.shape[0], cfg.n_classes))
    for lo in range(0, x.shape[0], cfg.batch_size):
        logits, _ = forward(params, x[lo : lo + cfg.batch_size])
        probs[lo : lo + cfg.batch_size] = layers.softmax(logits)
    return probs


def predict(clf: WatermarkClassifier, image: np.ndarray) -> np.ndarray:
    """Probability vector over schedule labels for one prepared input."""
    x = np.asarray(image, dtype=float)
    side = clf.config.input_side
    if x.shape != (side, side, clf.config.channels):
        raise DataError(f"image shape {x.shape} does not match classifier input {side}")
    logits, _ = forward(clf.params, x[None])
    return layers.softmax(logits)[0]


def predict_images8(clf: WatermarkClassifier, images8: np.ndarray) -> np.ndarray:
    """Probability matrix for raw 8x8 images (upscaled internally)."""
    x = prepare_inputs(images8, clf.config.input_side)
    return predict_batch_params(clf.params, x, clf.config)


# ---------------------------------------------------------------------------
# checkpoints

FORMAT = "qganmark-classifier-checkpoint-v1"


def save_classifier(clf: WatermarkClassifier, path: str | Path, extra: dict | None = None) -> None:
    doc = {
        "format": FORMAT,
        "extra": extra,
        "config": {
            "n_classes": clf.config.n_classes,
            "input_side": clf.config.input_side,
            "channels": clf.config.channels,
            "conv_filters": list(clf.config.conv_filters),
            "kernel": clf.config.kernel,
            "pool": clf.config.pool,
            "dense_units": clf.config.dense_units,
            "lr": clf.config.lr,
            "beta1": clf.config.beta1,
            "beta2": clf.config.beta2,
            "eps": clf.config.eps,
            "batch_size": clf.config.batch_size,
            "epochs": clf.config.epochs,
            "val_fraction": clf.config.val_fraction,
        },
        "label_map": clf.label_map,
        "params": {k: v.tolist() for k, v in clf.params.items()},
    }
    Path(path).write_text(json.dumps(doc, sort_keys=True))


def load_classifier(path: str | Path) -> tuple[WatermarkClassifier, dict]:
    """Returns the classifier plus whatever extras were stored alongside it
    (threshold, training history)."""
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read classifier checkpoint {path}: {exc}") from exc
    if doc.get("format") != FORMAT:
        raise DataError(f"{path} is not a {FORMAT} document")
    raw = dict(doc["config"])
    raw["conv_filters"] = tuple(raw["conv_filters"])
    cfg = ClassifierConfig(**raw)
    params = {k: np.array(v, dtype=float) for k, v in doc["params"].items()}
    clf = WatermarkClassifier(cfg, params, list(doc["label_map"]))
    return clf, doc.get("extra") or {}
