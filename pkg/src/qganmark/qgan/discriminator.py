"""Classical discriminator: dense 64 -> 64 -> 16 -> 1 with ReLU hidden
layers and a sigmoid head."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import QganmarkError

LAYER_SIZES = (64, 64, 16, 1)


@dataclass
class DiscriminatorModel:
    w1: np.ndarray  # (64, 64)
    b1: np.ndarray  # (64,)
    w2: np.ndarray  # (16, 64)
    b2: np.ndarray  # (16,)
    w3: np.ndarray  # (1, 16)
    b3: np.ndarray  # (1,)

    def __post_init__(self):
        shapes = {
            "w1": (64, 64), "b1": (64,),
            "w2": (16, 64), "b2": (16,),
            "w3": (1, 16), "b3": (1,),
        }
        for name, want in shapes.items():
            arr = np.asarray(getattr(self, name), dtype=float)
            setattr(self, name, arr)
            if arr.shape != want:
                raise QganmarkError(f"discriminator {name} has shape {arr.shape}, expected {want}")
            if not np.all(np.isfinite(arr)):
                raise QganmarkError(f"discriminator {name} contains non-finite values")

    def tensors(self) -> dict[str, np.ndarray]:
        return {k: getattr(self, k) for k in ("w1", "b1", "w2", "b2", "w3", "b3")}

    def copy(self) -> "DiscriminatorModel":
        return DiscriminatorModel(**{k: v.copy() for k, v in self.tensors().items()})


def init_discriminator(seed: int = 0) -> DiscriminatorModel:
    rng = np.random.default_rng(seed)
    def dense(out_dim, in_dim):
        return rng.normal(0.0, 1.0 / np.sqrt(in_dim), size=(out_dim, in_dim))
    return DiscriminatorModel(
        w1=dense(64, 64), b1=np.zeros(64),
        w2=dense(16, 64), b2=np.zeros(16),
        w3=dense(1, 16), b3=np.zeros(1),
    )


def _sigmoid(x):
    return np.where(x >= 0, 1.0 / (1.0 + np.exp(-x)), np.exp(x) / (1.0 + np.exp(x)))


def forward_batch(model: DiscriminatorModel, images: np.ndarray):
    """Probabilities for (B, 64) flattened images, plus the backprop cache."""
    x = np.atleast_2d(np.asarray(images, dtype=float)).reshape(-1, 64)
    a1 = x @ model.w1.T + model.b1
    h1 = np.maximum(a1, 0.0)
    a2 = h1 @ model.w2.T + model.b2
    h2 = np.maximum(a2, 0.0)
    logits = (h2 @ model.w3.T + model.b3)[:, 0]
    preds = _sigmoid(logits)
    return preds, (x, a1, h1, a2, h2)


def backward_batch(model: DiscriminatorModel, cache, dlogits: np.ndarray):
    """Gradients of sum_b dlogits_b * logit_b w.r.t. weights and inputs."""
    x, a1, h1, a2, h2 = cache
    dlogits = np.asarray(dlogits, dtype=float)
    grads = {}
    grads["w3"] = dlogits[None, :] @ h2
    grads["b3"] = np.array([dlogits.sum()])
    dh2 = np.outer(dlogits, model.w3[0])
    da2 = dh2 * (a2 > 0)
    grads["w2"] = da2.T @ h1
    grads["b2"] = da2.sum(axis=0)
    dh1 = da2 @ model.w2
    da1 = dh1 * (a1 > 0)
    grads["w1"] = da1.T @ x
    grads["b1"] = da1.sum(axis=0)
    dx = da1 @ model.w1
    return grads, dx


def discriminator_forward(model: DiscriminatorModel, image: np.ndarray) -> float:
    """Probability that a single 8x8 image is real; strictly inside (0, 1)."""
    preds, _ = forward_batch(model, np.asarray(image).reshape(1, 64))
    return float(preds[0])
