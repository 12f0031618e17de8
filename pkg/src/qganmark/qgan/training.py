"""Adversarial training of the patch generator under a hardware schedule.

Both networks take plain SGD steps on a shared binary cross-entropy loss.
Generator gradients use the parameter-shift rule on the measured
distributions: dP/dtheta_k = (P(theta_k + pi/2) - P(theta_k - pi/2)) / 2,
chained through post-selection, the max-normalization (whose argmax pixel is
treated as locally constant), image assembly, the discriminator, and the
loss. Each training step runs every shifted circuit of a sample as one
batched engine call.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateStateError, QganmarkError
from ..sim import run_layered_pqc_batch
from ..sim.profiles import HardwareProfile
from .discriminator import DiscriminatorModel, backward_batch, forward_batch, init_discriminator
from .generator import (
    NOISELESS_LABEL,
    GeneratorModel,
    init_generator,
    normalize_batch,
    postselect_batch,
    sample_latents,
)

log = logging.getLogger(__name__)

PRED_CLAMP = 1e-7


@dataclass(frozen=True)
class GanTrainConfig:
    epochs: int = 500
    lr_gen: float = 0.2
    lr_disc: float = 0.01
    batch_size: int = 8
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 0:
            raise QganmarkError("epochs must be nonnegative")
        if self.lr_gen < 0 or self.lr_disc < 0:
            raise QganmarkError("learning rates must be nonnegative")
        if self.batch_size < 1:
            raise QganmarkError("batch_size must be positive")


def bce_loss(pred: float, label: int) -> float:
    """Binary cross-entropy with the prediction clamped away from {0, 1}."""
    p = min(max(float(pred), PRED_CLAMP), 1.0 - PRED_CLAMP)
    return -(label * np.log(p) + (1 - label) * np.log(1.0 - p))


def _shift_blocks(theta: np.ndarray) -> np.ndarray:
    """Angle blocks for one engine sweep: per sub-generator, the base block
    followed by +pi/2 and -pi/2 shifts of every parameter.

    Returns (n_sub * (1 + 2*P), depth, n) with P = depth * n; within one
    sub-generator group, row 0 is the base and rows 1+2p / 2+2p carry the
    +/- shift of flat parameter p.
    """
    n_sub, depth, n = theta.shape
    n_params = depth * n
    rows = 1 + 2 * n_params
    block = np.repeat(theta[:, None, :, :], rows, axis=1)  # (n_sub, rows, depth, n)
    flat = block.reshape(n_sub, rows, n_params)
    for p in range(n_params):
        flat[:, 1 + 2 * p, p] += np.pi / 2.0
        flat[:, 2 + 2 * p, p] -= np.pi / 2.0
    return flat.reshape(n_sub * rows, depth, n)


def generator_gradient(
    model: GeneratorModel,
    z: np.ndarray,
    profile: HardwareProfile | None,
    disc: DiscriminatorModel,
) -> np.ndarray:
    """Parameter-shift gradient of BCE(D(G(z)), real) w.r.t. every theta."""
    block = _shift_blocks(model.theta)
    probs = run_layered_pqc_batch(np.asarray(z, dtype=float), block, profile)
    rows = 1 + 2 * model.depth * model.n_qubits
    probs = probs.reshape(model.n_sub, rows, -1)
    loss, grad, _ = _sample_loss_and_grad(model, probs, disc)
    return grad


def _sample_loss_and_grad(model: GeneratorModel, probs: np.ndarray, disc: DiscriminatorModel):
    """Loss, theta gradient and the generated image for one latent sample.

    probs is (n_sub, 1 + 2P, 2^n) straight from the engine sweep.
    """
    n_sub, rows, dim = probs.shape
    n_params = (rows - 1) // 2
    base = probs[:, 0, :]

    kept = base[:, :: 2 ** model.n_ancilla]
    mass = kept.sum(axis=1)
    if np.any(mass <= 1e-9):
        raise DegenerateStateError("post-selection mass vanished during training")
    g = kept / mass[:, None]
    peaks = np.argmax(g, axis=1)
    pixels = g / g[np.arange(n_sub), peaks][:, None]
    image = pixels.reshape(1, -1)

    pred, cache = forward_batch(disc, image)
    loss = bce_loss(pred[0], 1)
    dlogit = pred[0] - 1.0
    _, d_image = backward_batch(disc, cache, np.array([dlogit]))
    d_pixels = d_image.reshape(n_sub, -1)

    # normalize backward: peak pixel is constant 1, others scale by 1/g_peak
    grad = np.zeros((n_sub, n_params))
    stride = 2 ** model.n_ancilla
    for i in range(n_sub):
        m = peaks[i]
        gm = g[i, m]
        dg = d_pixels[i] / gm
        dg[m] = -(np.dot(d_pixels[i], g[i]) - d_pixels[i, m] * g[i, m]) / gm ** 2
        # postselect backward: g = kept / mass
        dk = (dg - np.dot(dg, g[i])) / mass[i]
        w = np.zeros(dim)
        w[::stride] = dk
        shifts = (probs[i, 1::2, :] - probs[i, 2::2, :]) / 2.0  # (P, dim)
        grad[i] = shifts @ w
    return loss, grad.reshape(model.theta.shape), image[0]


def _as_pixel_rows(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 3:
        arr = arr.reshape(arr.shape[0], -1)
    if arr.ndim != 2 or arr.shape[1] != 64:
        raise QganmarkError(f"training data must be N x 64 pixels, got shape {arr.shape}")
    if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
        raise QganmarkError("training pixels must lie in [0, 1]")
    return arr


def train_qgan(
    data,
    schedule: list[tuple[HardwareProfile | None, int]],
    cfg: GanTrainConfig,
    *,
    generator: GeneratorModel | None = None,
    discriminator: DiscriminatorModel | None = None,
    on_epoch=None,
) -> tuple[GeneratorModel, DiscriminatorModel]:
    """Alternating per-batch updates under an ordered hardware schedule.

    Each batch takes one discriminator step on real plus fake images, then
    one generator step against the refreshed discriminator. The schedule
    entries actually trained are appended to the generator's record. Pass
    `generator`/`discriminator` to continue training existing models.
    """
    reals = _as_pixel_rows(data)
    if reals.shape[0] == 0:
        raise QganmarkError("training data is empty")
    if not schedule:
        raise QganmarkError("schedule is empty")

    seed_seq = np.random.SeedSequence(cfg.seed)
    init_seed, stream_seed = (s.generate_state(1)[0] for s in seed_seq.spawn(2))
    gen = generator.copy() if generator is not None else init_generator(seed=init_seed)
    disc = discriminator.copy() if discriminator is not None else init_discriminator(
        seed=init_seed + 1
    )
    rng = np.random.default_rng(stream_seed)

    n_data = reals.shape[0]
    bsz = min(cfg.batch_size, n_data)

    for profile, epochs in schedule:
        name = profile.name if profile is not None else NOISELESS_LABEL
        for epoch in range(epochs):
            perm = rng.permutation(n_data)
            d_losses, g_losses = [], []
            for lo in range(0, n_data - bsz + 1, bsz):
                real_batch = reals[perm[lo : lo + bsz]]
                latents = sample_latents(rng, bsz, gen.n_qubits)
                try:
                    d_loss, g_loss = _train_step(gen, disc, real_batch, latents, profile, cfg)
                except DegenerateStateError as exc:
                    log.warning("skipping batch at epoch %d on %s: %s", epoch, name, exc)
                    continue
                d_losses.append(d_loss)
                g_losses.append(g_loss)
            if on_epoch is not None:
                on_epoch(name, epoch, float(np.mean(d_losses)), float(np.mean(g_losses)))
        gen.schedule.append((name, epochs))
    return gen, disc


def _train_step(
    gen: GeneratorModel,
    disc: DiscriminatorModel,
    real_batch: np.ndarray,
    latents: np.ndarray,
    profile: HardwareProfile | None,
    cfg: GanTrainConfig,
) -> tuple[float, float]:
    bsz = real_batch.shape[0]
    rows = 1 + 2 * gen.depth * gen.n_qubits
    block = _shift_blocks(gen.theta)

    sweeps = [
        run_layered_pqc_batch(latents[s], block, profile).reshape(gen.n_sub, rows, -1)
        for s in range(bsz)
    ]

    # discriminator step on real + fake
    fakes = np.empty((bsz, 64))
    for s in range(bsz):
        base = sweeps[s][:, 0, :]
        g = postselect_batch(base, gen.n_ancilla)
        fakes[s] = normalize_batch(g).reshape(-1)
    preds_real, cache_real = forward_batch(disc, real_batch)
    preds_fake, cache_fake = forward_batch(disc, fakes)
    d_loss = float(
        np.mean([bce_loss(p, 1) for p in preds_real])
        + np.mean([bce_loss(p, 0) for p in preds_fake])
    )
    grads_real, _ = backward_batch(disc, cache_real, (preds_real - 1.0) / bsz)
    grads_fake, _ = backward_batch(disc, cache_fake, preds_fake / bsz)
    for name, grad in grads_real.items():
        setattr(disc, name, getattr(disc, name) - cfg.lr_disc * (grad + grads_fake[name]))

    # generator step against the updated discriminator
    g_loss_sum = 0.0
    theta_grad = np.zeros_like(gen.theta)
    for s in range(bsz):
        loss, grad, _ = _sample_loss_and_grad(gen, sweeps[s], disc)
        g_loss_sum += loss
        theta_grad += grad
    gen.theta = gen.theta - cfg.lr_gen * (theta_grad / bsz)
    return d_loss, g_loss_sum / bsz
