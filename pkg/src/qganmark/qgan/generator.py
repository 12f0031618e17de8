"""Patch quantum generator: several sub-generator circuits, each producing
one horizontal band of pixels.

One sub-generator is an n-qubit circuit: RY embedding of the latent vector,
then `depth` repetitions of a parameterized RY layer followed by a CZ chain
over adjacent qubits. The highest-index qubits are ancillas; post-selecting
them on 0 yields the non-linear map that turns measured probabilities into
a pixel patch.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DegenerateStateError, QganmarkError
from ..sim import CircuitSpec, cz, ry, run_circuit, run_layered_pqc_batch
from ..sim.profiles import HardwareProfile

IMAGE_SIDE = 8
IMAGE_PIXELS = IMAGE_SIDE * IMAGE_SIDE

POSTSELECT_MIN_MASS = 1e-9

NOISELESS_LABEL = "noiseless"


def schedule_label(schedule) -> str:
    """Canonical string for a training schedule, e.g. 'ibm_athens+ibm_jakarta'."""
    return "+".join(name for name, _ in schedule) if schedule else "untrained"


@dataclass
class GeneratorModel:
    """Parameters and wiring of the full patch generator.

    theta has shape (n_sub, depth, n_qubits), in radians. schedule records
    (profile name, epochs) entries in the order they were trained.
    """

    n_sub: int
    n_qubits: int
    n_ancilla: int
    depth: int
    theta: np.ndarray
    schedule: list[tuple[str, int]] = field(default_factory=list)

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=float)
        if not 0 < self.n_ancilla < self.n_qubits:
            raise QganmarkError("need at least one ancilla and one data qubit")
        if self.patch_len * self.n_sub != IMAGE_PIXELS:
            raise QganmarkError(
                f"{self.n_sub} patches of {self.patch_len} pixels do not tile "
                f"a {IMAGE_PIXELS}-pixel image"
            )
        if self.theta.shape != (self.n_sub, self.depth, self.n_qubits):
            raise QganmarkError(f"theta shape {self.theta.shape} does not match architecture")
        if not np.all(np.isfinite(self.theta)):
            raise QganmarkError("theta contains non-finite values")

    @property
    def patch_len(self) -> int:
        return 2 ** (self.n_qubits - self.n_ancilla)

    @property
    def n_params(self) -> int:
        return self.theta.size

    def label(self) -> str:
        return schedule_label(self.schedule)

    def copy(self) -> "GeneratorModel":
        return GeneratorModel(
            self.n_sub,
            self.n_qubits,
            self.n_ancilla,
            self.depth,
            self.theta.copy(),
            list(self.schedule),
        )


def init_generator(
    n_sub: int = 4,
    n_qubits: int = 5,
    n_ancilla: int = 1,
    depth: int = 5,
    seed: int = 0,
) -> GeneratorModel:
    """Fresh model with theta drawn uniformly from [0, pi)."""
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, np.pi, size=(n_sub, depth, n_qubits))
    return GeneratorModel(n_sub, n_qubits, n_ancilla, depth, theta)


def sample_latents(rng: np.random.Generator, count: int, n_qubits: int) -> np.ndarray:
    """Latent vectors, each component uniform on [0, pi/2)."""
    return rng.uniform(0.0, np.pi / 2.0, size=(count, n_qubits))


def embed_latent(z: np.ndarray) -> CircuitSpec:
    """RY(z_q) on qubit q for every component of the latent vector."""
    z = np.asarray(z, dtype=float)
    if z.ndim != 1 or z.size == 0:
        raise QganmarkError(f"latent vector must be 1-D and nonempty, got shape {z.shape}")
    if not np.all(np.isfinite(z)):
        raise QganmarkError("latent vector contains non-finite values")
    return CircuitSpec(z.size, [ry(q, z[q]) for q in range(z.size)])


def subgen_circuit(theta_i: np.ndarray, z: np.ndarray) -> CircuitSpec:
    """Embedding plus depth x (RY layer, CZ chain over adjacent qubits)."""
    theta_i = np.asarray(theta_i, dtype=float)
    circuit = embed_latent(z)
    n = circuit.n_qubits
    if theta_i.ndim != 2 or theta_i.shape[1] != n:
        raise QganmarkError(f"theta block shape {theta_i.shape} does not match {n} qubits")
    for d in range(theta_i.shape[0]):
        layer = [ry(q, theta_i[d, q]) for q in range(n)]
        layer += [cz(q, q + 1) for q in range(n - 1)]
        circuit = circuit.extended(layer)
    return circuit


def subgenerator_forward(
    theta_i: np.ndarray, z: np.ndarray, profile: HardwareProfile | None = None
) -> np.ndarray:
    """Measured distribution of one sub-generator (readout noise included)."""
    return run_circuit(subgen_circuit(theta_i, z), profile)


def postselect_ancilla(probs: np.ndarray, n_ancilla: int) -> np.ndarray:
    """Condition on all ancilla qubits reading 0 and renormalize.

    Ancillas are the highest-index qubits, i.e. the least significant bits
    of the basis index, so the retained outcomes are every 2^n_ancilla-th
    entry.
    """
    probs = np.asarray(probs, dtype=float)
    if n_ancilla < 0 or 2 ** n_ancilla >= probs.size:
        raise QganmarkError(f"cannot post-select {n_ancilla} ancillas from {probs.size} outcomes")
    kept = probs[:: 2 ** n_ancilla]
    mass = kept.sum()
    if mass <= POSTSELECT_MIN_MASS:
        raise DegenerateStateError(f"post-selection probability {mass} below threshold")
    return kept / mass


def normalize_patch(g: np.ndarray) -> np.ndarray:
    """Pixel intensities g / max(g); the brightest pixel is exactly 1."""
    g = np.asarray(g, dtype=float)
    peak = g.max()
    if peak <= 0.0:
        raise DegenerateStateError("cannot normalize an all-zero patch")
    return g / peak


def assemble_image(patches: list[np.ndarray]) -> np.ndarray:
    """Row-major concatenation of patches into an 8x8 image."""
    flat = np.concatenate([np.asarray(p, dtype=float).ravel() for p in patches])
    if flat.size != IMAGE_PIXELS:
        raise QganmarkError(f"patches hold {flat.size} pixels, expected {IMAGE_PIXELS}")
    return flat.reshape(IMAGE_SIDE, IMAGE_SIDE)


def disassemble_image(image: np.ndarray, n_sub: int) -> list[np.ndarray]:
    flat = np.asarray(image, dtype=float).ravel()
    if flat.size != IMAGE_PIXELS or flat.size % n_sub:
        raise QganmarkError("image does not split evenly into patches")
    return list(flat.reshape(n_sub, -1))


def generator_forward(
    model: GeneratorModel, z: np.ndarray, profile: HardwareProfile | None = None
) -> np.ndarray:
    """Full generator pass: one patch per sub-generator, assembled to 8x8."""
    patches = []
    for i in range(model.n_sub):
        probs = subgenerator_forward(model.theta[i], z, profile)
        patches.append(normalize_patch(postselect_ancilla(probs, model.n_ancilla)))
    return assemble_image(patches)


def postselect_batch(probs: np.ndarray, n_ancilla: int) -> np.ndarray:
    """Vectorized postselect_ancilla over rows of (B, 2^n)."""
    kept = probs[:, :: 2 ** n_ancilla]
    mass = kept.sum(axis=1)
    if np.any(mass <= POSTSELECT_MIN_MASS):
        raise DegenerateStateError(
            f"post-selection probability {mass.min()} below threshold in batch"
        )
    return kept / mass[:, None]


def normalize_batch(g: np.ndarray) -> np.ndarray:
    peak = g.max(axis=1)
    if np.any(peak <= 0.0):
        raise DegenerateStateError("all-zero patch in batch")
    return g / peak[:, None]


def generate_image_batch(
    model: GeneratorModel, latents: np.ndarray, profile: HardwareProfile | None = None
) -> np.ndarray:
    """(B, n_qubits) latents -> (B, 64) pixel rows, via the batched engine."""
    latents = np.atleast_2d(np.asarray(latents, dtype=float))
    batch = latents.shape[0]
    out = np.empty((batch, IMAGE_PIXELS))
    plen = model.patch_len
    for i in range(model.n_sub):
        block = np.broadcast_to(model.theta[i], (batch, model.depth, model.n_qubits))
        probs = run_layered_pqc_batch(latents, block, profile)
        patches = normalize_batch(postselect_batch(probs, model.n_ancilla))
        out[:, i * plen : (i + 1) * plen] = patches
    return out


def generate_images(model: GeneratorModel, profile: HardwareProfile | None, count: int, seed: int):
    """A labeled image set from `count` fresh seeded latents."""
    from ..imaging import LabeledImageSet

    if count < 0:
        raise QganmarkError("count must be nonnegative")
    rng = np.random.default_rng(seed)
    latents = sample_latents(rng, count, model.n_qubits)
    if count == 0:
        pixels = np.empty((0, IMAGE_PIXELS))
    else:
        pixels = generate_image_batch(model, latents, profile)
    infer = profile.name if profile is not None else NOISELESS_LABEL
    return LabeledImageSet(
        pixels=pixels,
        train_labels=[model.label()] * count,
        infer_labels=[infer] * count,
        seeds=[seed] * count,
    )
