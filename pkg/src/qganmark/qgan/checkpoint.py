"""Model checkpoints as structured JSON text: architecture metadata, theta at
full precision, discriminator weights, schedule and seeds round-trip
losslessly (floats serialize via shortest-round-trip repr)."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..errors import DataError
from .discriminator import DiscriminatorModel
from .generator import GeneratorModel

FORMAT = "qganmark-qgan-checkpoint-v1"


def save_checkpoint(
    path: str | Path,
    generator: GeneratorModel,
    discriminator: DiscriminatorModel,
    *,
    seed: int | None = None,
    history: list | None = None,
    extra: dict | None = None,
) -> None:
    doc = {
        "format": FORMAT,
        "generator": {
            "n_sub": generator.n_sub,
            "n_qubits": generator.n_qubits,
            "n_ancilla": generator.n_ancilla,
            "depth": generator.depth,
            "theta": generator.theta.tolist(),
            "schedule": [[name, int(epochs)] for name, epochs in generator.schedule],
        },
        "discriminator": {k: v.tolist() for k, v in discriminator.tensors().items()},
        "seed": seed,
        "history": history,
        "extra": extra,
    }
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True))


def load_checkpoint(path: str | Path):
    """Returns (generator, discriminator, metadata dict)."""
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read checkpoint {path}: {exc}") from exc
    if doc.get("format") != FORMAT:
        raise DataError(f"{path} is not a {FORMAT} document")
    g = doc["generator"]
    generator = GeneratorModel(
        n_sub=g["n_sub"],
        n_qubits=g["n_qubits"],
        n_ancilla=g["n_ancilla"],
        depth=g["depth"],
        theta=np.array(g["theta"], dtype=float),
        schedule=[(name, int(epochs)) for name, epochs in g["schedule"]],
    )
    discriminator = DiscriminatorModel(
        **{k: np.array(v, dtype=float) for k, v in doc["discriminator"].items()}
    )
    meta = {k: doc.get(k) for k in ("seed", "history", "extra")}
    return generator, discriminator, meta
