from .checkpoint import load_checkpoint, save_checkpoint
from .discriminator import (
    DiscriminatorModel,
    discriminator_forward,
    init_discriminator,
)
from .generator import (
    GeneratorModel,
    assemble_image,
    disassemble_image,
    embed_latent,
    generate_image_batch,
    generate_images,
    generator_forward,
    init_generator,
    normalize_patch,
    postselect_ancilla,
    sample_latents,
    schedule_label,
    subgen_circuit,
    subgenerator_forward,
)
from .training import GanTrainConfig, bce_loss, generator_gradient, train_qgan

__all__ = [
    "DiscriminatorModel",
    "GanTrainConfig",
    "GeneratorModel",
    "assemble_image",
    "bce_loss",
    "disassemble_image",
    "discriminator_forward",
    "embed_latent",
    "generate_image_batch",
    "generate_images",
    "generator_forward",
    "generator_gradient",
    "init_discriminator",
    "init_generator",
    "load_checkpoint",
    "normalize_patch",
    "postselect_ancilla",
    "sample_latents",
    "save_checkpoint",
    "schedule_label",
    "subgen_circuit",
    "subgenerator_forward",
    "train_qgan",
]
