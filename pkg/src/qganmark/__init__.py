"""qganmark: hardware-noise watermarking for patch quantum GANs.

Subpackages: `sim` (noisy density-matrix simulation), `qgan` (patch
generator and adversarial training), `imaging` (digits, upscaling, Frechet
distance), `extractor` (attribution CNN and ownership verdicts), `cli`
(experiment commands).
"""

from . import errors, imaging
from .collision import CollisionQuery, collision_probability

__version__ = "0.1.0"

__all__ = ["CollisionQuery", "collision_probability", "errors", "imaging", "__version__"]
