from .channels import (
    KrausChannel,
    apply_readout_error,
    bit_flip_channel,
    readout_confusion,
    thermal_relaxation_channel,
)
from .circuits import CircuitSpec, Gate, cz, gate_unitary, ry, ry_matrix, x
from .density import (
    DensityMatrix,
    apply_kraus,
    apply_unitary,
    build_density,
    measure_probabilities,
    run_circuit_reference,
)
from .engine import run_circuit, run_layered_pqc_batch
from .profiles import (
    HardwareProfile,
    bundled_profiles_dir,
    load_profile,
    load_profile_suite,
    save_profile,
)

__all__ = [
    "CircuitSpec",
    "DensityMatrix",
    "Gate",
    "HardwareProfile",
    "KrausChannel",
    "apply_kraus",
    "apply_readout_error",
    "apply_unitary",
    "bit_flip_channel",
    "build_density",
    "bundled_profiles_dir",
    "cz",
    "gate_unitary",
    "load_profile",
    "load_profile_suite",
    "measure_probabilities",
    "readout_confusion",
    "ry",
    "ry_matrix",
    "run_circuit",
    "run_circuit_reference",
    "run_layered_pqc_batch",
    "save_profile",
    "thermal_relaxation_channel",
    "x",
]
