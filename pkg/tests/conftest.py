import numpy as np
import pytest

from qganmark.sim import HardwareProfile, load_profile_suite


@pytest.fixture(scope="session")
def suite():
    return load_profile_suite()


@pytest.fixture(scope="session")
def athens(suite):
    return suite["ibm_athens"]


@pytest.fixture(scope="session")
def synth_profiles():
    """Strongly distinct synthetic calibrations for watermark experiments."""
    return {
        "synth_a": HardwareProfile("synth_a", 5, t1_us=100.0, t2_us=100.0,
                                   readout_err=0.01, paulix_err=1e-4),
        "synth_b": HardwareProfile("synth_b", 5, t1_us=15.0, t2_us=15.0,
                                   readout_err=0.10, paulix_err=5e-3),
        "synth_far": HardwareProfile("synth_far", 5, t1_us=5.0, t2_us=5.0,
                                     readout_err=0.30, paulix_err=2e-2),
        "synth_mid": HardwareProfile("synth_mid", 5, t1_us=40.0, t2_us=40.0,
                                     readout_err=0.05, paulix_err=1e-3),
    }


def random_ry_cz_circuit(rng: np.random.Generator, n_qubits: int, n_layers: int):
    """A random circuit from the supported gate set, as a gate list."""
    from qganmark.sim import cz, ry, x

    ops = []
    for _ in range(n_layers):
        for q in range(n_qubits):
            r = rng.random()
            if r < 0.6:
                ops.append(ry(q, rng.uniform(-np.pi, np.pi)))
            elif r < 0.8:
                ops.append(x(q))
        if n_qubits > 1:
            q1 = int(rng.integers(n_qubits - 1))
            ops.append(cz(q1, q1 + 1))
    return ops
