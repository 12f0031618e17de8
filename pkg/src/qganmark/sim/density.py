"""Exact density-matrix states and the operations that evolve them.

These are the reference-path operations: full 2^n x 2^n matrices, one gate or
channel at a time. The vectorized fast path lives in `engine`; the two are
cross-checked in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import CapacityError, StateCorruptionError
from .channels import KrausChannel
from .circuits import CircuitSpec, Gate, gate_unitary

MAX_QUBITS = 12

TRACE_TOL = 1e-10
HERM_TOL = 1e-10
EIG_TOL = -1e-9
PROB_SUM_TOL = 1e-8


class QubitIndexError(IndexError):
    pass


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class DensityMatrix:
    """2^n x 2^n operator; trace one, Hermitian, positive semidefinite."""

    n_qubits: int
    data: np.ndarray

    def validate(self, *, check_positivity: bool = True) -> None:
        """Raise StateCorruptionError when an invariant is broken."""
        tr = np.trace(self.data)
        if abs(tr - 1.0) > TRACE_TOL:
            raise StateCorruptionError(f"trace {tr} deviates from 1")
        if np.max(np.abs(self.data - self.data.conj().T)) > HERM_TOL:
            raise StateCorruptionError("state is not Hermitian")
        if check_positivity:
            evals = np.linalg.eigvalsh(self.data)
            if evals.min() < EIG_TOL:
                raise StateCorruptionError(f"negative eigenvalue {evals.min()}")

    @property
    def dim(self) -> int:
        return 2 ** self.n_qubits


def build_density(n_qubits: int) -> DensityMatrix:
    """All-zeros pure state |0...0><0...0|."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise CapacityError(f"n_qubits={n_qubits} outside supported range 1..{MAX_QUBITS}")
    dim = 2 ** n_qubits
    data = np.zeros((dim, dim), dtype=complex)
    data[0, 0] = 1.0
    return DensityMatrix(n_qubits, _frozen(data))


def apply_unitary(rho: DensityMatrix, gate: Gate) -> DensityMatrix:
    """rho -> U rho U^dagger for one gate."""
    if any(q < 0 or q >= rho.n_qubits for q in gate.qubits):
        raise QubitIndexError(f"gate qubits {gate.qubits} out of range")
    u = gate_unitary(gate, rho.n_qubits)
    data = u @ rho.data @ u.conj().T
    return DensityMatrix(rho.n_qubits, _frozen(data))


def apply_kraus(rho: DensityMatrix, channel: KrausChannel) -> DensityMatrix:
    """rho -> sum_k K_k rho K_k^dagger with the 1-qubit K_k on channel.target."""
    if not 0 <= channel.target < rho.n_qubits:
        raise QubitIndexError(f"channel target {channel.target} out of range")
    new = np.zeros_like(rho.data, dtype=complex)
    left = np.eye(2 ** channel.target)
    right = np.eye(2 ** (rho.n_qubits - 1 - channel.target))
    for op in channel.operators:
        full = np.kron(np.kron(left, op), right)
        new += full @ rho.data @ full.conj().T
    return DensityMatrix(rho.n_qubits, _frozen(new))


def finalize_probs(diag: np.ndarray) -> np.ndarray:
    """Clamp tiny negatives, renormalize; reject sums off by more than 1e-8."""
    p = np.maximum(np.real(diag), 0.0)
    s = p.sum()
    if abs(s - 1.0) > PROB_SUM_TOL:
        raise StateCorruptionError(f"probability sum {s} deviates from 1 beyond {PROB_SUM_TOL}")
    return p / s


def measure_probabilities(rho: DensityMatrix) -> np.ndarray:
    """Computational-basis distribution from the diagonal of rho."""
    return finalize_probs(np.diagonal(rho.data))


def run_circuit_reference(circuit: CircuitSpec, profile=None) -> np.ndarray:
    """Step-by-step run via the full-matrix operations above.

    Same semantics as engine.run_circuit; kept as the slow, obviously-correct
    route. Noise placement per gate: bit flip, then thermal relaxation, on
    every touched qubit in ascending order; readout confusion at the end.
    """
    from .channels import apply_readout_error, bit_flip_channel, thermal_relaxation_channel

    rho = build_density(circuit.n_qubits)
    for gate in circuit.ops:
        rho = apply_unitary(rho, gate)
        if profile is not None:
            dur = profile.gate_dur_2q_ns if gate.name == "cz" else profile.gate_dur_1q_ns
            for q in sorted(gate.qubits):
                rho = apply_kraus(rho, bit_flip_channel(profile.paulix_err, target=q))
                rho = apply_kraus(
                    rho, thermal_relaxation_channel(profile.t1_us, profile.t2_us, dur, target=q)
                )
    probs = measure_probabilities(rho)
    if profile is not None:
        probs = apply_readout_error(probs, profile)
    return probs
