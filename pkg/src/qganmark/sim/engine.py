"""Fast evaluation of noisy circuits, single or batched.

The state is a float64 tensor of shape (B, 4, 4, ..., 4): axis q+1 encodes
the (row, col) bit pair of qubit q as 2*row + col. Every supported gate
(RY, CZ, X) and every channel operator here is a real matrix, so the density
matrix stays real through the whole evolution; working in float64 instead of
complex128 halves memory traffic, which is what dominates at these sizes.

A 1-qubit channel or gate becomes a real 4x4 superoperator contracted into
one axis; a CZ is a sign mask over two axes. Gate noise is fused into the
gate superoperator. run_circuit is the public single-shot entry point; the
*_batch functions evaluate many parameter settings of the same layout at
once (parameter-shift batches, image batches) and agree with run_circuit to
float precision.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from ..errors import CapacityError, ProfileError, StateCorruptionError
from .channels import (
    bit_flip_channel,
    readout_confusion,
    thermal_relaxation_channel,
)
from .circuits import X_MATRIX, CircuitSpec
from .density import MAX_QUBITS, PROB_SUM_TOL
from .profiles import HardwareProfile


def _apply_fixed(t: np.ndarray, s4: np.ndarray, q: int) -> np.ndarray:
    """Contract a shared 4x4 superoperator into qubit axis q."""
    shape = t.shape
    n = len(shape) - 1
    left = shape[0] * 4 ** q
    right = 4 ** (n - 1 - q)
    return np.matmul(s4, t.reshape(left, 4, right)).reshape(shape)


def _apply_batched(t: np.ndarray, s4b: np.ndarray, q: int) -> np.ndarray:
    """Contract per-batch-element 4x4 superoperators into qubit axis q."""
    shape = t.shape
    n = len(shape) - 1
    mid = 4 ** q
    right = 4 ** (n - 1 - q)
    out = np.matmul(s4b[:, None, :, :], t.reshape(shape[0], mid, 4, right))
    return out.reshape(shape)


@lru_cache(maxsize=None)
def _cz_mask(n: int, q1: int, q2: int) -> np.ndarray:
    """CZ as elementwise signs: rho[R,C] *= (-1)^(r1 r2) * (-1)^(c1 c2)."""
    m = np.ones((4, 4))
    for vj in range(4):
        for vk in range(4):
            rj, cj = vj >> 1, vj & 1
            rk, ck = vk >> 1, vk & 1
            m[vj, vk] = (-1.0) ** (rj * rk) * (-1.0) ** (cj * ck)
    shape = [1] * (n + 1)
    shape[q1 + 1] = 4
    shape[q2 + 1] = 4
    out = m.reshape(shape) if q1 < q2 else m.T.reshape(shape)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def _diag_gather(n: int) -> np.ndarray:
    """Flat positions of diagonal entries, ordered by basis index."""
    idx = np.zeros(2 ** n, dtype=np.intp)
    for j in range(2 ** n):
        flat = 0
        for q in range(n):
            bit = (j >> (n - 1 - q)) & 1
            flat += 3 * bit * 4 ** (n - 1 - q)
        idx[j] = flat
    idx.setflags(write=False)
    return idx


def _real_superop(channel) -> np.ndarray:
    s = channel.superoperator()
    return np.ascontiguousarray(np.real(s))


def noise_superops(profile: HardwareProfile) -> tuple[np.ndarray, np.ndarray]:
    """Fused after-gate superoperators (bit flip, then thermal relaxation)
    for the 1q and 2q gate durations."""
    bf = _real_superop(bit_flip_channel(profile.paulix_err))
    th1 = _real_superop(
        thermal_relaxation_channel(profile.t1_us, profile.t2_us, profile.gate_dur_1q_ns)
    )
    th2 = _real_superop(
        thermal_relaxation_channel(profile.t1_us, profile.t2_us, profile.gate_dur_2q_ns)
    )
    return th1 @ bf, th2 @ bf


def _ry_superops_batched(angles: np.ndarray) -> np.ndarray:
    """(B,) angles -> (B, 4, 4) real superoperators U (x) U."""
    c = np.cos(angles / 2.0)
    s = np.sin(angles / 2.0)
    u = np.empty(angles.shape + (2, 2))
    u[..., 0, 0] = c
    u[..., 0, 1] = -s
    u[..., 1, 0] = s
    u[..., 1, 1] = c
    return np.einsum("bik,bjl->bijkl", u, u).reshape(angles.shape[0], 4, 4)


def _initial_state(batch: int, n: int) -> np.ndarray:
    t = np.zeros((batch,) + (4,) * n)
    t[(slice(None),) + (0,) * n] = 1.0
    return t


def _finalize_batch(t: np.ndarray) -> np.ndarray:
    """Diagonal extraction, clamping and renormalization, per batch row."""
    n = t.ndim - 1
    flat = t.reshape(t.shape[0], -1)
    p = np.maximum(flat[:, _diag_gather(n)], 0.0)
    sums = p.sum(axis=1)
    bad = np.abs(sums - 1.0) > PROB_SUM_TOL
    if bad.any():
        raise StateCorruptionError(
            f"probability sum {sums[bad][0]} deviates from 1 beyond {PROB_SUM_TOL}"
        )
    return p / sums[:, None]


def readout_error_batch(probs: np.ndarray, r: float) -> np.ndarray:
    """Per-qubit confusion applied to (B, 2^n) distributions."""
    conf = readout_confusion(r)
    batch, dim = probs.shape
    n = dim.bit_length() - 1
    t = probs.reshape((batch,) + (2,) * n)
    for q in range(n):
        left = batch * 2 ** q
        right = 2 ** (n - 1 - q)
        t = np.matmul(conf, t.reshape(left, 2, right)).reshape(t.shape)
    return t.reshape(batch, dim)


def _check_capacity(n_qubits: int, profile: HardwareProfile | None) -> None:
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise CapacityError(f"n_qubits={n_qubits} outside supported range 1..{MAX_QUBITS}")
    if profile is not None and n_qubits > profile.n_qubits:
        raise ProfileError(
            f"circuit needs {n_qubits} qubits but profile {profile.name} has {profile.n_qubits}"
        )


def run_circuit(circuit: CircuitSpec, profile: HardwareProfile | None = None) -> np.ndarray:
    """Basis-state probabilities of a circuit, with per-gate noise and
    readout confusion when a profile is given.

    Noise placement: every gate is followed by a bit flip at the Pauli-X
    rate and thermal relaxation over the gate duration, on each touched
    qubit in ascending order; readout confusion acts on the measured
    distribution.
    """
    n = circuit.n_qubits
    _check_capacity(n, profile)
    noise = noise_superops(profile) if profile is not None else None
    t = _initial_state(1, n)
    for gate in circuit.ops:
        if gate.name == "cz":
            q1, q2 = gate.qubits
            t = t * _cz_mask(n, q1, q2)
            if noise is not None:
                for q in sorted(gate.qubits):
                    t = _apply_fixed(t, noise[1], q)
        else:
            if gate.name == "ry":
                c, s = np.cos(gate.angle / 2.0), np.sin(gate.angle / 2.0)
                u = np.array([[c, -s], [s, c]])
            else:
                u = X_MATRIX
            s4 = np.kron(u, u)
            if noise is not None:
                s4 = noise[0] @ s4
            t = _apply_fixed(t, s4, gate.qubits[0])
    probs = _finalize_batch(t)
    if profile is not None:
        probs = readout_error_batch(probs, profile.readout_err)
    return probs[0]


def run_layered_pqc_batch(
    embed_angles: np.ndarray,
    layer_angles: np.ndarray,
    profile: HardwareProfile | None = None,
) -> np.ndarray:
    """Batched run of the patch-generator circuit family.

    Layout per batch element: one RY(embed) per qubit, then `depth`
    repetitions of an RY layer followed by a CZ chain over adjacent qubits.
    embed_angles is (B, n) or (n,); layer_angles is (B, depth, n).
    Returns (B, 2^n) probabilities including readout confusion.
    """
    layer_angles = np.asarray(layer_angles, dtype=float)
    batch, depth, n = layer_angles.shape
    embed = np.broadcast_to(np.asarray(embed_angles, dtype=float), (batch, n))
    _check_capacity(n, profile)
    noise = noise_superops(profile) if profile is not None else None

    t = _initial_state(batch, n)
    for q in range(n):
        s4b = _ry_superops_batched(np.ascontiguousarray(embed[:, q]))
        if noise is not None:
            s4b = np.matmul(noise[0], s4b)
        t = _apply_batched(t, s4b, q)
    for d in range(depth):
        for q in range(n):
            s4b = _ry_superops_batched(np.ascontiguousarray(layer_angles[:, d, q]))
            if noise is not None:
                s4b = np.matmul(noise[0], s4b)
            t = _apply_batched(t, s4b, q)
        for q in range(n - 1):
            t = t * _cz_mask(n, q, q + 1)
            if noise is not None:
                t = _apply_fixed(t, noise[1], q)
                t = _apply_fixed(t, noise[1], q + 1)
    probs = _finalize_batch(t)
    if profile is not None:
        probs = readout_error_batch(probs, profile.readout_err)
    return probs
