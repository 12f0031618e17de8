"""Single-qubit noise channels driven by hardware calibration values.

Three noise mechanisms are modeled, one constructor each:

* gate error as a bit flip with the calibrated Pauli-X rate,
* relaxation and dephasing as amplitude damping with
  gamma = 1 - exp(-t/T1), composed with pure dephasing chosen so the total
  off-diagonal decay over duration t is exactly exp(-t/T2),
* measurement error as a per-qubit symmetric confusion matrix.

All Kraus operators here are real matrices, which is what lets the fast
engine evolve states in float64.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ChannelError, ProfileError

COMPLETENESS_TOL = 1e-12


@dataclass(frozen=True)
class KrausChannel:
    """A 1-qubit CPTP map given by its Kraus operators."""

    operators: tuple[np.ndarray, ...]
    target: int = 0

    def __post_init__(self):
        ops = tuple(np.asarray(k) for k in self.operators)
        object.__setattr__(self, "operators", ops)
        if not ops or any(k.shape != (2, 2) for k in ops):
            raise ChannelError("operators must be a nonempty list of 2x2 matrices")
        total = sum(k.conj().T @ k for k in ops)
        if np.max(np.abs(total - np.eye(2))) > COMPLETENESS_TOL:
            raise ChannelError("Kraus completeness sum K^dag K = I violated")

    def superoperator(self) -> np.ndarray:
        """4x4 map of the vectorized qubit block: sum_k K_k (x) conj(K_k)."""
        return sum(np.kron(k, k.conj()) for k in self.operators)


def bit_flip_channel(p: float, target: int = 0) -> KrausChannel:
    """{sqrt(1-p) I, sqrt(p) X}."""
    if not 0.0 <= p <= 1.0:
        raise ChannelError(f"bit-flip probability {p} outside [0, 1]")
    ops = []
    if p < 1.0:
        ops.append(math.sqrt(1.0 - p) * np.eye(2))
    if p > 0.0:
        ops.append(math.sqrt(p) * np.array([[0.0, 1.0], [1.0, 0.0]]))
    return KrausChannel(tuple(ops), target)


def thermal_relaxation_channel(
    t1_us: float, t2_us: float, duration_ns: float, target: int = 0
) -> KrausChannel:
    """Amplitude damping plus the extra pure dephasing fixed by T2.

    With t the duration, gamma = 1 - exp(-t/T1) and the dephasing weight
    lam = 1 - exp(-t * (2/T2 - 1/T1)); lam >= 0 exactly when T2 <= 2*T1.
    Excited population decays by exp(-t/T1), coherences by exp(-t/T2).
    """
    if t1_us <= 0 or t2_us <= 0:
        raise ProfileError("T1 and T2 must be positive")
    if t2_us > 2.0 * t1_us:
        raise ProfileError(f"T2={t2_us} exceeds 2*T1={2 * t1_us}")
    if duration_ns < 0:
        raise ProfileError("duration must be nonnegative")
    t_us = duration_ns * 1e-3
    gamma = 1.0 - math.exp(-t_us / t1_us)
    lam = 1.0 - math.exp(-t_us * (2.0 / t2_us - 1.0 / t1_us))
    k0 = np.array([[1.0, 0.0], [0.0, math.sqrt((1.0 - gamma) * (1.0 - lam))]])
    ops = [k0]
    if gamma > 0.0:
        ops.append(np.array([[0.0, math.sqrt(gamma)], [0.0, 0.0]]))
    if lam > 0.0:
        ops.append(np.array([[0.0, 0.0], [0.0, math.sqrt(lam * (1.0 - gamma))]]))
    return KrausChannel(tuple(ops), target)


def readout_confusion(r: float) -> np.ndarray:
    """Symmetric per-qubit readout confusion matrix [[1-r, r], [r, 1-r]]."""
    if not 0.0 <= r <= 1.0:
        raise ChannelError(f"readout error {r} outside [0, 1]")
    return np.array([[1.0 - r, r], [r, 1.0 - r]])


def apply_readout_error(probs: np.ndarray, profile) -> np.ndarray:
    """Tensor-product confusion over every qubit of the distribution."""
    probs = np.asarray(probs, dtype=float)
    n = int(round(math.log2(probs.size)))
    if 2 ** n != probs.size:
        raise ChannelError(f"probability vector length {probs.size} is not a power of two")
    conf = readout_confusion(profile.readout_err)
    t = probs.reshape((2,) * n)
    for axis in range(n):
        t = np.moveaxis(np.tensordot(conf, t, axes=([1], [axis])), 0, axis)
    return t.reshape(-1)
