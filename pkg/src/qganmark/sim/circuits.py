"""Circuit description for the RY / CZ / X gate set.

Basis-state convention used across the package: qubit 0 is the most
significant bit of a computational-basis index, so for an n-qubit register
index j corresponds to the bitstring b_0 b_1 ... b_{n-1} with
j = sum_q b_q * 2**(n-1-q).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import QganmarkError

GATE_NAMES = ("ry", "cz", "x")


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        if self.name not in GATE_NAMES:
            raise QganmarkError(f"unknown gate {self.name!r}")
        if self.name == "ry":
            if len(self.qubits) != 1 or self.angle is None:
                raise QganmarkError("ry acts on one qubit and carries exactly one angle")
            if not math.isfinite(self.angle):
                raise QganmarkError("ry angle must be finite")
        elif self.name == "cz":
            if len(self.qubits) != 2 or self.qubits[0] == self.qubits[1]:
                raise QganmarkError("cz acts on two distinct qubits")
            if self.angle is not None:
                raise QganmarkError("cz carries no angle")
        elif self.name == "x":
            if len(self.qubits) != 1 or self.angle is not None:
                raise QganmarkError("x acts on one qubit and carries no angle")


def ry(qubit: int, angle: float) -> Gate:
    return Gate("ry", (qubit,), float(angle))


def cz(q1: int, q2: int) -> Gate:
    return Gate("cz", (q1, q2))


def x(qubit: int) -> Gate:
    return Gate("x", (qubit,))


@dataclass(frozen=True)
class CircuitSpec:
    """Ordered gate list on an n-qubit register."""

    n_qubits: int
    ops: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))
        for g in self.ops:
            if any(q < 0 or q >= self.n_qubits for q in g.qubits):
                raise QganmarkError(
                    f"gate {g.name} on qubits {g.qubits} out of range for {self.n_qubits} qubits"
                )

    def extended(self, more: list[Gate] | tuple[Gate, ...]) -> "CircuitSpec":
        return CircuitSpec(self.n_qubits, self.ops + tuple(more))


def ry_matrix(angle: float) -> np.ndarray:
    """2x2 RY rotation (real)."""
    c, s = math.cos(angle / 2.0), math.sin(angle / 2.0)
    return np.array([[c, -s], [s, c]])


X_MATRIX = np.array([[0.0, 1.0], [1.0, 0.0]])


def gate_unitary(gate: Gate, n_qubits: int) -> np.ndarray:
    """Full 2^n x 2^n unitary of a single gate (qubit 0 = most significant)."""
    if gate.name == "cz":
        dim = 2 ** n_qubits
        q1, q2 = gate.qubits
        j = np.arange(dim)
        b1 = (j >> (n_qubits - 1 - q1)) & 1
        b2 = (j >> (n_qubits - 1 - q2)) & 1
        return np.diag(np.where((b1 & b2) == 1, -1.0, 1.0))
    local = ry_matrix(gate.angle) if gate.name == "ry" else X_MATRIX
    (q,) = gate.qubits
    return np.kron(np.kron(np.eye(2 ** q), local), np.eye(2 ** (n_qubits - 1 - q)))
