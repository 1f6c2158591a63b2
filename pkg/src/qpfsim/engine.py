"""Dense state-vector engine: gates, mid-circuit measurement, reset.

Amplitudes are stored flat, indexed by the register value with qubit 0
as the least significant bit.  Gates mutate the array in place through
the numba kernels; a StateVector is owned by a single trial at a time.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as k


class DegenerateBranchError(RuntimeError):
    """Forcing a measurement outcome whose branch probability is ~0."""


class GateKind(enum.IntEnum):
    HADAMARD = 0
    PAULI_X = 1
    PAULI_Z = 2
    PAULI_XZ = 3
    PHASE = 4            # diag(1, e^{i*theta}) on one qubit
    CPHASE = 5
    CNOT = 6
    SWAP = 7
    CPHASE_SWAP = 8      # fused controlled-phase + swap (one timestep on LNN)
    CNOT_SWAP = 9        # fused CNOT + swap
    FEEDBACK_PHASE = 10  # rotation whose angle depends on earlier measured bits
    MEASURE = 11
    RESET = 12
    U1Q = 13             # merged run of consecutive single-qubit gates (canonical
                         # decomposition); carries its 2x2 matrix


TWO_QUBIT_KINDS = frozenset(
    {GateKind.CPHASE, GateKind.CNOT, GateKind.SWAP, GateKind.CPHASE_SWAP, GateKind.CNOT_SWAP}
)


@dataclass(frozen=True)
class Gate:
    """One scheduled operation on one or two qubits.

    `step` carries the semiclassical measurement index for MEASURE and
    FEEDBACK_PHASE gates; the feedback angle itself is computed per
    trial from the bits measured so far, it is data rather than circuit
    structure.
    """

    kind: GateKind
    q0: int
    q1: int = -1
    angle: float = 0.0
    step: int = -1
    matrix: tuple | None = None  # (m00, m01, m10, m11) for U1Q

    @property
    def qubits(self) -> tuple[int, ...]:
        if self.kind in TWO_QUBIT_KINDS:
            return (self.q0, self.q1)
        return (self.q0,)

    def is_two_qubit(self) -> bool:
        return self.kind in TWO_QUBIT_KINDS


def feedback_angle(step: int, bits) -> float:
    """Semiclassical QFT correction before the step-th master measurement.

    theta_t = -pi * sum_{m<t} b_m / 2^(t-m), cancelling the phase
    contributed by the already-resolved lower bits.
    """
    theta = 0.0
    for m in range(step):
        if bits[m]:
            theta -= math.pi * 2.0 ** (m - step)
    return theta


class StateVector:
    """2**Q complex amplitudes with in-place gate application."""

    __slots__ = ("num_qubits", "amps")

    def __init__(self, num_qubits: int, amps: np.ndarray | None = None):
        if not 1 <= num_qubits <= 24:
            raise ValueError(f"qubit count must be in 1..24, got {num_qubits}")
        self.num_qubits = num_qubits
        if amps is None:
            amps = np.zeros(1 << num_qubits, dtype=np.complex128)
            amps[0] = 1.0
        else:
            amps = np.ascontiguousarray(amps, dtype=np.complex128)
            if amps.shape != (1 << num_qubits,):
                raise ValueError("amplitude array has wrong length")
        self.amps = amps

    @classmethod
    def basis_state(cls, num_qubits: int, index: int) -> "StateVector":
        sv = cls(num_qubits)
        sv.amps[0] = 0.0
        sv.amps[index] = 1.0
        return sv

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amps.copy())

    def norm_sq(self) -> float:
        return k.norm_sq(self.amps)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def _check(self, *qubits: int):
        for q in qubits:
            if not 0 <= q < self.num_qubits:
                raise IndexError(f"qubit {q} out of range for {self.num_qubits}-qubit state")

    def apply(self, gate: Gate, bits=()) -> "StateVector":
        """Apply one gate in place; `bits` feeds FEEDBACK_PHASE angles."""
        kind = gate.kind
        self._check(*gate.qubits)
        if kind == GateKind.HADAMARD:
            k.hadamard(self.amps, gate.q0)
        elif kind == GateKind.PAULI_X:
            k.pauli_x(self.amps, gate.q0)
        elif kind == GateKind.PAULI_Z:
            k.pauli_z(self.amps, gate.q0)
        elif kind == GateKind.PAULI_XZ:
            k.pauli_xz(self.amps, gate.q0)
        elif kind == GateKind.PHASE:
            k.phase(self.amps, gate.q0, gate.angle)
        elif kind == GateKind.CPHASE:
            self._check_pair(gate)
            k.cphase(self.amps, gate.q0, gate.q1, gate.angle)
        elif kind == GateKind.CNOT:
            self._check_pair(gate)
            k.cnot(self.amps, gate.q0, gate.q1)
        elif kind == GateKind.SWAP:
            self._check_pair(gate)
            k.swap(self.amps, gate.q0, gate.q1)
        elif kind == GateKind.CPHASE_SWAP:
            self._check_pair(gate)
            k.cphase_swap(self.amps, gate.q0, gate.q1, gate.angle)
        elif kind == GateKind.CNOT_SWAP:
            self._check_pair(gate)
            k.cnot_swap(self.amps, gate.q0, gate.q1)
        elif kind == GateKind.FEEDBACK_PHASE:
            k.phase(self.amps, gate.q0, feedback_angle(gate.step, bits))
        elif kind == GateKind.U1Q:
            m00, m01, m10, m11 = gate.matrix
            k.apply_u1q(self.amps, gate.q0, complex(m00), complex(m01), complex(m10), complex(m11))
        else:
            raise ValueError(f"apply() cannot execute {kind.name}; use measure()/reset()")
        return self

    def _check_pair(self, gate: Gate):
        if gate.q0 == gate.q1:
            raise ValueError("two-qubit gate needs distinct qubits")
        self._check(gate.q1)

    def apply_pauli(self, pauli: str, q: int) -> "StateVector":
        self._check(q)
        if pauli == "X":
            k.pauli_x(self.amps, q)
        elif pauli == "Z":
            k.pauli_z(self.amps, q)
        elif pauli == "XZ":
            k.pauli_xz(self.amps, q)
        else:
            raise ValueError(f"unknown Pauli {pauli!r}")
        return self

    def prob_one(self, q: int) -> float:
        self._check(q)
        return min(max(k.prob_one(self.amps, q), 0.0), 1.0)

    def measure(self, q: int, forced_outcome: int | None = None, rng=None) -> tuple[int, float]:
        """Measure qubit q, collapse and renormalise.

        Returns (bit, probability of that branch).  With forced_outcome
        the state collapses onto that branch whatever its weight, as
        long as it is not degenerate (p < 1e-15).
        """
        p1 = self.prob_one(q)
        if forced_outcome is None:
            if rng is None:
                raise ValueError("sampling a measurement needs an rng")
            bit = 1 if rng.random() < p1 else 0
        else:
            bit = int(forced_outcome)
            if bit not in (0, 1):
                raise ValueError(f"forced outcome must be 0 or 1, got {forced_outcome}")
        p = p1 if bit else 1.0 - p1
        if p < 1e-15:
            raise DegenerateBranchError(f"branch qubit {q} = {bit} has probability {p:.3e}")
        k.collapse(self.amps, q, bit, p)
        return bit, p

    def reset(self, q: int, measured_bit: int) -> "StateVector":
        """Return a just-measured qubit to |0> (X if the outcome was 1)."""
        self._check(q)
        if measured_bit == 1:
            k.pauli_x(self.amps, q)
        return self

    def decompose_by_master(self, master: int) -> tuple[np.ndarray, np.ndarray]:
        """Split amplitudes by the master qubit's value.

        Returns the raw (unnormalised) conditional register vectors:
        for a master in equal superposition each half carries squared
        norm 1/2.
        """
        self._check(master)
        n = self.num_qubits
        # reshape axes run from qubit n-1 down to qubit 0
        axis = n - 1 - master
        moved = np.moveaxis(self.amps.reshape([2] * n), axis, 0)
        alpha = moved[0].reshape(-1).copy()
        beta = moved[1].reshape(-1).copy()
        return alpha, beta

    def recompose(self, master: int, alpha: np.ndarray, beta: np.ndarray) -> "StateVector":
        """Inverse of decompose_by_master (test helper)."""
        n = self.num_qubits
        axis = n - 1 - master
        stacked = np.stack(
            [alpha.reshape([2] * (n - 1)), beta.reshape([2] * (n - 1))], axis=0
        )
        self.amps = np.ascontiguousarray(np.moveaxis(stacked, 0, axis).reshape(-1))
        return self
