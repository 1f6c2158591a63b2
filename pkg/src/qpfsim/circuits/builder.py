"""Period-finding circuit construction, arbitrary-connectivity layout.

The circuit follows the minimal-qubit design: one reusable master
control qubit drives 2L sequential controlled modular multiplications
by x**(2**i) mod N, and the inverse transform over the virtual 2L-bit
register is done semiclassically (hadamard + measured-bit-conditioned
rotation + hadamard + measure + reset per stage, least significant bit
first).

Registers over Q = 2L+4 qubits:

    master        1 qubit    phase-estimation control
    u[0..L-1]     L qubits   work register, holds x**k mod N
    b[0..L]       L+1 qubits accumulator for Fourier-space adders;
                             b[L] is the overflow qubit read during
                             modular reduction
    and_anc       1 qubit    conjunction master AND u_t, so the adder
                             ladders need only one control
    cmp_anc       1 qubit    comparison bit of the modular reduction

Modular multiply-accumulate runs in Fourier space: constant adders are
phase-rotation ladders between QFT pairs, with subtract-N / compare /
conditionally-re-add-N reduction, followed by a controlled register
swap and the inverse multiplication by the modular inverse.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from ..engine import Gate, GateKind
from ..numtheory import ModInstance
from .schedule import Circuit, Emitter, schedule

H = GateKind.HADAMARD
X = GateKind.PAULI_X
PHASE = GateKind.PHASE
CPHASE = GateKind.CPHASE
CNOT = GateKind.CNOT
FEEDBACK = GateKind.FEEDBACK_PHASE
MEASURE = GateKind.MEASURE
RESET = GateKind.RESET


@dataclass(frozen=True)
class Registers:
    master: int
    u: tuple[int, ...]
    b: tuple[int, ...]
    and_anc: int
    cmp_anc: int

    @property
    def top(self) -> int:
        return self.b[-1]


def linear_registers(L: int) -> Registers:
    return Registers(
        master=0,
        u=tuple(range(1, L + 1)),
        b=tuple(range(L + 1, 2 * L + 2)),
        and_anc=2 * L + 2,
        cmp_anc=2 * L + 3,
    )


def add_angle(v: int, q: int) -> float:
    """Fourier-space adder rotation on phase qubit q for constant v."""
    period = 1 << (q + 1)
    return 2.0 * math.pi * (v % period) / period


def emit_qft(em: Emitter, b):
    """|x> -> qubit q carrying (|0> + exp(2 pi i x / 2^(q+1)) |1>)/sqrt(2)."""
    w = len(b)
    for q in range(w - 1, -1, -1):
        em.gate(H, b[q])
        for j in range(q - 1, -1, -1):
            em.gate(CPHASE, b[j], b[q], angle=math.pi / (1 << (q - j)))


def emit_iqft(em: Emitter, b):
    w = len(b)
    for q in range(w):
        for j in range(q):
            em.gate(CPHASE, b[j], b[q], angle=-math.pi / (1 << (q - j)))
        em.gate(H, b[q])


def emit_add_const(em: Emitter, b, v: int, ctrl: int | None = None, descending: bool = False):
    """Fourier-space constant adder ladder (optionally controlled)."""
    w = len(b)
    v %= 1 << w
    qs = range(w - 1, -1, -1) if descending else range(w)
    for q in qs:
        theta = add_angle(v, q)
        if ctrl is None:
            em.gate(PHASE, b[q], angle=theta)
        else:
            em.gate(CPHASE, ctrl, b[q], angle=theta)


def emit_toffoli(em: Emitter, c1: int, c2: int, target: int):
    """Exact Toffoli: H . CCZ . H with the five-gate CCZ decomposition."""
    em.gate(H, target)
    em.gate(CPHASE, c2, target, angle=math.pi / 2)
    em.gate(CNOT, c1, c2)
    em.gate(CPHASE, c2, target, angle=-math.pi / 2)
    em.gate(CNOT, c1, c2)
    em.gate(CPHASE, c1, target, angle=math.pi / 2)
    em.gate(H, target)


def _ry_gate(q: int, theta: float) -> Gate:
    # merged single-qubit rotation (equals phase . H . phase . H . phase
    # up to global phase); kept as one gate per the convention that
    # single-qubit runs combine with their neighbouring two-qubit gate
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return Gate(GateKind.U1Q, q, matrix=(complex(c), complex(-s), complex(s), complex(c)))


def emit_and_compute(em: Emitter, c1: int, c2: int, target: int):
    """Three-CNOT conjunction onto a |0> ancilla (relative-phase Toffoli).

    Exact AND on the protocol subspace where the target starts in |0>;
    the relative phases live entirely on target-was-|1> inputs and
    cancel against the mirrored uncompute.  Costs 3 two-qubit timesteps
    instead of the 5 a full Toffoli needs.
    """
    em.emit(_ry_gate(target, math.pi / 4))
    em.gate(CNOT, c2, target)
    em.emit(_ry_gate(target, math.pi / 4))
    em.gate(CNOT, c1, target)
    em.emit(_ry_gate(target, -math.pi / 4))
    em.gate(CNOT, c2, target)
    em.emit(_ry_gate(target, -math.pi / 4))


def emit_fredkin(em: Emitter, ctrl: int, a: int, b: int):
    em.gate(CNOT, b, a)
    emit_toffoli(em, ctrl, a, b)
    em.gate(CNOT, b, a)


def emit_modadd(em: Emitter, regs: Registers, u_bit: int, v: int, N: int):
    """Add v mod N into the Fourier-space accumulator, iff master AND u_bit.

    The reduction subtracts N, reads the overflow qubit into the
    comparison ancilla (value basis), conditionally re-adds N, and
    uncomputes the comparison bit from the top qubit after subtracting
    v back out.  The conjunction ancilla keeps every ladder singly
    controlled.
    """
    b = regs.b
    conjunction = em.capture(emit_and_compute, em, regs.master, u_bit, regs.and_anc)
    for g in conjunction:
        em.emit(g)
    emit_add_const(em, b, v, ctrl=regs.and_anc)
    emit_add_const(em, b, -N)
    emit_iqft(em, b)
    em.gate(CNOT, regs.top, regs.cmp_anc)
    emit_qft(em, b)
    emit_add_const(em, b, N, ctrl=regs.cmp_anc, descending=True)
    emit_add_const(em, b, -v, ctrl=regs.and_anc, descending=True)
    emit_iqft(em, b)
    em.gate(X, regs.top)
    em.gate(CNOT, regs.top, regs.cmp_anc)
    em.gate(X, regs.top)
    emit_qft(em, b)
    emit_add_const(em, b, v, ctrl=regs.and_anc, descending=True)
    em.emit_inverse(conjunction)


def emit_cmult_accumulate(em: Emitter, regs: Registers, a: int, N: int):
    """|u>|acc> -> |u>|acc + a*u mod N> on the value registers, iff master."""
    emit_qft(em, regs.b)
    for t, u_bit in enumerate(regs.u):
        emit_modadd(em, regs, u_bit, (a << t) % N, N)
    emit_iqft(em, regs.b)


def emit_multiply_step(em: Emitter, regs: Registers, a: int, N: int):
    """Controlled in-place multiply: |u> -> |a*u mod N> iff master.

    Accumulate a*u, controlled-swap the registers, then clear the old
    value by running the accumulate for the modular inverse backwards.
    """
    a_inv = pow(a, -1, N)
    emit_cmult_accumulate(em, regs, a, N)
    for k in range(len(regs.u)):
        emit_fredkin(em, regs.master, regs.u[k], regs.b[k])
    inverse_part = em.capture(emit_cmult_accumulate, em, regs, a_inv, N)
    em.emit_inverse(inverse_part)


def emit_qpf_program(em: Emitter, regs: Registers, instance: ModInstance):
    """The full 2L-stage semiclassical period-finding program."""
    L = instance.L
    N = instance.N
    for step in range(2 * L):
        power = 2 * L - 1 - step
        multiplier = pow(instance.x, 1 << power, N)
        em.gate(H, regs.master)
        em.begin(f"step{step:02d}")
        em.begin(f"step{step:02d}.mult_fwd")
        emit_cmult_accumulate(em, regs, multiplier, N)
        em.end()
        em.begin(f"step{step:02d}.swap")
        for k in range(L):
            emit_fredkin(em, regs.master, regs.u[k], regs.b[k])
        em.end()
        em.begin(f"step{step:02d}.mult_inv")
        inverse_part = em.capture(
            emit_cmult_accumulate, em, regs, pow(multiplier, -1, N), N
        )
        em.emit_inverse(inverse_part)
        em.end()
        em.end()
        em.gate(FEEDBACK, regs.master, step=step)
        em.gate(H, regs.master)
        em.gate(MEASURE, regs.master, step=step)
        em.gate(RESET, regs.master)


def build_non_lnn(instance: ModInstance) -> Circuit:
    regs = linear_registers(instance.L)
    em = Emitter(2 * instance.L + 4)
    emit_qpf_program(em, regs, instance)
    circuit = schedule(
        em,
        layout="non_lnn",
        instance=instance,
        initial_basis_index=1 << regs.u[0],
        registers={
            "master": regs.master,
            "u": list(regs.u),
            "b": list(regs.b),
            "and_anc": regs.and_anc,
            "cmp_anc": regs.cmp_anc,
        },
    )
    return circuit.validate()
