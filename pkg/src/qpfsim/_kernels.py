"""Numba kernels for dense state-vector updates.

All kernels mutate a flat complex128 amplitude array in place.  Qubit q
corresponds to bit q of the array index (qubit 0 is the least
significant bit).  Kernels pick between a contiguous nested-loop walk
(fast when the low stride is wide) and a flat bit-insertion walk (fast
for low qubits), since the workloads here are memory-bound.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

_SQRT_HALF = 1.0 / math.sqrt(2.0)
_NESTED_MIN = 8  # strides at least this wide use the contiguous walk


@njit(cache=True, inline="always")
def _spread1(i, s):
    """Insert a zero bit at stride position s into index i."""
    low = i & (s - 1)
    return ((i - low) << 1) | low


@njit(cache=True, fastmath=True)
def hadamard(amps, q):
    s = 1 << q
    n = amps.shape[0]
    if s >= _NESTED_MIN:
        for base in range(0, n, 2 * s):
            for lo in range(base, base + s):
                a0 = amps[lo]
                a1 = amps[lo + s]
                amps[lo] = (a0 + a1) * _SQRT_HALF
                amps[lo + s] = (a0 - a1) * _SQRT_HALF
    else:
        for i in range(n >> 1):
            i0 = _spread1(i, s)
            i1 = i0 | s
            a0 = amps[i0]
            a1 = amps[i1]
            amps[i0] = (a0 + a1) * _SQRT_HALF
            amps[i1] = (a0 - a1) * _SQRT_HALF


@njit(cache=True, fastmath=True)
def apply_u1q(amps, q, m00, m01, m10, m11):
    """Generic single-qubit unitary (fused chains of elementary singles)."""
    s = 1 << q
    n = amps.shape[0]
    if s >= _NESTED_MIN:
        for base in range(0, n, 2 * s):
            for lo in range(base, base + s):
                a0 = amps[lo]
                a1 = amps[lo + s]
                amps[lo] = m00 * a0 + m01 * a1
                amps[lo + s] = m10 * a0 + m11 * a1
    else:
        for i in range(n >> 1):
            i0 = _spread1(i, s)
            i1 = i0 | s
            a0 = amps[i0]
            a1 = amps[i1]
            amps[i0] = m00 * a0 + m01 * a1
            amps[i1] = m10 * a0 + m11 * a1


@njit(cache=True, fastmath=True)
def pauli_x(amps, q):
    s = 1 << q
    n = amps.shape[0]
    if s >= _NESTED_MIN:
        for base in range(0, n, 2 * s):
            for lo in range(base, base + s):
                a0 = amps[lo]
                amps[lo] = amps[lo + s]
                amps[lo + s] = a0
    else:
        for i in range(n >> 1):
            i0 = _spread1(i, s)
            i1 = i0 | s
            a0 = amps[i0]
            amps[i0] = amps[i1]
            amps[i1] = a0


@njit(cache=True, fastmath=True)
def pauli_z(amps, q):
    s = 1 << q
    n = amps.shape[0]
    if s >= _NESTED_MIN:
        for base in range(s, n, 2 * s):
            for lo in range(base, base + s):
                amps[lo] = -amps[lo]
    else:
        for i in range(n >> 1):
            i1 = _spread1(i, s) | s
            amps[i1] = -amps[i1]


@njit(cache=True, fastmath=True)
def pauli_xz(amps, q):
    # alpha|0> + beta|1>  ->  alpha|1> - beta|0>
    s = 1 << q
    n = amps.shape[0]
    if s >= _NESTED_MIN:
        for base in range(0, n, 2 * s):
            for lo in range(base, base + s):
                a0 = amps[lo]
                amps[lo] = -amps[lo + s]
                amps[lo + s] = a0
    else:
        for i in range(n >> 1):
            i0 = _spread1(i, s)
            i1 = i0 | s
            a0 = amps[i0]
            amps[i0] = -amps[i1]
            amps[i1] = a0


@njit(cache=True, fastmath=True)
def phase(amps, q, theta):
    s = 1 << q
    n = amps.shape[0]
    ph = complex(math.cos(theta), math.sin(theta))
    if s >= _NESTED_MIN:
        for base in range(s, n, 2 * s):
            for lo in range(base, base + s):
                amps[lo] = amps[lo] * ph
    else:
        for i in range(n >> 1):
            i1 = _spread1(i, s) | s
            amps[i1] = amps[i1] * ph


@njit(cache=True, fastmath=True)
def cphase(amps, qa, qb, theta):
    if qa > qb:
        qa, qb = qb, qa
    sl = 1 << qa
    sh = 1 << qb
    n = amps.shape[0]
    ph = complex(math.cos(theta), math.sin(theta))
    if sl >= _NESTED_MIN:
        for hi in range(sh + sl, n, 2 * sh):
            for mid in range(hi, hi + sh, 2 * sl):
                for lo in range(mid, mid + sl):
                    amps[lo] = amps[lo] * ph
    else:
        for i in range(n >> 2):
            i11 = _spread1(_spread1(i, sl), sh) | sl | sh
            amps[i11] = amps[i11] * ph


@njit(cache=True, fastmath=True)
def cnot(amps, qc, qt):
    sc = 1 << qc
    st = 1 << qt
    sl, sh = (sc, st) if sc < st else (st, sc)
    n = amps.shape[0]
    if sl >= _NESTED_MIN:
        for hi in range(0, n, 2 * sh):
            for mid in range(hi, hi + sh, 2 * sl):
                for lo in range(mid, mid + sl):
                    i0 = lo + sc
                    i1 = lo + sc + st
                    a = amps[i0]
                    amps[i0] = amps[i1]
                    amps[i1] = a
    else:
        for i in range(n >> 2):
            base = _spread1(_spread1(i, sl), sh)
            i0 = base | sc
            i1 = base | sc | st
            a = amps[i0]
            amps[i0] = amps[i1]
            amps[i1] = a


@njit(cache=True, fastmath=True)
def swap(amps, qa, qb):
    sa = 1 << qa
    sb = 1 << qb
    sl, sh = (sa, sb) if sa < sb else (sb, sa)
    n = amps.shape[0]
    if sl >= _NESTED_MIN:
        for hi in range(0, n, 2 * sh):
            for mid in range(hi, hi + sh, 2 * sl):
                for lo in range(mid, mid + sl):
                    a = amps[lo + sl]
                    amps[lo + sl] = amps[lo + sh]
                    amps[lo + sh] = a
    else:
        for i in range(n >> 2):
            base = _spread1(_spread1(i, sl), sh)
            a = amps[base | sl]
            amps[base | sl] = amps[base | sh]
            amps[base | sh] = a


@njit(cache=True, fastmath=True)
def cphase_swap(amps, qa, qb, theta):
    # controlled-phase followed by swap, fused into one two-qubit gate
    sa = 1 << qa
    sb = 1 << qb
    sl, sh = (sa, sb) if sa < sb else (sb, sa)
    n = amps.shape[0]
    ph = complex(math.cos(theta), math.sin(theta))
    if sl >= _NESTED_MIN:
        for hi in range(0, n, 2 * sh):
            for mid in range(hi, hi + sh, 2 * sl):
                for lo in range(mid, mid + sl):
                    a = amps[lo + sl]
                    amps[lo + sl] = amps[lo + sh]
                    amps[lo + sh] = a
                    amps[lo + sl + sh] = amps[lo + sl + sh] * ph
    else:
        for i in range(n >> 2):
            base = _spread1(_spread1(i, sl), sh)
            a = amps[base | sl]
            amps[base | sl] = amps[base | sh]
            amps[base | sh] = a
            amps[base | sl | sh] = amps[base | sl | sh] * ph


@njit(cache=True, fastmath=True)
def cnot_swap(amps, qc, qt):
    # CNOT(control qc) followed by SWAP: cycle |01> -> |10> -> |11> -> |01>
    # in (control, target) bit order
    sc = 1 << qc
    st = 1 << qt
    sl, sh = (sc, st) if sc < st else (st, sc)
    n = amps.shape[0]
    if sl >= _NESTED_MIN:
        for hi in range(0, n, 2 * sh):
            for mid in range(hi, hi + sh, 2 * sl):
                for lo in range(mid, mid + sl):
                    i01 = lo + st
                    i10 = lo + sc
                    i11 = lo + sc + st
                    a01 = amps[i01]
                    amps[i01] = amps[i11]
                    amps[i11] = amps[i10]
                    amps[i10] = a01
    else:
        for i in range(n >> 2):
            base = _spread1(_spread1(i, sl), sh)
            i01 = base | st
            i10 = base | sc
            i11 = base | sc | st
            a01 = amps[i01]
            amps[i01] = amps[i11]
            amps[i11] = amps[i10]
            amps[i10] = a01


@njit(cache=True)
def prob_one(amps, q):
    s = 1 << q
    n = amps.shape[0]
    total = 0.0
    if s >= _NESTED_MIN:
        for base in range(s, n, 2 * s):
            for lo in range(base, base + s):
                a = amps[lo]
                total += a.real * a.real + a.imag * a.imag
    else:
        for i in range(n >> 1):
            a = amps[_spread1(i, s) | s]
            total += a.real * a.real + a.imag * a.imag
    return total


@njit(cache=True, fastmath=True)
def collapse(amps, q, bit, prob):
    """Project onto qubit q = bit and renormalise by 1/sqrt(prob)."""
    s = 1 << q
    n = amps.shape[0]
    scale = 1.0 / math.sqrt(prob)
    for base in range(0, n, 2 * s):
        if bit == 0:
            for lo in range(base, base + s):
                amps[lo] = amps[lo] * scale
                amps[lo + s] = 0.0
        else:
            for lo in range(base, base + s):
                amps[lo + s] = amps[lo + s] * scale
                amps[lo] = 0.0


@njit(cache=True)
def norm_sq(amps):
    total = 0.0
    for i in range(amps.shape[0]):
        a = amps[i]
        total += a.real * a.real + a.imag * a.imag
    return total


# Opcodes for the compiled trajectory loop; values mirror engine.GateKind.
OP_HADAMARD = 0
OP_PAULI_X = 1
OP_PAULI_Z = 2
OP_PAULI_XZ = 3
OP_PHASE = 4
OP_CPHASE = 5
OP_CNOT = 6
OP_SWAP = 7
OP_CPHASE_SWAP = 8
OP_CNOT_SWAP = 9
OP_FEEDBACK_PHASE = 10
OP_MEASURE = 11
OP_RESET = 12
OP_U1Q = 13

# Pauli error codes as sampled by the noise module.
EV_X = 0
EV_XZ = 1
EV_Z = 2


@njit(cache=True)
def _apply_event(amps, q, kind):
    if kind == EV_X:
        pauli_x(amps, q)
    elif kind == EV_XZ:
        pauli_xz(amps, q)
    else:
        pauli_z(amps, q)


@njit(cache=True)
def run_trajectory(
    amps,
    op_code,
    op_q0,
    op_q1,
    op_angle,
    op_step,
    op_matrix,
    layer_ptr,
    layer_timestep,
    ev_t,
    ev_q,
    ev_kind,
    forced_bits,
    uniforms,
    out_bits,
    last_outcome,
):
    """Run one full trajectory: gates, feedback, measurements, errors.

    Gates are grouped into layers by `layer_ptr` (index bounds into the
    op arrays); after a layer whose `layer_timestep` is >= 0, pending
    error events with that timestep are applied.  Measurements collapse
    to forced_bits[step] when >= 0, else sample against uniforms[step].

    Returns (probability of the realised bit string, degenerate flag).
    A degenerate forced branch (p < 1e-15) aborts with flag 1.
    """
    n_layers = layer_ptr.shape[0] - 1
    n_events = ev_t.shape[0]
    ev_ptr = 0
    prob = 1.0
    for layer in range(n_layers):
        for g in range(layer_ptr[layer], layer_ptr[layer + 1]):
            code = op_code[g]
            if code == OP_CPHASE:
                cphase(amps, op_q0[g], op_q1[g], op_angle[g])
            elif code == OP_CPHASE_SWAP:
                cphase_swap(amps, op_q0[g], op_q1[g], op_angle[g])
            elif code == OP_HADAMARD:
                hadamard(amps, op_q0[g])
            elif code == OP_U1Q:
                apply_u1q(
                    amps,
                    op_q0[g],
                    op_matrix[op_step[g], 0],
                    op_matrix[op_step[g], 1],
                    op_matrix[op_step[g], 2],
                    op_matrix[op_step[g], 3],
                )
            elif code == OP_PHASE:
                phase(amps, op_q0[g], op_angle[g])
            elif code == OP_SWAP:
                swap(amps, op_q0[g], op_q1[g])
            elif code == OP_CNOT:
                cnot(amps, op_q0[g], op_q1[g])
            elif code == OP_CNOT_SWAP:
                cnot_swap(amps, op_q0[g], op_q1[g])
            elif code == OP_PAULI_X:
                pauli_x(amps, op_q0[g])
            elif code == OP_PAULI_Z:
                pauli_z(amps, op_q0[g])
            elif code == OP_PAULI_XZ:
                pauli_xz(amps, op_q0[g])
            elif code == OP_FEEDBACK_PHASE:
                step = op_step[g]
                theta = 0.0
                for m in range(step):
                    if out_bits[m]:
                        theta -= math.pi * 2.0 ** (m - step)
                phase(amps, op_q0[g], theta)
            elif code == OP_MEASURE:
                q = op_q0[g]
                step = op_step[g]
                p1 = prob_one(amps, q)
                if p1 < 0.0:
                    p1 = 0.0
                elif p1 > 1.0:
                    p1 = 1.0
                if forced_bits[step] >= 0:
                    bit = forced_bits[step]
                else:
                    bit = 1 if uniforms[step] < p1 else 0
                p = p1 if bit == 1 else 1.0 - p1
                if p < 1e-15:
                    return 0.0, 1
                collapse(amps, q, bit, p)
                out_bits[step] = bit
                last_outcome[q] = bit
                prob *= p
            else:  # OP_RESET
                q = op_q0[g]
                if last_outcome[q] == 1:
                    pauli_x(amps, q)
                    last_outcome[q] = 0
        t = layer_timestep[layer]
        if t >= 0:
            while ev_ptr < n_events and ev_t[ev_ptr] == t:
                _apply_event(amps, ev_q[ev_ptr], ev_kind[ev_ptr])
                ev_ptr += 1
    return prob, 0
