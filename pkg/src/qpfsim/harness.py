"""Experiment orchestration: trajectories, maps, stability sweeps, tables.

A trajectory is one run of the circuit with a fixed error-event list.
Forcing every master-qubit measurement to the bits of a chosen j and
multiplying the branch probabilities gives the exact Born probability
of that outcome in a single pass, which is what the stability analyses
record; sampling the measurements instead gives end-to-end runs for
the factoring demo.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as k
from .circuits.schedule import Circuit
from .engine import DegenerateBranchError, GateKind, StateVector
from .noise import ErrorEvent, PAULI_CODES


@dataclass(frozen=True)
class TrajectoryResult:
    probability: float
    bits: tuple[int, ...]
    degenerate: bool

    @property
    def j(self) -> int:
        """Measured register value; bit t was measured at step t."""
        return sum(b << t for t, b in enumerate(self.bits))


def _event_arrays(events) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    ordered = sorted(events, key=lambda e: (e.timestep, e.qubit))
    ev_t = np.asarray([e.timestep for e in ordered], dtype=np.int64)
    ev_q = np.asarray([e.qubit for e in ordered], dtype=np.int8)
    ev_k = np.asarray([PAULI_CODES[e.pauli] for e in ordered], dtype=np.int8)
    return ev_t, ev_q, ev_k


def run_trajectory(
    circuit: Circuit,
    events=(),
    forced_j: int | None = None,
    rng: np.random.Generator | None = None,
    initial_state: np.ndarray | None = None,
) -> TrajectoryResult:
    """Run one trajectory through the compiled circuit.

    With forced_j, every measurement is forced to the matching bit of j
    (least significant bit at step 0) and the returned probability is
    the Born probability of that bit string under the given errors.
    Otherwise measurements are sampled from rng.
    """
    nm = circuit.measure_count
    if forced_j is not None:
        if not 0 <= forced_j < (1 << nm):
            raise ValueError(f"target j={forced_j} out of range for {nm} measurements")
        forced = np.asarray([(forced_j >> t) & 1 for t in range(nm)], dtype=np.int8)
        uniforms = np.zeros(nm)
    else:
        if rng is None:
            raise ValueError("sampled run needs an rng")
        forced = np.full(nm, -1, dtype=np.int8)
        uniforms = rng.random(nm)

    if initial_state is None:
        amps = np.zeros(1 << circuit.qubit_count, dtype=np.complex128)
        amps[circuit.initial_basis_index] = 1.0
    else:
        amps = np.array(initial_state, dtype=np.complex128)

    ev_t, ev_q, ev_k = _event_arrays(events)
    out_bits = np.zeros(nm, dtype=np.int8)
    last_outcome = np.full(circuit.qubit_count, -1, dtype=np.int8)
    c = circuit.compiled()
    prob, degen = k.run_trajectory(
        amps,
        c.op_code,
        c.op_q0,
        c.op_q1,
        c.op_angle,
        c.op_step,
        c.op_matrix,
        c.layer_ptr,
        c.layer_timestep,
        ev_t,
        ev_q,
        ev_k,
        forced,
        uniforms,
        out_bits,
        last_outcome,
    )
    return TrajectoryResult(
        probability=float(prob),
        bits=tuple(int(b) for b in out_bits),
        degenerate=bool(degen),
    )


def run_trajectory_reference(
    circuit: Circuit,
    events=(),
    forced_j: int | None = None,
    rng: np.random.Generator | None = None,
    norm_log: list | None = None,
) -> TrajectoryResult:
    """Pure-python trajectory used to cross-check the compiled loop.

    Optionally records the state norm after every layer and error into
    norm_log, which is what the norm-preservation audit inspects.
    """
    nm = circuit.measure_count
    sv = StateVector.basis_state(circuit.qubit_count, circuit.initial_basis_index)
    by_timestep: dict[int, list[ErrorEvent]] = {}
    for e in sorted(events, key=lambda e: (e.timestep, e.qubit)):
        by_timestep.setdefault(e.timestep, []).append(e)
    bits: list[int] = []
    prob = 1.0
    degenerate = False
    timesteps = circuit.layer_timesteps
    for layer, ts in zip(circuit.layers, timesteps):
        for g in layer:
            if g.kind == GateKind.MEASURE:
                forced = None if forced_j is None else (forced_j >> g.step) & 1
                try:
                    bit, p = sv.measure(g.q0, forced_outcome=forced, rng=rng)
                except DegenerateBranchError:
                    return TrajectoryResult(0.0, tuple(bits), True)
                bits.append(bit)
                prob *= p
            elif g.kind == GateKind.RESET:
                sv.reset(g.q0, bits[-1] if bits else 0)
            else:
                sv.apply(g, bits)
        if ts >= 0:
            for e in by_timestep.get(ts, ()):
                sv.apply_pauli(e.pauli, e.qubit)
        if norm_log is not None:
            norm_log.append(sv.norm_sq())
    return TrajectoryResult(prob, tuple(bits), degenerate)
