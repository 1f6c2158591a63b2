"""Gate-stream scheduling into parallel layers with depth accounting.

The builders emit a linear gate program; scheduling is as-soon-as-
possible list scheduling, which preserves per-qubit gate order (and
therefore the circuit semantics) while letting independent gates share
a timestep.  Depth follows the convention that every two-qubit gate
costs one timestep and single-qubit gates are absorbed into
neighbouring timesteps: only layers containing at least one two-qubit
gate are counted, and error injection sites are indexed by those
counted layers.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..engine import Gate, GateKind
from ..numtheory import ModInstance


class Barrier:
    """Scheduling fence: gates after it start no earlier than its qubits allow."""

    __slots__ = ("qubits",)

    def __init__(self, qubits=None):
        self.qubits = qubits  # None = all qubits


@dataclass
class Section:
    """A named span of the circuit, in gate indices and counted timesteps."""

    name: str
    gate_start: int
    gate_end: int  # exclusive
    t_start: int = -1  # first counted timestep touched by the section's gates
    t_end: int = -1    # last counted timestep (inclusive)


class Emitter:
    """Accumulates a gate program plus named sections and barriers."""

    def __init__(self, qubit_count: int):
        self.qubit_count = qubit_count
        self.stream: list = []
        self.sections: list[Section] = []
        self._open: list[Section] = []

    def emit(self, gate: Gate):
        self.stream.append(gate)

    def barrier(self, qubits=None):
        self.stream.append(Barrier(qubits))

    def gate(self, kind: GateKind, q0: int, q1: int = -1, angle: float = 0.0, step: int = -1):
        self.stream.append(Gate(kind, q0, q1, angle, step))

    def begin(self, name: str) -> Section:
        sec = Section(name, gate_start=len(self.stream), gate_end=-1)
        self._open.append(sec)
        return sec

    def end(self):
        sec = self._open.pop()
        sec.gate_end = len(self.stream)
        self.sections.append(sec)

    def capture(self, fn, *args, **kwargs) -> list:
        """Run an emission function, returning (and removing) its gates."""
        mark = len(self.stream)
        fn(*args, **kwargs)
        captured = [g for g in self.stream[mark:] if isinstance(g, Gate)]
        del self.stream[mark:]
        return captured

    def emit_inverse(self, gates: list):
        """Emit the exact inverse of a captured gate list."""
        for g in reversed(gates):
            self.emit(invert_gate(g))


def invert_gate(g: Gate) -> Gate:
    kind = g.kind
    if kind in (GateKind.PHASE, GateKind.CPHASE, GateKind.CPHASE_SWAP):
        return Gate(kind, g.q0, g.q1, -g.angle, g.step)
    if kind == GateKind.CNOT_SWAP:
        # (swap . cnot)^-1 = cnot . swap = swap . cnot with roles exchanged
        return Gate(kind, g.q1, g.q0)
    if kind == GateKind.U1Q:
        m00, m01, m10, m11 = g.matrix
        return Gate(
            kind,
            g.q0,
            matrix=(
                complex(m00).conjugate(),
                complex(m10).conjugate(),
                complex(m01).conjugate(),
                complex(m11).conjugate(),
            ),
        )
    if kind in (GateKind.HADAMARD, GateKind.PAULI_X, GateKind.PAULI_Z, GateKind.CNOT, GateKind.SWAP):
        # fresh object: scheduling bookkeeping assumes gate identity is unique
        return Gate(kind, g.q0, g.q1, g.angle, g.step)
    raise ValueError(f"gate kind {kind.name} has no static inverse")


@dataclass
class CompiledCircuit:
    """Flat array form of a scheduled circuit for the numba trajectory loop."""

    op_code: np.ndarray
    op_q0: np.ndarray
    op_q1: np.ndarray
    op_angle: np.ndarray
    op_step: np.ndarray  # measurement/feedback step, or U1Q matrix-table row
    op_matrix: np.ndarray
    layer_ptr: np.ndarray
    layer_timestep: np.ndarray


@dataclass
class Circuit:
    """A scheduled gate-layer circuit over 2L+4 qubits."""

    qubit_count: int
    layers: list[list[Gate]]
    layout: str  # "non_lnn" | "lnn"
    instance: ModInstance
    sections: list[Section] = field(default_factory=list)
    initial_basis_index: int = 0
    measure_count: int = 0
    registers: dict = field(default_factory=dict)
    _compiled: CompiledCircuit | None = field(default=None, repr=False)
    _layer_timestep: list[int] | None = field(default=None, repr=False)

    @property
    def layer_timesteps(self) -> list[int]:
        """Counted-timestep index per layer (-1 for uncounted layers)."""
        if self._layer_timestep is None:
            ts = []
            t = 0
            for layer in self.layers:
                if any(g.is_two_qubit() for g in layer):
                    ts.append(t)
                    t += 1
                else:
                    ts.append(-1)
            self._layer_timestep = ts
        return self._layer_timestep

    def depth(self) -> int:
        """Two-qubit timestep count (single-qubit gates are absorbed)."""
        return sum(1 for t in self.layer_timesteps if t >= 0)

    def depth_all_layers(self) -> int:
        """Layer count including single-qubit-only layers."""
        return len(self.layers)

    def error_locations(self) -> int:
        return self.depth() * self.qubit_count

    def gate_count(self, two_qubit_only: bool = False) -> int:
        total = 0
        for layer in self.layers:
            for g in layer:
                if not two_qubit_only or g.is_two_qubit():
                    total += 1
        return total

    def section_span(self, name: str) -> tuple[int, int]:
        """Counted-timestep span (inclusive) of a named section."""
        for sec in self.sections:
            if sec.name == name:
                if sec.t_start < 0:
                    raise ValueError(f"section {name} contains no counted timesteps")
                return sec.t_start, sec.t_end
        raise KeyError(f"no section named {name!r}; have {[s.name for s in self.sections]}")

    def validate(self):
        """Check layer disjointness and (for lnn) gate adjacency.

        Disjointness applies to the timestep-occupying two-qubit gates;
        single-qubit gates may share the slot of the two-qubit gate
        they were absorbed into (canonical decomposition), in emission
        order.
        """
        for i, layer in enumerate(self.layers):
            pair_of: dict[int, tuple] = {}
            for g in layer:
                for q in g.qubits:
                    if not 0 <= q < self.qubit_count:
                        raise AssertionError(f"layer {i}: qubit {q} out of range")
                if g.is_two_qubit():
                    pair = (g.q0, g.q1) if g.q0 < g.q1 else (g.q1, g.q0)
                    for q in pair:
                        if pair_of.setdefault(q, pair) != pair:
                            raise AssertionError(
                                f"layer {i}: qubit {q} in two distinct two-qubit gates"
                            )
                    if self.layout == "lnn" and abs(g.q0 - g.q1) != 1:
                        raise AssertionError(
                            f"layer {i}: non-adjacent gate {g.kind.name} on ({g.q0}, {g.q1})"
                        )
        return self

    def compiled(self) -> CompiledCircuit:
        if self._compiled is None:
            codes, q0s, q1s, angles, steps = [], [], [], [], []
            matrices: list[tuple] = []
            matrix_index: dict[tuple, int] = {}
            layer_ptr = [0]
            for layer in self.layers:
                for g in layer:
                    codes.append(int(g.kind))
                    q0s.append(g.q0)
                    q1s.append(g.q1)
                    angles.append(g.angle)
                    if g.kind == GateKind.U1Q:
                        key = tuple(complex(m) for m in g.matrix)
                        if key not in matrix_index:
                            matrix_index[key] = len(matrices)
                            matrices.append(key)
                        steps.append(matrix_index[key])
                    else:
                        steps.append(g.step)
                layer_ptr.append(len(codes))
            if not matrices:
                matrices.append((1 + 0j, 0j, 0j, 1 + 0j))
            self._compiled = CompiledCircuit(
                op_code=np.asarray(codes, dtype=np.int8),
                op_q0=np.asarray(q0s, dtype=np.int8),
                op_q1=np.asarray(q1s, dtype=np.int8),
                op_angle=np.asarray(angles, dtype=np.float64),
                op_step=np.asarray(steps, dtype=np.int16),
                op_matrix=np.asarray(matrices, dtype=np.complex128),
                layer_ptr=np.asarray(layer_ptr, dtype=np.int64),
                layer_timestep=np.asarray(self.layer_timesteps, dtype=np.int32),
            )
        return self._compiled


def _asap_layers(stream, q_count: int) -> tuple[list[list[Gate]], list[int]]:
    """List-schedule a gate stream under the canonical-decomposition rule.

    Single-qubit gates are buffered and flushed into the timestep of
    the next two-qubit gate on their qubit (in program order within
    the layer), so they never occupy a step of their own.  Consecutive
    two-qubit gates on the same pair, separated only by singles on
    those qubits, compose into a single two-qubit unitary and share a
    timestep.
    """
    stream = list(stream)
    next_free = [0] * q_count
    pending: list[list[Gate]] = [[] for _ in range(q_count)]
    last_pair = [None] * q_count  # (layer, pair) of the qubit's last 2q gate
    layers: list[list[Gate]] = []
    placed: dict[int, int] = {}

    def flush(q: int, t: int):
        while len(layers) <= t:
            layers.append([])
        for s in pending[q]:
            layers[t].append(s)
            placed[id(s)] = t
        pending[q].clear()

    for item in stream:
        if isinstance(item, Barrier):
            qs = range(q_count) if item.qubits is None else item.qubits
            fence = max(next_free[q] for q in qs)
            for q in qs:
                flush(q, fence)
                next_free[q] = fence
                last_pair[q] = None
            continue
        g = item
        if not g.is_two_qubit():
            if g.kind in (GateKind.MEASURE, GateKind.RESET, GateKind.FEEDBACK_PHASE):
                # pin classical operations at the qubit's current step
                t = next_free[g.q0]
                flush(g.q0, t)
                while len(layers) <= t:
                    layers.append([])
                layers[t].append(g)
                placed[id(g)] = t
                last_pair[g.q0] = None
            else:
                pending[g.q0].append(g)
            continue
        a, b = g.q0, g.q1
        pair = (a, b) if a < b else (b, a)
        merge = (
            last_pair[a] is not None
            and last_pair[a] == last_pair[b]
            and last_pair[a][1] == pair
            and next_free[a] == next_free[b] == last_pair[a][0] + 1
        )
        t = last_pair[a][0] if merge else max(next_free[a], next_free[b])
        flush(a, t)
        flush(b, t)
        while len(layers) <= t:
            layers.append([])
        layers[t].append(g)
        placed[id(g)] = t
        next_free[a] = next_free[b] = t + 1
        last_pair[a] = last_pair[b] = (t, pair)

    for q in range(q_count):
        if pending[q]:
            flush(q, next_free[q])

    gate_layer = []
    for item in stream:
        gate_layer.append(-1 if isinstance(item, Barrier) else placed[id(item)])
    return layers, gate_layer


def _compact(stream: list, q_count: int, rounds: int = 2) -> list:
    """Squeeze seams with alternating forward/backward list scheduling.

    Greedy forward scheduling of a mirrored stream yields the latest-
    possible placement of the original; re-running forward on that
    order closes gaps the one-pass greedy left (noticeable where a
    section was emitted as the reversal of another).  Preserves
    per-qubit gate order, so the circuit semantics are untouched.
    """
    for _ in range(rounds):
        layers, _ = _asap_layers(reversed(stream), q_count)
        stream = [g for layer in reversed(layers) for g in reversed(layer)]
        layers, _ = _asap_layers(stream, q_count)
        stream = [g for layer in layers for g in layer]
    return stream


def schedule(emitter: Emitter, layout: str, instance: ModInstance, compact: bool = True, **meta) -> Circuit:
    """Schedule an emitted program into a Circuit."""
    q_count = emitter.qubit_count
    stream = emitter.stream
    if compact and not any(isinstance(x, Barrier) for x in stream):
        stream = _compact(list(stream), q_count)
    layers, gate_layer = _asap_layers(stream, q_count)
    measure_count = sum(
        1 for layer in layers for g in layer if g.kind == GateKind.MEASURE
    )

    circuit = Circuit(
        qubit_count=q_count,
        layers=layers,
        layout=layout,
        instance=instance,
        sections=emitter.sections,
        measure_count=measure_count,
        **meta,
    )
    # resolve section spans to counted timesteps; compaction reorders
    # the stream, so map sections through gate identity
    ts = circuit.layer_timesteps
    layer_of = {}
    for li, layer in enumerate(circuit.layers):
        for g in layer:
            layer_of[id(g)] = li
    for sec in circuit.sections:
        touched = []
        for item in emitter.stream[sec.gate_start : sec.gate_end]:
            if isinstance(item, Barrier):
                continue
            li = layer_of.get(id(item))
            if li is not None and ts[li] >= 0:
                touched.append(ts[li])
        if touched:
            sec.t_start = min(touched)
            sec.t_end = max(touched)
    return circuit
