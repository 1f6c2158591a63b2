"""Linear-nearest-neighbour layout of the period finding circuit.

Same arithmetic as the arbitrary-connectivity build, re-expressed so
every two-qubit gate acts on adjacent line positions.  The moving
pieces:

  * marching ladders: a control walks through the accumulator block
    with fused controlled-phase+swap gates, applying its adder
    rotation to each qubit as it passes, and parks on the far side
    (the block shifts one slot toward where the control came from);
  * marching transforms: the QFT / inverse QFT as a triangular network
    of fused controlled-phase+swap gates that physically reverses the
    block order while transforming it;
  * passenger lanes: parked qubits cross the block ahead of a
    transform's real marchers using plain swaps, so ancilla logistics
    ride inside the transform's pipeline;
  * fused compare crossings: the comparison ancilla picks up its CNOT
    from the overflow qubit while crossing in a passenger lane, before
    that qubit's first Hadamard (i.e. still in the value basis);
  * a riffle mesh around each register-swap stage that interleaves the
    work register with the accumulator so the controlled swaps act on
    neighbouring pairs, with the master walking the pair line once.

Line order: [u_{L-1} .. u_1 u_0, m, A, b_0 .. b_L, C].  Every role's
position is tracked; gates are emitted on physical positions and
adjacency is asserted mechanically.  Each modular-multiply stage is
position-neutral (every role ends where it started), which is what
makes the mirrored inverse-multiply emission valid.
"""
from __future__ import annotations

import math

from ..engine import Gate, GateKind
from ..numtheory import ModInstance
from .builder import add_angle, _ry_gate
from .schedule import Circuit, Emitter, invert_gate, schedule

H = GateKind.HADAMARD
X = GateKind.PAULI_X
PHASE = GateKind.PHASE
CPHASE = GateKind.CPHASE
CNOT = GateKind.CNOT
SWAP = GateKind.SWAP
CPHASE_SWAP = GateKind.CPHASE_SWAP
CNOT_SWAP = GateKind.CNOT_SWAP
FEEDBACK = GateKind.FEEDBACK_PHASE
MEASURE = GateKind.MEASURE
RESET = GateKind.RESET


class Tracker:
    """Role-to-line-position bookkeeping with adjacency-checked emission."""

    def __init__(self, em: Emitter, L: int):
        self.em = em
        self.L = L
        self.w = L + 1
        # accumulator seeded top-first so the opening transform leaves
        # b0 beside the ancilla zone, which is where the ladders enter
        order = [f"u{L - 1 - k}" for k in range(L)] + ["m", "A", "C"]
        order += [f"b{self.w - 1 - k}" for k in range(self.w)]
        self.slot = {role: i for i, role in enumerate(order)}
        self.role = {i: role for i, role in enumerate(order)}

    def snapshot(self) -> dict:
        return dict(self.slot)

    def restore(self, snap: dict):
        self.slot = dict(snap)
        self.role = {p: r for r, p in snap.items()}

    def pos(self, role: str) -> int:
        return self.slot[role]

    def _move(self, r1: str, r2: str):
        p1, p2 = self.slot[r1], self.slot[r2]
        self.slot[r1], self.slot[r2] = p2, p1
        self.role[p1], self.role[p2] = r2, r1

    def adjacent(self, r1: str, r2: str) -> bool:
        return abs(self.slot[r1] - self.slot[r2]) == 1

    def _req(self, r1: str, r2: str):
        if not self.adjacent(r1, r2):
            raise AssertionError(f"{r1}@{self.slot[r1]} and {r2}@{self.slot[r2]} not adjacent")

    def swap(self, r1: str, r2: str):
        self._req(r1, r2)
        self.em.gate(SWAP, self.slot[r1], self.slot[r2])
        self._move(r1, r2)

    def cp(self, r1: str, r2: str, angle: float):
        self._req(r1, r2)
        self.em.gate(CPHASE, self.slot[r1], self.slot[r2], angle=angle)

    def cp_swap(self, marcher: str, other: str, angle: float):
        self._req(marcher, other)
        self.em.gate(CPHASE_SWAP, self.slot[marcher], self.slot[other], angle=angle)
        self._move(marcher, other)

    def cnot(self, ctrl: str, tgt: str):
        self._req(ctrl, tgt)
        self.em.gate(CNOT, self.slot[ctrl], self.slot[tgt])

    def cnot_swap(self, ctrl: str, tgt_marcher: str):
        """CNOT(ctrl -> marcher) fused with the marcher's crossing swap."""
        self._req(ctrl, tgt_marcher)
        self.em.gate(CNOT_SWAP, self.slot[ctrl], self.slot[tgt_marcher])
        self._move(ctrl, tgt_marcher)

    def single(self, kind: GateKind, role: str, angle: float = 0.0, step: int = -1):
        self.em.gate(kind, self.slot[role], angle=angle, step=step)

    def u1q(self, role: str, matrix: tuple):
        self.em.emit(Gate(GateKind.U1Q, self.slot[role], matrix=matrix))

    def block_slots(self) -> list[int]:
        slots = sorted(self.slot[f"b{k}"] for k in range(self.w))
        if slots[-1] - slots[0] != self.w - 1:
            raise AssertionError(f"accumulator block not contiguous: {slots}")
        return slots

    def block_order(self) -> list[str]:
        return [self.role[s] for s in self.block_slots()]

    def side_of(self, role: str) -> str:
        slots = self.block_slots()
        p = self.slot[role]
        if p < slots[0]:
            return "left"
        if p > slots[-1]:
            return "right"
        raise AssertionError(f"{role} is inside the block")


def _logical(role: str) -> int:
    return int(role[1:])


def march_ladder(tr: Tracker, ctrl: str, v: int, sign: int = 1, train=()):
    """Walk ctrl through the block adding sign*v in Fourier space.

    One fused controlled-phase+swap per accumulator qubit; ctrl parks
    on the far side and the block shifts one slot toward ctrl's origin.
    `train` roles (parked directly behind ctrl) follow with plain swaps.
    """
    v %= 1 << tr.w
    side = tr.side_of(ctrl)
    order = tr.block_order() if side == "left" else tr.block_order()[::-1]
    for b in order:
        tr.cp_swap(ctrl, b, sign * add_angle(v, _logical(b)))
    for car in train:
        for b in order:
            tr.swap(car, b)


def transform_block(tr: Tracker, kind: str, passengers=(), compare=None):
    """Marching QFT ("qft") or inverse QFT ("iqft") over the block.

    The first-processed qubit (overflow/top for qft, b0 for iqft) must
    sit at a block edge; each processed qubit takes its Hadamard there
    and marches across the remaining zone applying fused rotations.
    The block order is physically reversed on completion.

    passengers cross the whole block ahead of the marchers (plain
    swaps), entering from the processing edge.  compare=(role, flavour)
    marks the passenger that picks up the modular-reduction CNOT from
    the top qubit as it passes it, still in the value basis; flavour
    "inverted" wraps the pickup in X on the top qubit.
    """
    w = tr.w
    first = f"b{w - 1}" if kind == "qft" else "b0"
    sign = 1.0 if kind == "qft" else -1.0
    order = tr.block_order()
    if order[0] == first:
        edge = "left"
    elif order[-1] == first:
        edge = "right"
    else:
        raise AssertionError(f"{first} not at a block edge: {order}")

    top = f"b{w - 1}"
    for role in passengers:
        cross = tr.block_order() if edge == "left" else tr.block_order()[::-1]
        if not tr.adjacent(role, cross[0]):
            raise AssertionError(f"passenger {role} not adjacent {edge} block edge")
        for b in cross:
            if compare is not None and role == compare[0] and b == top:
                if compare[1] == "inverted":
                    tr.single(X, top)
                    tr.cnot_swap(top, role)
                    tr.single(X, top)
                else:
                    tr.cnot_swap(top, role)
            else:
                tr.swap(role, b)

    seq = list(range(w - 1, -1, -1)) if kind == "qft" else list(range(w))
    for idx, k in enumerate(seq):
        marcher = f"b{k}"
        cur = tr.block_order() if edge == "left" else tr.block_order()[::-1]
        if cur[0] != marcher:
            raise AssertionError(f"expected {marcher} at {edge} edge, block is {cur}")
        tr.single(H, marcher)
        for other in cur[1 : w - idx]:
            j, q = sorted((k, _logical(other)))
            tr.cp_swap(marcher, other, sign * math.pi / (1 << (q - j)))


_RY_POS = _ry_gate(0, math.pi / 4).matrix
_RY_NEG = _ry_gate(0, -math.pi / 4).matrix


def margolus_and(tr: Tracker, c_twice: str, c_once: str, target: str):
    """Relative-phase AND onto a |0> target (self-inverse sequence).

    c_twice must neighbour the target; c_once may sit one slot further
    with c_twice in between (its single CNOT is bridged by a swap
    sandwich that runs concurrently with the target's rotations).
    """
    bridged = not tr.adjacent(c_once, target)
    if bridged and not (tr.adjacent(c_once, c_twice) and tr.adjacent(c_twice, target)):
        raise AssertionError(f"cannot bridge {c_once} to {target}")
    tr.u1q(target, _RY_POS)
    tr.cnot(c_twice, target)
    tr.u1q(target, _RY_POS)
    if bridged:
        tr.swap(c_once, c_twice)
        tr.cnot(c_once, target)
        tr.swap(c_once, c_twice)
    else:
        tr.cnot(c_once, target)
    tr.u1q(target, _RY_NEG)
    tr.cnot(c_twice, target)
    tr.u1q(target, _RY_NEG)


def _bridged_cnot(tr: Tracker, ctrl: str, via: str, target: str):
    """CNOT over distance two: swap ctrl past `via`, fire, swap back."""
    if tr.adjacent(ctrl, target):
        tr.cnot(ctrl, target)
    else:
        tr.swap(ctrl, via)
        tr.cnot(ctrl, target)
        tr.swap(ctrl, via)


def emit_lnn_modadd_body(tr: Tracker, u_role: str, v: int, N: int):
    """Modular addition of v between its conjunction compute/uncompute.

    Entered and left with the parked order [.., m, A, C, block], block
    ascending (b0 at the ancilla side); every role ends where it
    started.  Ladder entries are chosen so each ladder walks the block
    in the order the neighbouring transform frees (or feeds) it, and
    both comparison CNOTs happen at the ancilla-side edge: the first
    fused into C's crossing of the following transform, the second
    against a parked C.
    """
    A, C = "A", "C"
    tr.swap(A, C)  # A past C to the block edge
    march_ladder(tr, A, v, +1)  # visits b0 first, feeding the inverse QFT
    for k in range(tr.w):  # subtract N, uncontrolled
        tr.single(PHASE, f"b{k}", angle=-add_angle(N, k))
    transform_block(tr, "iqft")
    # overflow test: C picks the CNOT up from the top qubit (now at the
    # ancilla-side edge) as the first swap of its crossing
    transform_block(tr, "qft", passengers=(C,), compare=(C, "plain"))
    # subtract v (A) then re-add N (C); both enter from the far side,
    # which the transform above released first
    tr.swap(A, C)  # C crossed to the far side; let A at it first
    march_ladder(tr, A, v, -1)
    march_ladder(tr, C, N, +1)
    # A returns across the inverse transform, whose start is gated on
    # the far edge anyway; the second overflow test then runs against
    # the parked comparison ancilla
    if not tr.adjacent(A, tr.block_order()[0]):
        tr.swap(A, C)
    transform_block(tr, "iqft", passengers=(A,))
    top = f"b{tr.w - 1}"
    tr.single(X, top)
    tr.cnot(top, C)
    tr.single(X, top)
    transform_block(tr, "qft")
    march_ladder(tr, A, v, +1)
    if not tr.adjacent("m", A):
        tr.swap(C, A)


def emit_lnn_cmult(tr: Tracker, a: int, N: int, u_order: list[str], open_qft: bool = True):
    """Accumulate a*u mod N into the block (master-controlled), LNN form.

    The conjunction uncompute of each modular adder merges with the
    next adder's compute: their adjacent master-CNOTs and rotations
    cancel exactly, leaving one bridged CNOT per work bit around the
    queue rotation.  open_qft=False skips the opening transform when
    the accumulator is already in the phase basis (the inverse-QFT /
    QFT pair at a stage boundary cancels).
    """
    if open_qft:
        transform_block(tr, "qft")
    emit_lnn_cmult_main(tr, a, N, u_order)


def emit_lnn_cmult_main(tr: Tracker, a: int, N: int, u_order: list[str]):
    """Everything after the opening transform: adders and closing IQFT."""
    m, A = "m", "A"
    margolus_and(tr, c_twice=m, c_once=u_order[0], target=A)
    for idx, u_role in enumerate(u_order):
        emit_lnn_modadd_body(tr, u_role, (a << _logical(u_role)) % N, N)
        if idx + 1 < len(u_order):
            # uncompute for u_role merged with the compute for the next
            # bit: the inner master-CNOTs and rotations cancel exactly
            tr.u1q(A, _RY_POS)
            tr.cnot(m, A)
            tr.u1q(A, _RY_POS)
            _bridged_cnot(tr, u_role, m, A)
            _rotate_queue(tr, u_role, u_order)
            _bridged_cnot(tr, u_order[idx + 1], m, A)
            tr.u1q(A, _RY_NEG)
            tr.cnot(m, A)
            tr.u1q(A, _RY_NEG)
        else:
            margolus_and(tr, c_twice=m, c_once=u_role, target=A)
            _rotate_queue(tr, u_role, u_order)
    transform_block(tr, "iqft")


def _rotate_queue(tr: Tracker, spent: str, u_order):
    """Bubble the spent work bit to the back of the queue (cyclic shift).

    Only the first swap (which promotes the next bit to the queue head)
    gates the following conjunction; the rest drift left during the
    next modular adder's accumulator work.
    """
    back = min(tr.pos(u) for u in u_order)
    while tr.pos(spent) > back:
        tr.swap(tr.role[tr.pos(spent) - 1], spent)


def _fredkin_walk(tr: Tracker, ctrl: str, ks):
    """Controlled register swaps on consecutive pairs, ctrl walking right.

    One Fredkin per (u_k, b_k); the control's hop to the next pair
    doubles as the bridge for its (ctrl, b) CCZ rotation.
    """
    for k in ks:
        u, b = f"u{k}", f"b{k}"
        tr.cnot(b, u)
        tr.single(H, b)
        tr.cp(u, b, math.pi / 2)
        tr.cnot(ctrl, u)
        tr.cp(u, b, -math.pi / 2)
        tr.cnot(ctrl, u)
        tr.swap(ctrl, u)
        tr.cp(ctrl, b, math.pi / 2)
        tr.swap(ctrl, b)
        tr.single(H, b)
        tr.cnot(b, u)


def emit_lnn_swap_stage(tr: Tracker):
    """Master-controlled register swap u_k <-> b_k on neighbouring pairs.

    The master fans out onto the idle conjunction ancilla (CNOT copy,
    uncomputed at the end), the queue riffles into the block, and the
    two controls walk disjoint halves of the pair line in parallel.
    Position neutral.
    """
    L = tr.L
    snap = tr.snapshot()
    # fan the control out onto both idle ancillas while adjacent
    tr.cnot("m", "A")
    tr.cnot("A", "C")
    # pair order follows the current (descending) block layout; the
    # controls walk disjoint thirds of the pair line in parallel, the
    # master taking the earliest-forming pairs
    ks_all = list(range(L - 1, -1, -1))
    chunk = -(-L // 3)
    parts = [ks_all[:chunk], ks_all[chunk : 2 * chunk], ks_all[2 * chunk :]]
    ctrls = ["m", "A", "C"]
    target = [f"b{L}"]
    for ctrl, ks in zip(ctrls, parts):
        if not ks:
            target.insert(0, ctrl)
            continue
        target.append(ctrl)
        for k in ks:
            target += [f"u{k}", f"b{k}"]
    _permute_to(tr, target)
    for ctrl, ks in zip(ctrls, parts):
        _fredkin_walk(tr, ctrl, ks)
    _permute_to(tr, sorted(snap, key=snap.get))
    tr.cnot("A", "C")
    tr.cnot("m", "A")
    if tr.snapshot() != snap:
        raise AssertionError("swap stage did not restore positions")


def _permute_to(tr: Tracker, target_order: list[str]):
    """Odd-even transposition network moving roles to the target layout.

    The target must be a permutation of the whole line; swaps are
    emitted in sorting-network waves so independent moves share layers.
    """
    n = len(target_order)
    rank = {role: i for i, role in enumerate(target_order)}
    for _ in range(n + 1):
        moved = False
        for parity in (0, 1):
            for i in range(parity, n - 1, 2):
                r1, r2 = tr.role[i], tr.role[i + 1]
                if rank[r1] > rank[r2]:
                    tr.swap(r1, r2)
                    moved = True
        if not moved:
            return
    raise AssertionError("permutation network failed to converge")


def build_lnn(instance: ModInstance) -> Circuit:
    L = instance.L
    N = instance.N
    em = Emitter(2 * L + 4)
    tr = Tracker(em, L)
    u_order = [f"u{k}" for k in range(L)]
    initial_u0_slot = tr.pos("u0")
    initial_master_slot = tr.pos("m")
    registers = {
        "master": initial_master_slot,
        "u": [tr.pos(u) for u in u_order],
        "b": [tr.pos(f"b{k}") for k in range(L + 1)],
        "and_anc": tr.pos("A"),
        "cmp_anc": tr.pos("C"),
    }

    for step in range(2 * L):
        power = 2 * L - 1 - step
        multiplier = pow(instance.x, 1 << power, N)
        last = step == 2 * L - 1
        tr.single(H, "m")
        em.begin(f"step{step:02d}")
        em.begin(f"step{step:02d}.mult_fwd")
        # the opening transform cancels against the previous stage's
        # closing inverse transform (nothing between them touches the
        # accumulator), so only the first stage emits it
        start = tr.snapshot()
        emit_lnn_cmult(tr, multiplier, N, u_order, open_qft=(step == 0))
        fwd_end = tr.snapshot()
        em.end()
        em.begin(f"step{step:02d}.swap")
        emit_lnn_swap_stage(tr)
        if tr.snapshot() != fwd_end:
            raise AssertionError("swap stage is not position-neutral")
        em.end()
        em.begin(f"step{step:02d}.mult_inv")
        a_inv = pow(multiplier, -1, N)
        qft_gates = em.capture(transform_block, tr, "qft")
        post_qft = tr.snapshot()
        main_gates = em.capture(emit_lnn_cmult_main, tr, a_inv, N, u_order)
        for g in reversed(main_gates):
            em.emit(invert_gate(g))
        tr.restore(post_qft)
        if last:
            for g in reversed(qft_gates):
                em.emit(invert_gate(g))
            tr.restore(fwd_end)
        em.end()
        em.end()
        tr.single(FEEDBACK, "m", step=step)
        tr.single(H, "m")
        tr.single(MEASURE, "m", step=step)
        tr.single(RESET, "m")

    circuit = schedule(
        em,
        layout="lnn",
        instance=instance,
        initial_basis_index=1 << initial_u0_slot,
        registers=registers,
    )
    return circuit.validate()
