"""Discrete Pauli error injection.

One fault is a single-qubit X, XZ or Z applied at a (timestep, qubit)
site after that timestep's gates complete.  Memory and gate errors are
treated identically: every qubit is a candidate at every counted
timestep, idle or not.  Two sampling modes: an independent per-site
channel with total probability p (p/3 per Pauli), and the
fixed-error-count protocol that places exactly n faults uniformly over
distinct sites.

Reproducibility: all sampling uses numpy's PCG64 Generator; a given
(seed, mode) draws an identical event list on any platform running the
same numpy version.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .circuits.schedule import Circuit

PAULIS = ("X", "XZ", "Z")
PAULI_CODES = {"X": 0, "XZ": 1, "Z": 2}


@dataclass(frozen=True, order=True)
class ErrorEvent:
    timestep: int
    qubit: int
    pauli: str

    def __post_init__(self):
        if self.pauli not in PAULIS:
            raise ValueError(f"pauli must be one of {PAULIS}, got {self.pauli!r}")
        if self.timestep < 0 or self.qubit < 0:
            raise ValueError("timestep and qubit must be non-negative")


@dataclass(frozen=True)
class NoiseSpec:
    """Either per_step(p) or fixed_count(n); see the module docstring."""

    mode: str
    p: float = 0.0
    n: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("per_step", "fixed_count"):
            raise ValueError(f"unknown noise mode {self.mode!r}")
        if self.mode == "per_step" and not 0.0 <= self.p <= 1.0:
            raise ValueError(f"need 0 <= p <= 1, got {self.p}")
        if self.mode == "fixed_count" and self.n < 0:
            raise ValueError(f"need n >= 0, got {self.n}")

    @classmethod
    def per_step(cls, p: float, seed: int = 0) -> "NoiseSpec":
        return cls(mode="per_step", p=p, seed=seed)

    @classmethod
    def fixed_count(cls, n: int, seed: int = 0) -> "NoiseSpec":
        return cls(mode="fixed_count", n=n, seed=seed)


def sample_errors(
    spec: NoiseSpec,
    circuit: Circuit,
    rng: np.random.Generator | None = None,
    timestep_range: tuple[int, int] | None = None,
    paulis=PAULIS,
) -> list[ErrorEvent]:
    """Draw an error-event list for one trial.

    timestep_range (inclusive bounds) and paulis restrict the candidate
    sites; defaults cover the whole circuit and all three Paulis.
    Fixed-count sites are drawn without replacement so coinciding
    Paulis cannot silently cancel.
    """
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    depth = circuit.depth()
    t_lo, t_hi = (0, depth - 1) if timestep_range is None else timestep_range
    if not 0 <= t_lo <= t_hi < depth:
        raise ValueError(f"timestep range {t_lo}..{t_hi} outside 0..{depth - 1}")
    n_steps = t_hi - t_lo + 1
    q_count = circuit.qubit_count
    n_sites = n_steps * q_count
    paulis = tuple(paulis)

    if spec.mode == "per_step":
        hits = rng.random((n_steps, q_count)) < spec.p
        steps, qubits = np.nonzero(hits)
        kinds = rng.integers(0, len(paulis), size=steps.shape[0])
        return [
            ErrorEvent(timestep=t_lo + int(t), qubit=int(q), pauli=paulis[kind])
            for t, q, kind in zip(steps, qubits, kinds)
        ]

    if spec.n > n_sites:
        raise ValueError(f"cannot place {spec.n} errors on {n_sites} sites")
    sites = rng.choice(n_sites, size=spec.n, replace=False)
    kinds = rng.integers(0, len(paulis), size=spec.n)
    events = [
        ErrorEvent(
            timestep=t_lo + int(site) // q_count,
            qubit=int(site) % q_count,
            pauli=paulis[kind],
        )
        for site, kind in zip(sites, kinds)
    ]
    return sorted(events)


def apply_error(state, event: ErrorEvent):
    """Apply one fault operator to a StateVector (norm preserving)."""
    return state.apply_pauli(event.pauli, event.qubit)


def events_to_json(events) -> str:
    return json.dumps(
        [{"timestep": e.timestep, "qubit": e.qubit, "pauli": e.pauli} for e in events],
        indent=0,
    )


def events_from_json(text: str) -> list[ErrorEvent]:
    return [ErrorEvent(**d) for d in json.loads(text)]
