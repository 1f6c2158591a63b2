"""Circuit construction and depth accounting for the two layouts."""
from __future__ import annotations

from ..numtheory import ModInstance
from .schedule import Circuit, Emitter, Section, schedule
from .builder import build_non_lnn, linear_registers, emit_multiply_step

LAYOUTS = ("non_lnn", "lnn")

# Depth models K(L): cubic fits published for the two layouts.
DEPTH_POLY = {
    "non_lnn": (32, 66, -2, -1),
    "lnn": (32, 80, -4, -2),
}


def depth_polynomial(L: int, layout: str) -> int:
    c3, c2, c1, c0 = DEPTH_POLY[layout]
    return ((c3 * L + c2) * L + c1) * L + c0


def build_qpf(instance: ModInstance, layout: str = "non_lnn") -> Circuit:
    """Build the 2L+4-qubit period finding circuit for the given layout."""
    if layout == "non_lnn":
        return build_non_lnn(instance)
    if layout == "lnn":
        from .lnn import build_lnn

        return build_lnn(instance)
    raise ValueError(f"unknown layout {layout!r}; expected one of {LAYOUTS}")
