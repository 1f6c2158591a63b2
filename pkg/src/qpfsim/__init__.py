"""qpfsim: quantum period finding circuits under discrete Pauli errors."""

from .numtheory import ModInstance, TABLE2_INSTANCES
from .circuits import build_qpf, depth_polynomial

__all__ = ["ModInstance", "TABLE2_INSTANCES", "build_qpf", "depth_polynomial"]
__version__ = "0.1.0"
