"""Analytic output distribution of error-free period finding.

The measured register value j follows a Dirichlet-kernel spectrum
peaked at multiples of 2**(2L)/r.  The closed form here serves as the
oracle that simulation results are normalised against and validated
against.

Conventions: with M_tot = 2**(2L) and M superposition terms, the
single-branch probability is

    p(j; M) = |sum_{n<M} exp(2*pi*i*j*n*r / M_tot)|^2 / (M * M_tot)

normalised by 1/M (rather than r/M_tot) so it sums to exactly 1 even
when r does not divide M_tot.  The full circuit leaves the function
register unmeasured, which averages p(j; M_b) over the r residue
branches with their natural weights; `output_distribution` computes
that mixture.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def default_term_count(L: int, r: int, k0: int = 0) -> int:
    """Number of k values with k = k0 + n*r below 2**(2L)."""
    return (((1 << (2 * L)) - 1 - k0) // r) + 1


@dataclass(frozen=True)
class SpectrumParams:
    """Parameters of the single-branch spectrum p(j; M)."""

    L: int
    r: int
    M: int | None = None  # defaults to the k0 = 0 branch count

    def __post_init__(self):
        if self.L < 1:
            raise ValueError(f"L must be positive, got {self.L}")
        if not 1 <= self.r < (1 << self.L):
            raise ValueError(f"need 1 <= r < 2**L, got r={self.r}")
        if self.M is not None:
            cap = math.ceil((1 << (2 * self.L)) / self.r)
            if not 1 <= self.M <= cap:
                raise ValueError(f"need 1 <= M <= {cap}, got M={self.M}")

    @property
    def terms(self) -> int:
        return self.M if self.M is not None else default_term_count(self.L, self.r)

    @property
    def total(self) -> int:
        return 1 << (2 * self.L)


def peak_probability(j: int, params: SpectrumParams) -> float:
    """Closed-form single-branch probability of measuring j.

    Evaluates sin^2(pi*M*j*r/M_tot) / (M * M_tot * sin^2(pi*j*r/M_tot))
    with the angle arguments reduced by exact integer arithmetic, so
    peaks and zeros are hit exactly.  The M^2 limit applies when the
    denominator angle is a multiple of pi.
    """
    M = params.terms
    M_tot = params.total
    r = params.r
    a = (j * r) % M_tot
    if a == 0:
        return M / M_tot
    b = (M * j * r) % M_tot
    if b == 0:
        return 0.0
    num = math.sin(math.pi * b / M_tot)
    den = math.sin(math.pi * a / M_tot)
    return (num * num) / (den * den) / (M * M_tot)


def useful_j_set(params: SpectrumParams) -> set[int]:
    """The j values from which the period is recoverable.

    floor and ceil of c * 2**(2L) / r for 0 < c < r, deduplicated when
    the peak is an exact integer.
    """
    M_tot = params.total
    r = params.r
    js: set[int] = set()
    for c in range(1, r):
        js.add((c * M_tot) // r)
        js.add(-((-c * M_tot) // r))  # ceil
    return js


def success_probability(params: SpectrumParams) -> float:
    """Summed single-branch probability over the useful j set."""
    return sum(peak_probability(j, params) for j in useful_j_set(params))


def branch_term_counts(L: int, r: int) -> list[tuple[int, int]]:
    """(term count, multiplicity) over the r residue branches k0 = 0..r-1."""
    counts: dict[int, int] = {}
    for k0 in range(r):
        m = default_term_count(L, r, k0)
        counts[m] = counts.get(m, 0) + 1
    return sorted(counts.items())


def output_probability(j: int, L: int, r: int) -> float:
    """Probability of measuring j from the full (unmeasured-register) circuit.

    Branch-weighted mixture of the single-branch spectra: branch k0
    holds M_k0 of the 2**(2L) superposed k values, so it occurs with
    weight M_k0 / 2**(2L).  Coincides with peak_probability when
    r | 2**(2L).
    """
    M_tot = 1 << (2 * L)
    total = 0.0
    for m, mult in branch_term_counts(L, r):
        p = peak_probability(j, SpectrumParams(L=L, r=r, M=m))
        total += mult * m / M_tot * p
    return total


def output_distribution(L: int, r: int) -> np.ndarray:
    """Full 2**(2L)-point circuit output distribution (branch mixture)."""
    M_tot = 1 << (2 * L)
    probs = np.zeros(M_tot)
    for m, mult in branch_term_counts(L, r):
        params = SpectrumParams(L=L, r=r, M=m)
        weight = mult * m / M_tot
        for j in range(M_tot):
            probs[j] += weight * peak_probability(j, params)
    return probs


def circuit_success_probability(L: int, r: int) -> float:
    """Probability that the circuit outputs a useful j (branch mixture)."""
    return sum(output_probability(j, L, r) for j in useful_j_set(SpectrumParams(L=L, r=r)))
