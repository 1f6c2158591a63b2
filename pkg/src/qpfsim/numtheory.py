"""Classical pre- and post-processing for period finding.

Modular arithmetic, multiplicative orders, continued-fraction period
extraction from a measured register value, and factor recovery from a
known period.  Everything here is exact integer arithmetic at desk
scale (N up to ~2**10), so brute-force order scans are fine.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass


class DomainError(ValueError):
    """Raised when an argument is outside an operation's domain."""


def gcd(a: int, b: int) -> int:
    """Greatest common divisor of two non-negative integers."""
    if a < 0 or b < 0:
        raise DomainError("gcd expects non-negative integers")
    if a == 0 and b == 0:
        raise DomainError("gcd(0, 0) is undefined")
    return math.gcd(a, b)


def mod_exp(x: int, k: int, n: int) -> int:
    """x**k mod n by square-and-multiply (O(log k) multiplications)."""
    if n < 2:
        raise DomainError(f"modulus must be >= 2, got {n}")
    if k < 0:
        raise DomainError(f"exponent must be >= 0, got {k}")
    return pow(x, k, n)


def multiplicative_order(x: int, n: int) -> int:
    """Smallest r > 0 with x**r == 1 (mod n).

    Requires gcd(x, n) == 1; scans orders directly, which is fine for
    n <= 2**10.
    """
    if n < 2:
        raise DomainError(f"modulus must be >= 2, got {n}")
    if math.gcd(x, n) != 1:
        raise DomainError(f"{x} and {n} are not coprime; order undefined")
    y = x % n
    r = 1
    while y != 1:
        y = (y * x) % n
        r += 1
        if r > n:
            raise RuntimeError("order scan exceeded modulus; unreachable for coprime x")
    return r


@dataclass(frozen=True)
class ModInstance:
    """A factoring problem instance: f(k) = x**k mod N with known period r.

    L is the register bit length used by the circuits; the usual
    convention is L = ceil(log2(N)), but the simulated instances fix L
    from the published qubit counts, so only N <= 2**L is enforced and
    an undersized N just warns.
    """

    N: int
    x: int
    L: int
    r: int

    def __post_init__(self):
        if self.N <= 2:
            raise DomainError(f"N must be a composite > 2, got {self.N}")
        if not 1 < self.x < self.N:
            raise DomainError(f"base x must satisfy 1 < x < N, got x={self.x}")
        if math.gcd(self.N, self.x) != 1:
            raise DomainError(f"gcd(N, x) must be 1, got gcd({self.N}, {self.x})")
        if self.N > 2 ** self.L:
            raise DomainError(f"N={self.N} does not fit in L={self.L} bits")
        if self.N <= 2 ** (self.L - 1):
            warnings.warn(
                f"N={self.N} needs fewer than L={self.L} bits; keeping the stated L",
                stacklevel=2,
            )
        r = multiplicative_order(self.x, self.N)
        if r != self.r:
            raise DomainError(f"stated period r={self.r} is wrong; order of {self.x} mod {self.N} is {r}")

    @classmethod
    def from_base(cls, N: int, x: int, L: int | None = None) -> "ModInstance":
        """Build an instance, deriving L = ceil(log2(N)) and r when unstated."""
        if L is None:
            L = max((N - 1).bit_length(), 2)
        return cls(N=N, x=x, L=L, r=multiplicative_order(x, N))


# Problem instances simulated in the stability study: all have period 6
# and qubit counts 2L+4 = 14, 16, 18, 20.
TABLE2_INSTANCES = {
    5: ModInstance(N=27, x=8, L=5, r=6),
    6: ModInstance(N=63, x=31, L=6, r=6),
    7: ModInstance(N=77, x=10, L=7, r=6),
    8: ModInstance(N=247, x=27, L=8, r=6),
}


@dataclass(frozen=True)
class FactorPair:
    """A nontrivial factorisation N = N1 * N2."""

    N1: int
    N2: int

    def __post_init__(self):
        if self.N1 <= 1 or self.N2 <= 1:
            raise DomainError(f"factors must be nontrivial, got {self.N1} x {self.N2}")


def convergent_denominators(j: int, denom: int) -> list[int]:
    """Denominators of the continued-fraction convergents of j / denom.

    Returned in increasing order, starting with 1.  Exact integer
    arithmetic throughout.
    """
    if not 0 <= j < denom:
        raise DomainError(f"need 0 <= j < {denom}, got {j}")
    dens = []
    a, b = j, denom
    q_prev, q = 1, 0
    while b:
        digit = a // b
        a, b = b, a - digit * b
        q_prev, q = q, digit * q + q_prev
        dens.append(q)
    return dens


def extract_period(j: int, L: int, N: int) -> int | None:
    """Candidate period from a measured value j of the 2L-bit register.

    Expands j / 2**(2L) in continued fractions and returns the smallest
    convergent denominator in (1, N].  The caller must verify the
    candidate (x**d mod N == 1), since neighbouring integer peaks can
    produce spurious denominators.  Returns None for j = 0 or when no
    convergent denominator lands in range.
    """
    if j == 0:
        return None
    for d in convergent_denominators(j, 1 << (2 * L)):
        if 1 < d <= N:
            return d
    return None


def period_from_measurement(j: int, L: int, N: int, x: int) -> int | None:
    """Full period recovery from one measured j, with verification.

    Tries every convergent denominator d of j / 2**(2L) and its
    multiples m = k*d <= N.  A candidate m is accepted only if
    x**m == 1 (mod N) *and* m explains the measurement, i.e. j lies
    within rounding distance of a multiple of 2**(2L)/m (equivalently
    j*m mod 2**(2L) is within m of 0).  The accepted multiple is then
    reduced to the exact order.  Returns None if nothing verifies,
    which is the expected outcome for a useless j.
    """
    if j == 0:
        return None
    M = 1 << (2 * L)
    candidates = set()
    for d in convergent_denominators(j, M):
        if d <= 1:
            continue
        m = d
        while m <= N:
            candidates.add(m)
            m += d
    for m in sorted(candidates):
        rem = (j * m) % M
        if min(rem, M - rem) > m:
            continue
        if pow(x, m, N) != 1:
            continue
        # m is a multiple of the order; reduce to the smallest divisor.
        for d in sorted(_divisors(m)):
            if pow(x, d, N) == 1:
                return d
    return None


def _divisors(m: int) -> list[int]:
    divs = []
    i = 1
    while i * i <= m:
        if m % i == 0:
            divs.append(i)
            divs.append(m // i)
        i += 1
    return divs


def recover_factors(instance: ModInstance) -> FactorPair | None:
    """Factors of N from the period, when the standard rule applies.

    If r is even and f(r/2) != N-1, then gcd(f(r/2) -+ 1, N) is a
    nontrivial factor pair.  Returns None otherwise (odd period, or the
    trivial square root -1), in which case a fresh base is needed.
    """
    N, r = instance.N, instance.r
    if r % 2 != 0:
        return None
    half = pow(instance.x, r // 2, N)
    if half == N - 1:
        return None
    n1 = math.gcd(half - 1, N)
    n2 = math.gcd(half + 1, N)
    if n1 == 1 or n1 == N or n2 == 1 or n2 == N:
        return None
    assert n1 * n2 == N, f"factor pair {n1} x {n2} does not multiply to {N}"
    return FactorPair(N1=n1, N2=n2)
