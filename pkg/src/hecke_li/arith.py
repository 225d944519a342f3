"""Exact integer utilities: sieves, factorization, multiplicative functions, CRT.

Everything here is exact.  Floating point enters only through the logarithm
attached to the von Mangoldt function, and the exact prime-power pair (p, k)
is returned alongside it so callers can evaluate ln p once per prime.
Rational bookkeeping elsewhere in the package uses fractions.Fraction.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Optional

import numpy as np

from .errors import DomainError, ResourceLimitError

# The smallest-prime-factor table costs 4 bytes per entry, so 10**8 keeps
# peak memory near 400 MB.  Sieving to 10**7 (the documented requirement)
# takes well under a second.
SIEVE_LIMIT = 10**8


class PrimeSieve:
    """Primes up to ``limit`` plus a smallest-prime-factor table.

    The spf table gives O(log n) factorization for 2 <= n <= limit.
    Instances are immutable after construction and safe to share across
    threads or forked workers.
    """

    def __init__(self, limit: int):
        if limit < 2:
            raise DomainError(f"sieve limit must be >= 2, got {limit}")
        if limit > SIEVE_LIMIT:
            raise ResourceLimitError(
                f"sieve limit {limit} exceeds supported bound {SIEVE_LIMIT}"
            )
        self.limit = limit
        spf = np.zeros(limit + 1, dtype=np.uint32)
        for i in range(2, math.isqrt(limit) + 1):
            if spf[i] == 0:
                block = spf[i * i :: i]
                block[block == 0] = i
        untouched = np.nonzero(spf == 0)[0]
        spf[untouched] = untouched  # 0, 1 and every prime map to themselves
        spf.flags.writeable = False
        self.spf = spf
        self._primes = untouched[untouched >= 2]
        self._primes.flags.writeable = False

    @property
    def primes(self) -> np.ndarray:
        """Ascending array of all primes <= limit."""
        return self._primes

    def is_prime(self, n: int) -> bool:
        if n < 2 or n > self.limit:
            if n > self.limit:
                raise DomainError(f"{n} beyond sieve limit {self.limit}")
            return False
        return int(self.spf[n]) == n

    def factorize(self, n: int) -> list[tuple[int, int]]:
        """Ordered prime factorization [(p1, e1), (p2, e2), ...] of n >= 1."""
        if n < 1:
            raise DomainError(f"cannot factor {n}")
        if n > self.limit:
            raise DomainError(f"{n} beyond sieve limit {self.limit}")
        out = []
        spf = self.spf
        while n > 1:
            p = int(spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        return out


_shared_sieve: Optional[PrimeSieve] = None


def get_sieve(limit: int) -> PrimeSieve:
    """Shared sieve, grown geometrically so repeated callers reuse one table."""
    global _shared_sieve
    if _shared_sieve is None or _shared_sieve.limit < limit:
        target = max(limit, 1 << 16)
        if _shared_sieve is not None:
            target = max(target, min(2 * _shared_sieve.limit, SIEVE_LIMIT))
        _shared_sieve = PrimeSieve(target)
    return _shared_sieve


def sieve_primes(x: int) -> tuple[list[int], np.ndarray]:
    """All primes <= x together with the smallest-prime-factor table."""
    sieve = PrimeSieve(x)
    return [int(p) for p in sieve.primes], sieve.spf


def factorize(n: int) -> list[tuple[int, int]]:
    """Factor n >= 1 by trial division against sieved primes.

    Works for any n with smallest prime factor <= sqrt(SIEVE_LIMIT); the
    shared sieve is grown to sqrt(n) on demand.
    """
    if n < 1:
        raise DomainError(f"cannot factor {n}")
    if n == 1:
        return []
    sieve = get_sieve(max(2, math.isqrt(n)))
    out = []
    for p in sieve.primes:
        p = int(p)
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
    if n > 1:
        out.append((n, 1))
    return out


def unfactor(factors: list[tuple[int, int]]) -> int:
    n = 1
    for p, e in factors:
        n *= p**e
    return n


class VonMangoldt(NamedTuple):
    is_prime_power: bool
    p: Optional[int]
    k: int
    log_value: float


def von_mangoldt(m: int) -> VonMangoldt:
    """Prime-power structure of m: (True, p, k, ln p) when m = p**k, else zero.

    The exact (p, k) pair is returned so summation loops can compute ln p
    once per prime instead of once per term.
    """
    if m < 1:
        raise DomainError(f"von Mangoldt argument must be >= 1, got {m}")
    if m == 1:
        return VonMangoldt(False, None, 0, 0.0)
    factors = factorize(m)
    if len(factors) != 1:
        return VonMangoldt(False, None, 0, 0.0)
    p, k = factors[0]
    return VonMangoldt(True, p, k, math.log(p))


def psi_index(n: int) -> int:
    """Multiplicative index function n * prod_{p | n} (1 + 1/p), exactly."""
    if n < 1:
        raise DomainError(f"psi argument must be >= 1, got {n}")
    out = n
    for p, _ in factorize(n):
        out = out // p * (p + 1)
    return out


def euler_phi(n: int) -> int:
    if n < 1:
        raise DomainError(f"phi argument must be >= 1, got {n}")
    out = n
    for p, _ in factorize(n):
        out = out // p * (p - 1)
    return out


def divisor_count(n: int) -> int:
    if n < 1:
        raise DomainError(f"divisor count argument must be >= 1, got {n}")
    out = 1
    for _, e in factorize(n):
        out *= e + 1
    return out


def divisors(n: int) -> list[int]:
    """Ascending list of positive divisors of n."""
    if n < 1:
        raise DomainError(f"divisors argument must be >= 1, got {n}")
    out = [1]
    for p, e in factorize(n):
        out = [d * p**j for d in out for j in range(e + 1)]
    return sorted(out)


def gcd(a: int, b: int) -> int:
    return math.gcd(a, b)


def is_perfect_square(n: int) -> bool:
    """Exact square test via integer square root; valid for arbitrary size."""
    if n < 0:
        return False
    r = math.isqrt(n)
    return r * r == n


def crt_solve(
    r1: int, m1: int, r2: int, m2: int
) -> Optional[tuple[int, int]]:
    """Solve x = r1 (mod m1), x = r2 (mod m2).

    Returns (x, lcm(m1, m2)) with 0 <= x < lcm, or None when the system is
    inconsistent (gcd(m1, m2) does not divide r1 - r2).
    """
    if m1 < 1 or m2 < 1:
        raise DomainError("moduli must be positive")
    g = math.gcd(m1, m2)
    if (r1 - r2) % g != 0:
        return None
    l = m1 // g * m2
    # x = r1 + m1 * t with t = (r2 - r1)/g * inv(m1/g) mod m2/g
    m2g = m2 // g
    t = ((r2 - r1) // g * pow(m1 // g, -1, m2g)) % m2g if m2g > 1 else 0
    return ((r1 + m1 * t) % l, l)
