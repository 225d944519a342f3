"""Dimensions of weight-2 cusp form spaces, newform counts, and eta-product
q-expansions used as an exact integer oracle.

dim S_2(N) is the genus of the modular curve X_0(N), computed from the
standard index / elliptic-point / cusp counts.  The newform dimension nu_N
follows by inverting the old/new decomposition

    g(N) = sum over m | N of nu_m * d(N/m)      (nu_1 = 0),

and the conductor weight that multiplies n/2 in the Li-coefficient formula
is  nu_N ln N + sum_{1 < m < N, m | N} nu_m d(N/m) ln m.

For eight genus-one levels the unique normalized newform is a product of
four Dedekind eta functions, so its q-expansion is an exact integer series
obtainable by multiplying pentagonal-number expansions.  That series is the
independent oracle against which the trace engine is checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .arith import divisor_count, divisors, euler_phi, factorize, psi_index
from .errors import DomainError, InternalInconsistencyError

# eta exponents: level -> tuple of (argument multiplier d, exponent r) with
# sum d*r = 24, giving weight-2 newforms with integer expansions and a_1 = 1.
ETA_NEWFORMS: dict[int, tuple[tuple[int, int], ...]] = {
    11: ((1, 2), (11, 2)),
    14: ((1, 1), (2, 1), (7, 1), (14, 1)),
    15: ((1, 1), (3, 1), (5, 1), (15, 1)),
    20: ((2, 2), (10, 2)),
    24: ((2, 1), (4, 1), (6, 1), (12, 1)),
    27: ((3, 2), (9, 2)),
    32: ((4, 2), (8, 2)),
    36: ((6, 4),),
}

ETA_LEVELS = tuple(sorted(ETA_NEWFORMS))


def _kronecker_minus4(p: int) -> int:
    if p == 2:
        return 0
    return 1 if p % 4 == 1 else -1


def _kronecker_minus3(p: int) -> int:
    if p == 3:
        return 0
    return 1 if p % 3 == 1 else -1


def elliptic_point_counts(n: int) -> tuple[int, int]:
    """(nu2, nu3): numbers of elliptic points of order 2 and 3 on X_0(N)."""
    factors = factorize(n)
    if n % 4 == 0:
        nu2 = 0
    else:
        nu2 = 1
        for p, _ in factors:
            nu2 *= 1 + _kronecker_minus4(p)
    if n % 9 == 0:
        nu3 = 0
    else:
        nu3 = 1
        for p, _ in factors:
            nu3 *= 1 + _kronecker_minus3(p)
    return nu2, nu3


def cusp_count(n: int) -> int:
    return sum(euler_phi(math.gcd(d, n // d)) for d in divisors(n))


@lru_cache(maxsize=None)
def dim_S2(n: int) -> int:
    """Dimension of the weight-2 cuspform space = genus of X_0(N)."""
    if n < 1:
        raise DomainError(f"level must be >= 1, got {n}")
    nu2, nu3 = elliptic_point_counts(n)
    g = (
        1
        + Fraction(psi_index(n), 12)
        - Fraction(nu2, 4)
        - Fraction(nu3, 3)
        - Fraction(cusp_count(n), 2)
    )
    if g.denominator != 1 or g < 0:
        raise InternalInconsistencyError(f"genus formula gave {g} at level {n}")
    return int(g)


@lru_cache(maxsize=None)
def newform_dim(n: int) -> int:
    """Dimension nu_N of the new subspace, by recursion over divisor levels."""
    if n < 1:
        raise DomainError(f"level must be >= 1, got {n}")
    if n == 1:
        return 0
    nu = dim_S2(n)
    for m in divisors(n):
        if 1 < m < n:
            nu -= newform_dim(m) * divisor_count(n // m)
    if nu < 0:
        raise InternalInconsistencyError(
            f"newform dimension {nu} < 0 at level {n}"
        )
    return nu


def conductor_log_term(n: int) -> float:
    """ln of the product of conductors over a Hecke eigenbasis of S_2(N).

    Exact integer exponents are accumulated per base before taking one log
    per base: nu_N ln N + sum_{1<m<N, m|N} nu_m d(N/m) ln m.
    """
    if n < 1:
        raise DomainError(f"level must be >= 1, got {n}")
    acc = 0.0
    if n > 1 and newform_dim(n):
        acc += newform_dim(n) * math.log(n)
    for m in divisors(n):
        if 1 < m < n:
            e = newform_dim(m) * divisor_count(n // m)
            if e:
                acc += e * math.log(m)
    return acc


@dataclass(frozen=True)
class LevelData:
    N: int
    g: int
    nu: int


def level_data(n: int) -> LevelData:
    return LevelData(n, dim_S2(n), newform_dim(n))


@dataclass(frozen=True)
class QExpansion:
    """Integer q-expansion a_1..a_M of a cusp form; coeffs[k] is a_{k+1}."""

    level: int
    coeffs: tuple[int, ...]

    @property
    def M(self) -> int:
        return len(self.coeffs)

    def a(self, n: int) -> int:
        if not 1 <= n <= self.M:
            raise DomainError(f"coefficient a_{n} beyond truncation {self.M}")
        return self.coeffs[n - 1]


def _euler_factor_pentagonal(step: int, m: int) -> list[tuple[int, int]]:
    """Sparse expansion of prod_{k>=1} (1 - q^(step*k)) up to degree m.

    Pentagonal number theorem: sum over j in Z of (-1)^j q^(step*j(3j-1)/2).
    Returns (exponent, sign) pairs.
    """
    terms = [(0, 1)]
    j = 1
    while True:
        e1 = step * j * (3 * j - 1) // 2
        e2 = step * j * (3 * j + 1) // 2
        if e1 > m and e2 > m:
            break
        sign = -1 if j % 2 else 1
        if e1 <= m:
            terms.append((e1, sign))
        if e2 <= m:
            terms.append((e2, sign))
        j += 1
    return terms


def eta_product_qexp(level: int, m: int) -> QExpansion:
    """q-expansion a_1..a_M of the eta-product newform at a supported level.

    Exact integer convolution; each eta factor is applied as a sparse
    pentagonal-series multiplication.  Coefficients fit comfortably in
    int64 for any practical truncation (they grow like d(n) sqrt(n)).
    """
    if level not in ETA_NEWFORMS:
        raise DomainError(
            f"level {level} not in eta-product table {sorted(ETA_NEWFORMS)}"
        )
    if m < 1:
        raise DomainError(f"truncation must be >= 1, got {m}")
    # Work with the weight: product of Euler functions gives coefficients of
    # q^-1 * f, i.e. series[k] multiplies q^k in f/q; a_n = series[n-1].
    series = np.zeros(m, dtype=np.int64)
    series[0] = 1
    for step, r in ETA_NEWFORMS[level]:
        for _ in range(r):
            nxt = np.zeros(m, dtype=np.int64)
            for e, sign in _euler_factor_pentagonal(step, m - 1):
                if sign == 1:
                    nxt[e:] += series[: m - e]
                else:
                    nxt[e:] -= series[: m - e]
            series = nxt
    peak = int(np.abs(series).max())
    if peak > 2**56:
        raise InternalInconsistencyError(
            f"eta expansion coefficients near int64 range (max {peak})"
        )
    return QExpansion(level, tuple(int(c) for c in series))


def b_from_eigen(qexp: QExpansion, p: int, k: int) -> int:
    """Power-sum coefficient b(p^k) for the newform behind qexp.

    Good primes (p not dividing the level) follow the three-term recursion
    b(p^(k+1)) = a_p b(p^k) - p b(p^(k-1)) with b(1) = 2; primes dividing
    the level give b(p^k) = a_p^k with b(1) = 1.
    """
    if k < 0:
        raise DomainError(f"exponent must be >= 0, got {k}")
    a_p = qexp.a(p)
    if qexp.level % p == 0:
        return a_p**k if k else 1
    if k == 0:
        return 2
    prev, cur = 2, a_p
    for _ in range(k - 1):
        prev, cur = cur, a_p * cur - p * prev
    return cur


def export_qexpansion_csv(qexp: QExpansion, path: str) -> None:
    """Write `n,a_n` rows for external comparison."""
    with open(path, "w") as fh:
        fh.write("n,a_n\n")
        for i, c in enumerate(qexp.coeffs, start=1):
            fh.write(f"{i},{c}\n")
