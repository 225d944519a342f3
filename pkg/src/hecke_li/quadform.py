"""Class numbers h(D) and unit counts w(D) of imaginary quadratic orders.

h(D) counts reduced primitive positive-definite binary quadratic forms
(a, b, c) of discriminant D = b^2 - 4ac < 0: |b| <= a <= c, gcd(a,b,c) = 1,
with b >= 0 whenever |b| = a or a = c.  This is the class number of the
quadratic ORDER of discriminant D, not of the field obtained from its
fundamental part; the two differ at non-fundamental D (e.g. h(-12) = 1
while the field Q(sqrt(-3)) has class number 1 for the maximal order of
discriminant -3).  The trace-formula consumers in this package need the
order reading; the batch/enumeration agreement tests and the degenerate
level checks downstream pin it.

w(D) is 6 at D = -3, 4 at D = -4, and 2 otherwise.

Two computation paths: per-discriminant enumeration (class_data) and a
vectorized all-discriminants sweep (batch_class_data / ClassNumberTable)
that counts all reduced forms with slice adds and removes imprimitive ones
by Mobius inversion over square divisors.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .arith import divisors, factorize
from .errors import DomainError, ResourceLimitError

# A batch table of bound B stores two int32/int8 arrays of length B+1;
# 4*10**6 (the documented requirement, enough for trace sums to n = 10**6)
# costs ~20 MB.  The default cap refuses clearly unintended requests.
MAX_BATCH_BOUND = 64 * 10**6

CACHE_ENV_VAR = "HECKE_LI_CACHE"
CACHE_FILENAME = "classnum.csv"


def _validate_discriminant(d: int) -> None:
    if d >= 0:
        raise DomainError(f"discriminant must be negative, got {d}")
    if d % 4 not in (0, 1):
        raise DomainError(f"{d} is not = 0, 1 (mod 4)")


def unit_count(d: int) -> int:
    _validate_discriminant(d)
    if d == -3:
        return 6
    if d == -4:
        return 4
    return 2


@dataclass(frozen=True)
class ClassNumberEntry:
    D: int
    h: int
    w: int


def reduced_forms(d: int) -> list[tuple[int, int, int]]:
    """All reduced primitive forms (a, b, c) of discriminant d < 0."""
    _validate_discriminant(d)
    absd = -d
    forms = []
    b = absd & 1
    while 3 * b * b <= absd:
        q = (b * b + absd) // 4
        for a in divisors(q):
            if a * a > q:
                break
            if a < b or a < 1:
                continue
            c = q // a
            if math.gcd(math.gcd(a, b), c) != 1:
                continue
            forms.append((a, b, c))
            if b != 0 and b != a and a != c:
                forms.append((a, -b, c))
        b += 2
    return sorted(forms)


def class_data(d: int) -> ClassNumberEntry:
    """Class number and unit count of the order of discriminant d < 0."""
    return ClassNumberEntry(d, len(reduced_forms(d)), unit_count(d))


def square_divisor_decompositions(delta: int) -> list[tuple[int, int]]:
    """All (m, f) with m >= 1, m^2 | delta and f = delta/m^2 = 0,1 (mod 4).

    Ascending in m.  delta must be negative; f is then a valid discriminant.
    """
    if delta >= 0:
        raise DomainError(f"expected a negative integer, got {delta}")
    square_root_part = 1
    for p, e in factorize(-delta):
        square_root_part *= p ** (e // 2)
    out = []
    for m in divisors(square_root_part):
        f = delta // (m * m)
        if f % 4 in (0, 1):
            out.append((m, f))
    return out


def _mobius_upto(n: int) -> np.ndarray:
    mu = np.ones(n + 1, dtype=np.int64)
    if n >= 1:
        mu[0] = 0
    prime = np.ones(n + 1, dtype=bool)
    if n >= 1:
        prime[:2] = False
    for p in range(2, n + 1):
        if prime[p]:
            if 2 * p <= n:
                prime[2 * p :: p] = False
            mu[p::p] *= -1
            sq = p * p
            if sq <= n:
                mu[sq::sq] = 0
    return mu


class ClassNumberTable:
    """h(D) for every valid discriminant with |D| <= bound, as flat arrays.

    Indexing is by |D|.  Built by one vectorized sweep over (a, b) pairs:
    each reduced form family contributes an arithmetic progression of
    discriminants, added with numpy slice updates; imprimitive forms are
    then removed by Mobius inversion over square divisors.
    """

    def __init__(self, bound: int):
        if bound < 3:
            raise DomainError(f"bound must be >= 3, got {bound}")
        if bound > MAX_BATCH_BOUND:
            raise ResourceLimitError(
                f"batch bound {bound} exceeds cap {MAX_BATCH_BOUND}"
            )
        self.bound = bound
        self.h = _batch_class_numbers(bound)

    def h_of(self, d: int) -> int:
        _validate_discriminant(d)
        if -d > self.bound:
            raise ResourceLimitError(
                f"|D| = {-d} beyond table bound {self.bound}"
            )
        return int(self.h[-d])

    def w_of(self, d: int) -> int:
        return unit_count(d)

    def entry(self, d: int) -> ClassNumberEntry:
        return ClassNumberEntry(d, self.h_of(d), unit_count(d))

    def __iter__(self) -> Iterator[ClassNumberEntry]:
        """Entries in D-descending order, -3 first."""
        for absd in range(3, self.bound + 1):
            if (-absd) % 4 in (0, 1):
                yield ClassNumberEntry(-absd, int(self.h[absd]), unit_count(-absd))

    def __len__(self) -> int:
        # valid |D| are the integers = 0 or 3 (mod 4) in [3, bound]
        count_3 = (self.bound - 3) // 4 + 1 if self.bound >= 3 else 0
        count_0 = self.bound // 4
        return count_3 + count_0


def _batch_class_numbers(bound: int) -> np.ndarray:
    # Count ALL reduced forms (primitive or not) per |D| with slice adds.
    total = np.zeros(bound + 1, dtype=np.int32)
    a_max = math.isqrt(bound // 3)
    for a in range(1, a_max + 1):
        four_a = 4 * a
        for b in range(0, a + 1):
            first = four_a * a - b * b  # c = a
            if first > bound:
                continue  # first shrinks as b grows, later b may still fit
            # c = a exactly: one form each (b >= 0 forced when a = c)
            total[first] += 1
            # c > a: start at c = a + 1
            start = first + four_a
            if start <= bound:
                weight = 2 if 0 < b < a else 1
                total[start :: four_a] += weight
    # Mobius inversion removes forms that are u times a primitive form.
    prim = total.astype(np.int64)
    u_max = math.isqrt(bound // 3)
    mu = _mobius_upto(u_max) if u_max >= 1 else np.array([0])
    for u in range(2, u_max + 1):
        m = int(mu[u])
        if m == 0:
            continue
        usq = u * u
        top = bound // usq
        prim[usq * 1 :: usq] += m * total[1 : top + 1]
    # mask invalid residues (|D| = 1, 2 mod 4) defensively; they receive no
    # form counts anyway because b^2 + |D| = 0 (mod 4) never holds there.
    return prim


def batch_class_data(
    d_min: int, cache_dir: str | None = None, write: bool = False
) -> ClassNumberTable:
    """Table of class data for all valid D in [d_min, -3], inclusive.

    With write=True the table is also persisted as `classnum.csv` under
    cache_dir (or $HECKE_LI_CACHE, or ./.hecke_li_cache).
    """
    if d_min >= 0:
        raise DomainError(f"d_min must be negative, got {d_min}")
    table = ClassNumberTable(-d_min)
    if write:
        write_cache(table, cache_dir)
    return table


def cache_path(cache_dir: str | None = None) -> str:
    base = cache_dir or os.environ.get(CACHE_ENV_VAR) or ".hecke_li_cache"
    return os.path.join(base, CACHE_FILENAME)


def write_cache(table: ClassNumberTable, cache_dir: str | None = None) -> str:
    """Write the table as CSV `D,h,w`, D descending from -3.  Returns path."""
    path = cache_path(cache_dir)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    tmp = path + ".tmp"
    with open(tmp, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["D", "h", "w"])
        for entry in table:
            writer.writerow([entry.D, entry.h, entry.w])
    os.replace(tmp, path)
    return path


def read_cache(cache_dir: str | None = None) -> list[ClassNumberEntry]:
    path = cache_path(cache_dir)
    out = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["D", "h", "w"]:
            raise DomainError(f"unexpected cache header {header!r} in {path}")
        for row in reader:
            out.append(ClassNumberEntry(int(row[0]), int(row[1]), int(row[2])))
    return out
