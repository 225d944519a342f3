"""Trace of Hecke operators on weight-2 cusp form spaces (Eichler-Selberg).

tr T(n) on S_2(N) is assembled from four exact terms,

    identity:    psi(N)/12 when n is a square and gcd(sqrt(n), N) = 1
    divisor:     sum of d over 0 < d | n with gcd(N, n/d) = 1
    elliptic:    sum over t with t^2 < 4n and m with m^2 | t^2 - 4n,
                 (t^2-4n)/m^2 = 0,1 (mod 4), of h(f)/w(f) * mu(t, n, m)
    hyperbolic:  (1/2) sum over d | n and c | N with gcd(c, N/c)
                 dividing gcd(N, n/d - d), of
                 phi(gcd(c, N/c)) * chi0(y) * min(d, n/d)

and equals identity + divisor - elliptic - hyperbolic.  chi0 is the
principal character mod N; y is determined mod N/gcd(c, N/c) by
y = d (mod c), y = n/d (mod N/c), and chi0(y) is evaluated prime by prime
over p | N (y is only defined modulo N/gcd(c, N/c), but divisibility by
each p | N is already pinned by the two congruences).  When n/d = d the
divisibility condition reads gcd(N, 0) = N and every c | N participates.

All accumulation is exact, over the common denominator 12; a non-integral
total raises InternalInconsistencyError, which is the single strongest
internal check of the conventions and of the class-number tables.

The residue count mu(t, n, m) is ambiguous as usually printed when
gcd(N, m) > 1.  Both readings are implemented:

    convention A: solutions of x^2 - tx + n = 0 (mod N*gcd(N, m)),
                  counted in the full ring Z/(N*gcd(N, m)), chi0-filtered;
    convention B: residues x mod N admitting a lift to such a solution.

They coincide when gcd(N, m) = 1.  The degenerate-level suite selects B
(convention A already fails trace(4, 7) = 0); B is the default everywhere.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from multiprocessing import Pool
from typing import Callable, Iterable, Optional

import numpy as np

from .arith import divisors, euler_phi, factorize, get_sieve, psi_index
from .errors import (
    DomainError,
    InternalInconsistencyError,
    ResourceLimitError,
)
from .quadform import ClassNumberTable, class_data

CONVENTIONS = ("A", "B")
DEFAULT_CONVENTION = "B"

# class-number tables are grown on demand up to this bound (|discriminant|);
# larger ad hoc queries fall back to per-discriminant enumeration.
AUTO_CLASS_BOUND = 4 * 10**6


@dataclass(frozen=True)
class TraceTerms:
    """Term breakdown of one trace; elliptic and hyperbolic are stored as
    the positive quantities that get subtracted."""

    identity: Fraction
    divisor: Fraction
    elliptic: Fraction
    hyperbolic: Fraction
    total: int

    def as_fraction_sum(self) -> Fraction:
        return self.identity + self.divisor - self.elliptic - self.hyperbolic


@dataclass(frozen=True)
class BValue:
    N: int
    p: int
    k: int
    value: int


_class_table: Optional[ClassNumberTable] = None


def _ensure_class_table(bound: int) -> Optional[ClassNumberTable]:
    """Shared class-number table covering |D| <= bound, or None when the
    request exceeds the auto-growth cap (callers then enumerate per D)."""
    global _class_table
    if bound > AUTO_CLASS_BOUND:
        return _class_table if _class_table and _class_table.bound >= bound else None
    if _class_table is None or _class_table.bound < bound:
        target = max(bound, 1 << 12)
        if _class_table is not None:
            target = max(target, min(2 * _class_table.bound, AUTO_CLASS_BOUND))
        _class_table = ClassNumberTable(target)
    return _class_table


class TraceCalculator:
    """Trace-formula engine for one level N and one mu-counting convention.

    Pure given the shared class-number table; per-level residue tables are
    built once and reused, so batch runs over many n at one level are cheap.
    """

    def __init__(self, N: int, convention: str = DEFAULT_CONVENTION):
        if N < 1:
            raise DomainError(f"level must be >= 1, got {N}")
        if convention not in CONVENTIONS:
            raise DomainError(f"unknown mu convention {convention!r}")
        self.N = N
        self.convention = convention
        self.psi = psi_index(N)
        self.prime_divs = [p for p, _ in factorize(N)]
        self._c_data = []
        for c in divisors(N):
            delta = math.gcd(c, N // c)
            in_c = [p for p in self.prime_divs if c % p == 0]
            rest = [p for p in self.prime_divs if c % p != 0]
            self._c_data.append((c, delta, euler_phi(delta), in_c, rest))
        self._sol_table: Optional[np.ndarray] = None
        self._lift_memo: dict = {}
        self._psi_ratio_memo = {1: 1}
        self._trace_memo: dict[int, TraceTerms] = {}
        self._g: Optional[int] = None

    # -- residue counting -------------------------------------------------

    def _solution_counts(self) -> np.ndarray:
        """counts[t % N, n % N] = #{x mod N : x^2-tx+n = 0 (mod N), (x,N)=1}."""
        if self._sol_table is None:
            N = self.N
            x = np.arange(N, dtype=np.int64)
            coprime = np.fromiter(
                (math.gcd(i, N) == 1 for i in range(N)), bool, N
            )
            xs = x[coprime]
            counts = np.zeros((N, N), dtype=np.int64)
            for t in range(N):
                nres = (-(xs * xs - t * xs)) % N
                np.add.at(counts[t], nres, 1)
            counts.flags.writeable = False
            self._sol_table = counts
        return self._sol_table

    def _psi_ratio(self, g: int) -> int:
        """psi(N)/psi(N/gcd(N, m)) for g = gcd(N, m); always an integer."""
        r = self._psi_ratio_memo.get(g)
        if r is None:
            r = self.psi // psi_index(self.N // g)
            self._psi_ratio_memo[g] = r
        return r

    def _lift_counts(self, t: int, n: int, g: int) -> tuple[int, int]:
        """(convention A count, convention B count) of chi0-weighted
        solutions, for g = gcd(N, m) > 1.

        A lift x + jN of a base residue x with N | f(x) solves
        f = 0 (mod N g) iff g | f(x)/N + j(2x - t); the solvable j count
        is gcd(2x - t, g).
        """
        N = self.N
        ng = N * g
        key = (t % ng, n % ng, g)
        got = self._lift_memo.get(key)
        if got is not None:
            return got
        t_r, n_r = key[0], key[1]
        cnt_a = cnt_b = 0
        for x in range(N):
            if math.gcd(x, N) != 1:
                continue
            fx = (x * x - t_r * x + n_r) % ng
            if fx % N:
                continue
            gg = math.gcd(2 * x - t_r, g)
            if (fx // N) % gg == 0:
                cnt_b += 1
                cnt_a += gg
        self._lift_memo[key] = (cnt_a, cnt_b)
        return (cnt_a, cnt_b)

    def mu_count(self, t: int, n: int, m: int) -> Fraction:
        """mu(t, n, m) under this calculator's convention, as an exact
        rational (psi-ratio times the residue count; always integral)."""
        if m < 1:
            raise DomainError(f"m must be >= 1, got {m}")
        delta = t * t - 4 * n
        if delta >= 0 or delta % (m * m) != 0:
            raise DomainError(f"m^2 = {m*m} must divide t^2-4n = {delta} < 0")
        g = math.gcd(self.N, m)
        if g == 1:
            cnt = int(self._solution_counts()[t % self.N, n % self.N])
        else:
            a, b = self._lift_counts(t, n, g)
            cnt = a if self.convention == "A" else b
        return Fraction(self._psi_ratio(g) * cnt)

    # -- term assembly ----------------------------------------------------

    def _elliptic_numerator(self, n: int, prime_power: bool = False) -> int:
        """12 * (elliptic term).  prime_power=True is the gcd(n, N) = 1
        specialization where the chi0 filter is vacuous (any solution of
        x^2 - tx + n = 0 mod N is automatically coprime to N)."""
        N = self.N
        bound = 4 * n
        table = _ensure_class_table(bound)
        sieve = get_sieve(bound)
        spf = sieve.spf
        sols = self._solution_counts()
        conv_a = self.convention == "A"
        num12 = 0
        tmax = math.isqrt(bound - 1)
        for t in range(0, tmax + 1):
            mult = 1 if t == 0 else 2
            absd = 4 * n - t * t
            # factor |delta| via smallest prime factors, collect the
            # square part's divisors as candidate m
            rem = absd
            sq_primes = []
            while rem > 1:
                p = int(spf[rem])
                e = 0
                while rem % p == 0:
                    rem //= p
                    e += 1
                if e >= 2:
                    sq_primes.append((p, e // 2))
            ms = [1]
            for p, e in sq_primes:
                ms = [d * p**j for d in ms for j in range(e + 1)]
            tn = t % N
            nn = n % N
            for m in ms:
                f = -(absd // (m * m))
                if f % 4 not in (0, 1):
                    continue
                g = math.gcd(N, m)
                if g == 1:
                    cnt = int(sols[tn, nn])
                    ratio = 1
                else:
                    a, b = self._lift_counts(t, n, g)
                    cnt = a if conv_a else b
                    ratio = self._psi_ratio(g)
                if cnt == 0:
                    continue
                if f == -3:
                    w12h = 2
                elif f == -4:
                    w12h = 3
                elif table is not None:
                    w12h = 6 * table.h_of(f)
                else:
                    w12h = 6 * class_data(f).h
                num12 += mult * w12h * ratio * cnt
        return num12

    def _chi0_y(self, d: int, nd: int, in_c: list[int], rest: list[int]) -> bool:
        """chi0 of the CRT residue y = d (mod c), y = n/d (mod N/c),
        decided prime by prime: p | y iff (p | c and p | d) or
        (p | N/c and p | n/d)."""
        for p in in_c:
            if d % p == 0:
                return False
        for p in rest:
            if nd % p == 0:
                return False
        return True

    def _hyperbolic_double(self, n: int, prime_power: bool = False) -> int:
        """2 * (hyperbolic term), an exact integer."""
        N = self.N
        total = 0
        for d in divisors(n):
            nd = n // d
            diff = nd - d
            cap = N if diff == 0 else math.gcd(N, abs(diff))
            inner = 0
            for c, delta, phi_delta, in_c, rest in self._c_data:
                if cap % delta:
                    continue
                if prime_power or self._chi0_y(d, nd, in_c, rest):
                    inner += phi_delta
            total += min(d, nd) * inner
        return total

    def trace(self, n: int) -> TraceTerms:
        """Full four-term trace of T(n) on S_2(N).  Memoized per level."""
        if n < 1:
            raise DomainError(f"Hecke index must be >= 1, got {n}")
        got = self._trace_memo.get(n)
        if got is not None:
            return got
        N = self.N
        r = math.isqrt(n)
        id12 = self.psi if (r * r == n and math.gcd(r, N) == 1) else 0
        div = sum(d for d in divisors(n) if math.gcd(N, n // d) == 1)
        e12 = self._elliptic_numerator(n)
        h2 = self._hyperbolic_double(n)
        total12 = id12 + 12 * div - e12 - 6 * h2
        if total12 % 12:
            raise InternalInconsistencyError(
                f"non-integral trace at N={N}, n={n}: total = {total12}/12 "
                f"(convention {self.convention})"
            )
        out = TraceTerms(
            identity=Fraction(id12, 12),
            divisor=Fraction(div),
            elliptic=Fraction(e12, 12),
            hyperbolic=Fraction(h2, 2),
            total=total12 // 12,
        )
        self._trace_memo[n] = out
        return out

    def trace_prime_power(self, p: int, k: int) -> int:
        """tr T(p^k) via the gcd(p, N) = 1 specialization: the identity term
        is (1+(-1)^k)/24 * psi(N), the divisor term is (p^(k+1)-1)/(p-1),
        and both chi0 factors are identically 1."""
        if k < 1:
            raise DomainError(f"exponent must be >= 1, got {k}")
        if math.gcd(p, self.N) != 1:
            raise DomainError(f"prime {p} must not divide level {self.N}")
        n = p**k
        id12 = self.psi if k % 2 == 0 else 0
        div = (p ** (k + 1) - 1) // (p - 1)
        e12 = self._elliptic_numerator(n, prime_power=True)
        h2 = self._hyperbolic_double(n, prime_power=True)
        total12 = id12 + 12 * div - e12 - 6 * h2
        if total12 % 12:
            raise InternalInconsistencyError(
                f"non-integral prime-power trace at N={self.N}, "
                f"n={p}^{k}: total = {total12}/12"
            )
        return total12 // 12

    # -- derived values ----------------------------------------------------

    def genus(self) -> int:
        if self._g is None:
            self._g = self.trace(1).total
        return self._g

    def b_value(self, p: int, k: int) -> BValue:
        """Trace of the power-sum operator: 2g, tr T(p), or
        tr T(p^k) - p tr T(p^(k-2))."""
        if math.gcd(p, self.N) != 1:
            raise DomainError(f"prime {p} must not divide level {self.N}")
        if k < 0:
            raise DomainError(f"exponent must be >= 0, got {k}")
        if k == 0:
            value = 2 * self.genus()
        elif k == 1:
            value = self.trace(p).total
        else:
            value = self.trace(p**k).total - p * self.trace(p ** (k - 2)).total
        return BValue(self.N, p, k, value)


@lru_cache(maxsize=64)
def get_calculator(N: int, convention: str = DEFAULT_CONVENTION) -> TraceCalculator:
    return TraceCalculator(N, convention)


def trace_T(n_level: int, n: int, convention: str = DEFAULT_CONVENTION) -> TraceTerms:
    return get_calculator(n_level, convention).trace(n)


def trace_T_primepower(
    n_level: int, p: int, k: int, convention: str = DEFAULT_CONVENTION
) -> int:
    return get_calculator(n_level, convention).trace_prime_power(p, k)


def mu_count(
    t: int, n: int, m: int, n_level: int, convention: str = DEFAULT_CONVENTION
) -> Fraction:
    return get_calculator(n_level, convention).mu_count(t, n, m)


def B_value(
    n_level: int, p: int, k: int, convention: str = DEFAULT_CONVENTION
) -> BValue:
    return get_calculator(n_level, convention).b_value(p, k)


# -- prime-power trace tables (precompute, cache files, B provider) ---------


def prime_powers_below(x: int, coprime_to: int = 1) -> list[tuple[int, int, int]]:
    """Ascending [(m, p, k)] with m = p^k < x and gcd(p, coprime_to) = 1."""
    if x < 2:
        return []
    sieve = get_sieve(max(2, x - 1))
    out = []
    for p in sieve.primes:
        p = int(p)
        if p >= x:
            break
        if coprime_to % p == 0:
            continue
        m, k = p, 1
        while m < x:
            out.append((m, p, k))
            m *= p
            k += 1
    out.sort()
    return out


def compute_prime_power_traces(
    N: int,
    x: int,
    convention: str = DEFAULT_CONVENTION,
    jobs: int = 1,
    progress: Optional[Callable[[int, int], None]] = None,
) -> dict[int, int]:
    """Traces tr T(n) for n = 1 and every prime power n = p^k < x with
    gcd(p, N) = 1.  Deterministic for any job count (ordered reduction)."""
    pps = prime_powers_below(x, coprime_to=N)
    table = {1: get_calculator(N, convention).genus()}
    if jobs <= 1:
        calc = get_calculator(N, convention)
        _ensure_class_table(min(4 * x, AUTO_CLASS_BOUND))
        for i, (m, p, k) in enumerate(pps):
            table[m] = calc.trace_prime_power(p, k)
            if progress and (i + 1) % 512 == 0:
                progress(i + 1, len(pps))
        return table
    chunks = _split_chunks(pps, 8 * jobs)
    with Pool(jobs) as pool:
        results = pool.map(
            _trace_chunk_worker,
            [(N, convention, chunk) for chunk in chunks],
        )
    done = 0
    for rows in results:  # chunk order, not completion order
        table.update(rows)
        done += len(rows)
        if progress:
            progress(done, len(pps))
    return table


def _split_chunks(items: list, count: int) -> list[list]:
    if not items:
        return []
    count = max(1, min(count, len(items)))
    size = (len(items) + count - 1) // count
    return [items[i : i + size] for i in range(0, len(items), size)]


def _trace_chunk_worker(args) -> dict[int, int]:
    N, convention, chunk = args
    calc = get_calculator(N, convention)
    return {m: calc.trace_prime_power(p, k) for (m, p, k) in chunk}


def save_trace_table_csv(path: str, N: int, table: dict[int, int]) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    tmp = path + ".tmp"
    with open(tmp, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["N", "n", "trace"])
        for n in sorted(table):
            writer.writerow([N, n, table[n]])
    os.replace(tmp, path)


def load_trace_table_csv(path: str) -> tuple[int, dict[int, int]]:
    table: dict[int, int] = {}
    level = None
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["N", "n", "trace"]:
            raise DomainError(f"unexpected trace-table header {header!r}")
        for row in reader:
            level = int(row[0])
            table[int(row[1])] = int(row[2])
    if level is None:
        raise DomainError(f"empty trace table {path}")
    return level, table


def export_trace_table_json(path: str, N: int, table: dict[int, int]) -> None:
    payload = [{"N": N, "n": n, "trace": table[n]} for n in sorted(table)]
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=0)
        fh.write("\n")


class TraceBProvider:
    """B(p^k) source backed by a prime-power trace table.

    b(p, 0) = 2g, b(p, 1) = tr T(p), then tr T(p^k) - p tr T(p^(k-2)).
    Raises ResourceLimitError past the table horizon with the precompute
    hint, so callers learn the required cutoff instead of silently
    truncating.
    """

    def __init__(self, N: int, table: dict[int, int], cutoff: int):
        if 1 not in table:
            raise DomainError("trace table must contain n = 1 (the genus)")
        self.N = N
        self.table = table
        self.cutoff = cutoff
        self.genus = table[1]

    def __call__(self, p: int, k: int) -> int:
        if k == 0:
            return 2 * self.genus
        m = p**k
        if m >= self.cutoff or m not in self.table:
            raise ResourceLimitError(
                f"trace table for level {self.N} covers n < {self.cutoff}; "
                f"n = {m} requested.  Precompute with a larger cutoff "
                f"(e.g. `hecke-li precompute --level {self.N} --cutoff {2*m}`)."
            )
        if k == 1:
            return self.table[m]
        return self.table[m] - p * self.table[m // (p * p)]


def build_b_provider(
    N: int,
    x: int,
    convention: str = DEFAULT_CONVENTION,
    jobs: int = 1,
    progress: Optional[Callable[[int, int], None]] = None,
) -> TraceBProvider:
    table = compute_prime_power_traces(N, x, convention, jobs, progress)
    return TraceBProvider(N, table, x)


# -- chunked, resumable precompute to disk ----------------------------------


def trace_table_path(n_level: int, cache_dir: str | None = None) -> str:
    from .quadform import cache_path

    base = os.path.dirname(cache_path(cache_dir))
    return os.path.join(base, f"traces_N{n_level}.csv")


def _ledger_path(n_level: int, cache_dir: str | None) -> str:
    return trace_table_path(n_level, cache_dir) + ".ledger.json"


def precompute_traces(
    N: int,
    x: int,
    cache_dir: str | None = None,
    convention: str = DEFAULT_CONVENTION,
    jobs: int = 1,
    chunk_count: int = 16,
    progress: Optional[Callable[[str], None]] = None,
    max_chunks_this_run: Optional[int] = None,
) -> str:
    """Compute and persist the prime-power trace table for level N up to x.

    Chunked and resumable: each finished chunk is written as a part file and
    recorded in a ledger, so an interrupted run continues where it stopped.
    Re-running after completion is a no-op.  Returns the CSV path.
    """
    final = trace_table_path(N, cache_dir)
    ledger_file = _ledger_path(N, cache_dir)
    os.makedirs(os.path.dirname(final) or ".", exist_ok=True)

    ledger = None
    if os.path.exists(ledger_file):
        with open(ledger_file) as fh:
            ledger = json.load(fh)
        if (
            ledger.get("level") != N
            or ledger.get("cutoff") != x
            or ledger.get("convention") != convention
        ):
            ledger = None  # stale ledger for a different request
    if ledger and ledger.get("complete") and os.path.exists(final):
        if progress:
            progress(f"trace table {final} already complete")
        return final

    pps = prime_powers_below(x, coprime_to=N)
    chunks = _split_chunks(pps, chunk_count)
    if ledger is None:
        ledger = {
            "level": N,
            "cutoff": x,
            "convention": convention,
            "n_chunks": len(chunks),
            "done": [],
            "complete": False,
        }
    done = set(ledger["done"])
    pending = [i for i in range(len(chunks)) if i not in done]
    if max_chunks_this_run is not None:
        pending = pending[:max_chunks_this_run]

    def part_path(i: int) -> str:
        return final + f".part{i}"

    if jobs > 1 and len(pending) > 1:
        with Pool(jobs) as pool:
            for i, rows in zip(
                pending,
                pool.imap(
                    _trace_chunk_worker,
                    [(N, convention, chunks[i]) for i in pending],
                ),
            ):
                _write_part(part_path(i), N, rows)
                done.add(i)
                ledger["done"] = sorted(done)
                _write_json(ledger_file, ledger)
                if progress:
                    progress(f"chunk {i + 1}/{len(chunks)} done ({len(rows)} rows)")
    else:
        for i in pending:
            rows = _trace_chunk_worker((N, convention, chunks[i]))
            _write_part(part_path(i), N, rows)
            done.add(i)
            ledger["done"] = sorted(done)
            _write_json(ledger_file, ledger)
            if progress:
                progress(f"chunk {i + 1}/{len(chunks)} done ({len(rows)} rows)")

    if len(done) == len(chunks):
        table = {1: get_calculator(N, convention).genus()}
        for i in range(len(chunks)):
            _, rows = load_trace_table_csv(part_path(i))
            table.update(rows)
        save_trace_table_csv(final, N, table)
        for i in range(len(chunks)):
            os.remove(part_path(i))
        ledger["complete"] = True
        _write_json(ledger_file, ledger)
        if progress:
            progress(f"wrote {final} ({len(table)} rows)")
    return final


def _write_part(path: str, N: int, rows: dict[int, int]) -> None:
    save_trace_table_csv(path, N, rows)


def _write_json(path: str, payload) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(payload, fh)
    os.replace(tmp, path)


def load_or_build_b_provider(
    N: int,
    x: int,
    cache_dir: str | None = None,
    convention: str = DEFAULT_CONVENTION,
    jobs: int = 1,
    auto_build_limit: int = 2 * 10**5,
    progress: Optional[Callable[[str], None]] = None,
) -> TraceBProvider:
    """B provider from the on-disk trace cache, building it when absent.

    Auto-building is allowed up to auto_build_limit; beyond that a missing
    table raises ResourceLimitError telling the caller to run precompute.
    """
    path = trace_table_path(N, cache_dir)
    if os.path.exists(path):
        level, table = load_trace_table_csv(path)
        if level == N and max(table) * 2 >= x and _covers(table, N, x):
            return TraceBProvider(N, table, x)
    if x > auto_build_limit:
        raise ResourceLimitError(
            f"no precomputed trace table for level {N} covering cutoff {x}; "
            f"run `hecke-li precompute --level {N} --cutoff {x}` first"
        )
    precompute_traces(N, x, cache_dir, convention, jobs, progress=progress)
    _, table = load_trace_table_csv(path)
    return TraceBProvider(N, table, x)


def _covers(table: dict[int, int], N: int, x: int) -> bool:
    return all(m in table for (m, _, _) in prime_powers_below(x, coprime_to=N))
