"""Arithmetic-side Li coefficients for weight-2 Hecke L-products.

For the full level-N product the coefficient with index n is assembled as

    tau_N(n) = (n/2) * (conductor log term)
               - sum_{l=1}^n C(n,l) (-1)^(l-1)/(l-1)!
                     sum_{prime powers m < X, gcd(m,N)=1}
                         Lambda(m) m^(-3/2) B(m) (ln m)^(l-1)
               - n g (ln 8pi + euler_gamma - 2)
               + g * binomial tail term,

where B(p^k) comes from the trace engine.  The per-newform variant at the
eta-oracle levels replaces the conductor and linear constants and runs the
prime sum over ALL prime powers, with bad primes contributing a_p^k:

    tau_f(n) = n (ln(sqrt(N)/2pi) - euler_gamma)
               - (unfiltered prime sum with b_f)
               + n (2 - 2 ln 2)
               + binomial tail term.

The prime sums converge only conditionally (cancellation), so sharp-cutoff
partial sums are reported together with geometric checkpoints and a
non-binding budget heuristic X^(-1/2) (ln X)^n; no rigorous error bound is
claimed.  Summation is ascending in m through math.fsum, so reports are
bit-for-bit reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb, factorial, fsum, log
from typing import Callable, Optional, Sequence

from scipy.integrate import quad
from scipy.special import zeta

from .errors import DomainError
from .modforms import (
    ETA_LEVELS,
    QExpansion,
    b_from_eigen,
    conductor_log_term,
    dim_S2,
    eta_product_qexp,
)
from .trace import (
    DEFAULT_CONVENTION,
    TraceBProvider,
    build_b_provider,
    prime_powers_below,
)

EULER_GAMMA = 0.5772156649015329

# exact binomial weights are kept up to this index; desk-scale positivity
# exploration does not need more and the alternating sums degrade beyond it
MAX_INDEX = 64


def hurwitz_tail(m: int) -> float:
    """sum_{l>=1} (l + 1/2)^(-m), i.e. the Hurwitz zeta value zeta(m, 3/2).

    Divergent for m < 2 (domain error).  Backed by scipy's Hurwitz zeta;
    hurwitz_tail_series is the independent summation oracle.
    """
    if m < 2:
        raise DomainError(f"tail sum diverges for m = {m} < 2")
    return float(zeta(m, 1.5))


def hurwitz_tail_series(m: int, terms: int = 4096) -> float:
    """Direct summation of sum_{l>=1} (l+1/2)^(-m) with an Euler-Maclaurin
    tail, accurate to well under 1e-12 for every m >= 2."""
    if m < 2:
        raise DomainError(f"tail sum diverges for m = {m} < 2")
    head = fsum((l + 0.5) ** (-m) for l in range(1, terms + 1))
    a = terms + 1.5
    tail = a ** (1 - m) / (m - 1) + 0.5 * a ** (-m) + m * a ** (-m - 1) / 12
    return head + tail


def binomial_tail_term(n: int, g: int | float = 1) -> float:
    """g * sum_{m=2}^n C(n,m) sum_{l>=1} (-1)^m / (l+1/2)^m, evaluated in
    the resummed l-first form

        g * sum_{l>=1} [ (1 - 1/(l+1/2))^n - 1 + n/(l+1/2) ]

    which has positive terms and no alternating blow-up.  Far terms are
    accelerated through Hurwitz zeta tails, so large n (e.g. the asymptotic
    ratio check) stays cheap.  Returns 0 for n = 1.
    """
    if n < 1:
        raise DomainError(f"index must be >= 1, got {n}")
    if n == 1:
        return 0.0 * g
    cut = max(64, 16 * n)
    head = fsum(
        math.expm1(n * math.log1p(-1.0 / (l + 0.5))) + n / (l + 0.5)
        for l in range(1, cut + 1)
    )
    # remaining l > cut: expand the bracket in powers of 1/(l+1/2)
    a = cut + 1.5
    tail = 0.0
    sign = 1.0
    for m in range(2, n + 1):
        sign = 1.0 if m % 2 == 0 else -1.0
        term = sign * comb(n, m) * float(zeta(m, a))
        tail += term
        if abs(term) < 1e-17 * (abs(head) + abs(tail)) + 1e-300:
            break
    return g * (head + tail)


def binomial_tail_direct(n: int, g: int | float = 1) -> float:
    """Alternating m-first evaluation (the printed form); numerically safe
    only for n <= 25, kept as the dual-method oracle."""
    if n < 1:
        raise DomainError(f"index must be >= 1, got {n}")
    if n > 25:
        raise DomainError("direct alternating form is unstable beyond n = 25")
    return g * fsum(
        comb(n, m) * (-1) ** m * hurwitz_tail(m) for m in range(2, n + 1)
    )


def conrey_asymptotic_check(
    n_list: Sequence[int],
) -> list[tuple[int, float, float]]:
    """(n, value, value/(n ln n)) rows for the binomial tail sum; the ratio
    should drift toward 1 as n grows."""
    out = []
    for n in n_list:
        if n < 2:
            raise DomainError(f"asymptotic check needs n >= 2, got {n}")
        v = binomial_tail_term(n, 1)
        out.append((n, v, v / (n * log(n))))
    return out


def series_3_over_l(l_terms: int) -> float:
    """Partial sum of sum_{l=1}^inf 3/(l(2l+3)) over the first l_terms."""
    return fsum(3.0 / (l * (2 * l + 3)) for l in range(1, l_terms + 1))


def series_3_over_l_tail_bounds(l_terms: int) -> tuple[float, float]:
    """(lower, upper) integral bounds for the omitted tail after l_terms."""
    f = lambda t: 3.0 / (t * (2 * t + 3))
    # integral of f is ln(t/(t+1.5)); decreasing positive terms bracket
    lower = -log((l_terms + 1) / (l_terms + 2.5))
    upper = -log(l_terms / (l_terms + 1.5))
    return lower, upper


def constant_identity_511(l_terms: int = 10**6) -> tuple[float, float]:
    """Both sides of the constant simplification

        ln 2pi + euler_gamma + 2/3 - sum_{l>=1} 3/(l(2l+3))
            = ln 8pi + euler_gamma - 2.

    The left side sums the series directly with an Euler-Maclaurin tail;
    the right side is the closed form.  Their agreement (and the closed
    form of the series, 8/3 - 2 ln 2) is the check."""
    head = series_3_over_l(l_terms)
    a = l_terms + 1.0
    fa = 1.0 / a - 1.0 / (a + 1.5)
    fpa = -1.0 / a**2 + 1.0 / (a + 1.5) ** 2
    tail = log((a + 1.5) / a) + 0.5 * fa - fpa / 12.0
    series = head + tail
    lhs = log(2 * math.pi) + EULER_GAMMA + 2.0 / 3.0 - series
    rhs = log(8 * math.pi) + EULER_GAMMA - 2.0
    return lhs, rhs


# -- prime sums and tau assembly --------------------------------------------


@dataclass(frozen=True)
class LiCoefficientReport:
    """One arithmetic-side coefficient with its term breakdown.

    tau = term_conductor - term_prime_sum + term_linear + term_binomial_tail;
    term_conductor already carries the n/2 scaling and term_linear is the
    signed value -n g (ln 8pi + euler_gamma - 2).  partial_sums holds
    (X_i, prime-sum value below X_i) at geometric checkpoints; budget is the
    non-binding heuristic X^(-1/2) (ln X)^n.
    """

    N: int
    n: int
    cutoff_X: float
    term_conductor: float
    term_prime_sum: float
    term_linear: float
    term_binomial_tail: float
    tau: float
    partial_sums: tuple[tuple[float, float], ...]
    budget: float

    def to_json_dict(self) -> dict:
        return {
            "level": self.N,
            "n": self.n,
            "cutoff": self.cutoff_X,
            "terms": {
                "conductor": self.term_conductor,
                "prime_sum": self.term_prime_sum,
                "linear": self.term_linear,
                "binomial_tail": self.term_binomial_tail,
            },
            "tau": self.tau,
            "partial_sums": [
                {"X": x, "value": v} for (x, v) in self.partial_sums
            ],
            "budget": self.budget,
        }

    def csv_row(self) -> str:
        return f"{self.N},{self.n},{self.cutoff_X:g},{self.tau!r}"


# the per-newform report shares the layout; tau means tau_f there
NewformLiReport = LiCoefficientReport


def _index_weights(n: int) -> list[float]:
    """Coefficients of (ln m)^(l-1): C(n,l) (-1)^(l-1) / (l-1)! for l=1..n."""
    if not 1 <= n <= MAX_INDEX:
        raise DomainError(f"index must be in [1, {MAX_INDEX}], got {n}")
    return [
        (-1.0) ** (l - 1) * comb(n, l) / factorial(l - 1)
        for l in range(1, n + 1)
    ]


def prime_sum_term(
    N: int,
    n: int,
    x: float,
    b_provider: Callable[[int, int], float],
    coprime_filter: bool = True,
    checkpoints: int = 6,
) -> tuple[float, list[tuple[float, float]], float]:
    """Sharp-cutoff partial sum

        sum_{l=1}^n C(n,l) (-1)^(l-1)/(l-1)!
            sum_{m = p^k < X} Lambda(m) m^(-3/2) B(m) (ln m)^(l-1)

    over prime powers, ascending in m, optionally restricted to
    gcd(m, N) = 1.  Returns (value, checkpoint partial sums, budget).
    b_provider(p, k) supplies B(p^k); ln p is computed once per prime.
    """
    if x < 2:
        raise DomainError(f"cutoff must be >= 2, got {x}")
    weights = _index_weights(n)
    coprime_to = N if coprime_filter else 1
    pps = prime_powers_below(int(math.ceil(x)), coprime_to=coprime_to)
    pps = [(m, p, k) for (m, p, k) in pps if m < x]
    log_cache: dict[int, float] = {}
    terms: list[float] = []
    ms: list[int] = []
    for m, p, k in pps:
        lp = log_cache.get(p)
        if lp is None:
            lp = log(p)
            log_cache[p] = lp
        b = b_provider(p, k)
        if b == 0:
            terms.append(0.0)
            ms.append(m)
            continue
        lm = k * lp
        # Horner over descending powers of ln m
        w = weights[n - 1]
        for j in range(n - 2, -1, -1):
            w = w * lm + weights[j]
        terms.append(lp * m**-1.5 * b * w)
        ms.append(m)
    value = fsum(terms)
    marks: list[tuple[float, float]] = []
    for j in range(checkpoints - 1, -1, -1):
        xi = x / 2.0**j
        idx = _count_below(ms, xi)
        marks.append((xi, fsum(terms[:idx])))
    budget = x**-0.5 * log(x) ** n
    return value, marks, budget


def _count_below(sorted_ms: list[int], bound: float) -> int:
    import bisect

    return bisect.bisect_left(sorted_ms, bound)


LINEAR_CONSTANT = log(8 * math.pi) + EULER_GAMMA - 2.0  # from the constant identity
NEWFORM_LINEAR_CONSTANT = 2.0 - 2.0 * log(2.0)  # -2/3 + sum 3/(l(2l+3))


def tau_N_arithmetic(
    N: int,
    n: int,
    x: float,
    b_provider: Optional[Callable[[int, int], float]] = None,
    convention: str = DEFAULT_CONVENTION,
    checkpoints: int = 6,
) -> LiCoefficientReport:
    """Arithmetic-side tau for the full level-N product at cutoff X.

    B values default to an in-memory trace-backed provider; pass one
    explicitly (e.g. shared across n, or loaded from the cache) to avoid
    rebuilding tables.
    """
    if N < 1:
        raise DomainError(f"level must be >= 1, got {N}")
    g = dim_S2(N)
    if b_provider is None:
        if g == 0:
            b_provider = lambda p, k: 0  # every trace vanishes on a 0-dim space
        else:
            b_provider = build_b_provider(N, int(math.ceil(x)), convention)
    conductor = 0.5 * n * conductor_log_term(N)
    ps_value, marks, budget = prime_sum_term(
        N, n, x, b_provider, coprime_filter=True, checkpoints=checkpoints
    )
    linear = -n * g * LINEAR_CONSTANT
    btail = binomial_tail_term(n, g)
    tau = conductor - ps_value + linear + btail
    return LiCoefficientReport(
        N=N,
        n=n,
        cutoff_X=float(x),
        term_conductor=conductor,
        term_prime_sum=ps_value,
        term_linear=linear,
        term_binomial_tail=btail,
        tau=tau,
        partial_sums=tuple(marks),
        budget=budget,
    )


def tau_f_arithmetic(
    level: int,
    n: int,
    x: float,
    qexp: Optional[QExpansion] = None,
    checkpoints: int = 6,
) -> NewformLiReport:
    """Arithmetic-side tau for the single newform at an eta-oracle level.

    The prime sum runs over ALL prime powers; primes dividing the level
    contribute a_p^k.  Needs eigenvalues a_p for every prime p < X, so the
    eta expansion is built to that length unless one is supplied.
    """
    if level not in ETA_LEVELS:
        raise DomainError(
            f"level {level} not supported by the eta oracle {list(ETA_LEVELS)}"
        )
    want = max(2, int(math.ceil(x)))
    if qexp is None:
        qexp = eta_product_qexp(level, want)
    elif qexp.level != level:
        raise DomainError(f"expansion is for level {qexp.level}, not {level}")
    elif qexp.M < want - 1:
        raise DomainError(
            f"expansion truncated at {qexp.M}, need a_p for p < {want}"
        )
    provider = lambda p, k: b_from_eigen(qexp, p, k)
    conductor = n * (0.5 * log(level) - log(2 * math.pi) - EULER_GAMMA)
    ps_value, marks, budget = prime_sum_term(
        level, n, x, provider, coprime_filter=False, checkpoints=checkpoints
    )
    linear = n * NEWFORM_LINEAR_CONSTANT
    btail = binomial_tail_term(n, 1)
    tau = conductor - ps_value + linear + btail
    return NewformLiReport(
        N=level,
        n=n,
        cutoff_X=float(x),
        term_conductor=conductor,
        term_prime_sum=ps_value,
        term_linear=linear,
        term_binomial_tail=btail,
        tau=tau,
        partial_sums=tuple(marks),
        budget=budget,
    )


def bad_prime_partial_sum(level: int, n: int, x: float, qexp=None) -> float:
    """The prime-power sum restricted to gcd(m, level) > 1, with b = a_p^k.

    At a matched cutoff, tau_N - tau_f equals exactly this sum: both sides
    share every good-prime term and every constant cancels.
    """
    if qexp is None:
        qexp = eta_product_qexp(level, max(2, int(math.ceil(x))))
    weights = _index_weights(n)
    from .arith import factorize

    terms = []
    for p, _ in factorize(level):
        lp = log(p)
        m, k = p, 1
        while m < x:
            b = b_from_eigen(qexp, p, k)
            if b:
                lm = k * lp
                w = weights[n - 1]
                for j in range(n - 2, -1, -1):
                    w = w * lm + weights[j]
                terms.append((m, lp * m**-1.5 * b * w))
            m *= p
            k += 1
    terms.sort()
    return fsum(v for _, v in terms)


def test_function_transform(n: int, s: complex) -> tuple[complex, complex]:
    """Adaptive quadrature of the one-sided test-function transform against
    its closed form 1 - (1 - 1/s)^n.

    The transform is int_{-inf}^0 e^{x/2} P_n(x) e^{(s-1/2)x} dx with
    P_n(x) = sum_{j=1}^n C(n,j) x^(j-1)/(j-1)!.  Convergence needs
    Re s > 0.
    """
    if n < 1 or n > 12:
        raise DomainError(f"index must be in [1, 12], got {n}")
    s = complex(s)
    if s.real <= 0:
        raise DomainError(f"transform diverges for Re s = {s.real} <= 0")
    coeffs = [comb(n, j) / factorial(j - 1) for j in range(1, n + 1)]

    def poly(u: float) -> float:  # P_n(-u)
        acc = 0.0
        for j in range(n, 0, -1):
            acc = acc * (-u) + coeffs[j - 1]
        return acc

    re, _ = quad(
        lambda u: poly(u) * math.exp(-s.real * u) * math.cos(s.imag * u),
        0.0,
        math.inf,
        epsabs=1e-12,
        epsrel=1e-12,
        limit=400,
    )
    im, _ = quad(
        lambda u: -poly(u) * math.exp(-s.real * u) * math.sin(s.imag * u),
        0.0,
        math.inf,
        epsabs=1e-12,
        epsrel=1e-12,
        limit=400,
    )
    closed = 1.0 - (1.0 - 1.0 / s) ** n
    return complex(re, im), closed
