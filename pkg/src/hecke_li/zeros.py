"""Zero side: ingest or locate critical-line zeros, sum tau over them,
evaluate completed L-functions, and run local Euler-factor diagnostics.

Analytic work happens in the classical plane: the completed function
Lambda(s) = (sqrt(N)/2pi)^s Gamma(s) L(s) is entire with functional
equation Lambda(s) = eps Lambda(2-s), critical line Re s = 1.  Zero
ordinates are plane-independent; a zero 1 + i*gamma here corresponds to
1/2 + i*gamma for the half-shifted convention used by the tau sums.

Lambda is evaluated by the split Mellin integral

    Lambda(s) = sum_n a_n [ (cn)^-s Gamma(s, cn t0)
                           + eps (cn)^(s-2) Gamma(2-s, cn / t0) ],

c = 2pi/sqrt(N), with symmetric split point t0 = 1 by default.  On the
line s = 1 + it the two halves cancel to exp(-pi t / 2) of their size, so
evaluation runs under mpmath with working precision grown linearly in t.
With t0 = 1 the functional-equation residual vanishes identically by
construction, so the SIGN eps is detected with an asymmetric split point:
only the true sign makes the value split-point independent.

The incomplete gamma kernel is computed by the lower series for small x
and a continued fraction (modified Lentz) for large x.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from math import comb, factorial, fsum, log
from typing import Callable, Optional, Sequence

import mpmath

from .errors import (
    DomainError,
    InternalInconsistencyError,
    NumericError,
    ResourceLimitError,
    ZeroFileParseError,
)
from .modforms import QExpansion
from .arith import divisor_count

T_MAX_LIMIT = 120.0
GRID_LIMIT = 0.25


# -- zero lists --------------------------------------------------------------


@dataclass(frozen=True)
class ZeroList:
    """Positive critical-line ordinates with multiplicities.

    The conjugate/reflected partners are implied, not stored.  A zero at
    the central point is carried separately in central_multiplicity.
    uncertain marks ordinates whose refinement hit the numeric noise floor.
    """

    source: str
    ordinates: tuple[float, ...]
    multiplicities: tuple[int, ...]
    central_multiplicity: int = 0
    uncertain: tuple[bool, ...] = ()

    def __post_init__(self):
        if len(self.ordinates) != len(self.multiplicities):
            raise DomainError("ordinates and multiplicities differ in length")
        if any(g <= 0 for g in self.ordinates):
            raise DomainError("ordinates must be positive")
        if any(
            a >= b for a, b in zip(self.ordinates, self.ordinates[1:])
        ):
            raise DomainError("ordinates must be strictly ascending")
        if not self.uncertain:
            object.__setattr__(
                self, "uncertain", tuple(False for _ in self.ordinates)
            )

    @property
    def pairs_used(self) -> int:
        return sum(self.multiplicities)


def load_zeros(path: str, plane: str = "paper") -> ZeroList:
    """Read a zero file: '#' comments, optional 'central=<int>' header,
    then one positive decimal ordinate per line, ascending.

    Ordinates are imaginary parts and mean the same in either plane
    convention; `plane` is recorded via the source tag only.
    """
    if plane not in ("paper", "classical"):
        raise DomainError(f"unknown plane {plane!r}")
    ordinates: list[float] = []
    central = 0
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("central="):
                try:
                    central = int(line.split("=", 1)[1])
                except ValueError:
                    raise ZeroFileParseError(path, lineno, f"bad header {line!r}")
                if central < 0:
                    raise ZeroFileParseError(path, lineno, "central must be >= 0")
                continue
            try:
                g = float(line)
            except ValueError:
                raise ZeroFileParseError(path, lineno, f"not a number: {line!r}")
            if g <= 0:
                raise ZeroFileParseError(path, lineno, f"ordinate {g} not positive")
            if ordinates and g <= ordinates[-1]:
                raise ZeroFileParseError(
                    path, lineno, f"ordinate {g} not ascending"
                )
            ordinates.append(g)
    return ZeroList(
        source=f"ingested-file:{path} ({plane} plane)",
        ordinates=tuple(ordinates),
        multiplicities=tuple(1 for _ in ordinates),
        central_multiplicity=central,
    )


def tau_from_zeros(
    zeros: ZeroList, n: int, convention: str = "minus"
) -> tuple[float, list[tuple[float, float]]]:
    """Partial tau over the listed zeros: each ordinate gamma contributes
    the conjugate/reflected pair rho = 1/2 +- i gamma,

        pair term = 2 - 2 Re (1 - 1/rho)^(+-n),

    exponent -n for convention 'minus', +n for 'plus'; the two agree
    exactly on symmetric lists because rho <-> 1-rho swaps the exponent
    sign.  A central zero contributes 1 - (-1)^n per multiplicity.
    Returns (partial value, per-pair terms)."""
    if n < 1:
        raise DomainError(f"index must be >= 1, got {n}")
    if convention not in ("plus", "minus"):
        raise DomainError(f"unknown convention {convention!r}")
    # Over the symmetric pair {rho, 1-rho} the exponent swap n <-> -n only
    # relabels which member carries which term, so the pair sums are the
    # same exact expression; one formula serves both conventions and the
    # invariance is bit-for-bit.
    per_pair: list[tuple[float, float]] = []
    for g, mult in zip(zeros.ordinates, zeros.multiplicities):
        rho = complex(0.5, g)
        term = 2.0 - 2.0 * ((1.0 - 1.0 / rho) ** n).real
        per_pair.append((g, mult * term))
    central = zeros.central_multiplicity * (1.0 - (-1.0) ** n)
    value = fsum(v for _, v in per_pair) + central
    return value, per_pair


def zero_tail_estimate(zeros: ZeroList, n: int, level: int = 11) -> float:
    """Heuristic size of the omitted tail: pair terms decay like
    n^2/gamma^2 and the pair density grows logarithmically."""
    if not zeros.ordinates:
        return math.inf
    gmax = zeros.ordinates[-1]
    density = max(0.5, math.log(gmax * math.sqrt(level) / (2 * math.pi))) / math.pi
    return n * n * density / gmax


def tau_zeros_report(zeros: ZeroList, n: int, convention: str = "minus") -> dict:
    value, per_pair = tau_from_zeros(zeros, n, convention)
    gmax = zeros.ordinates[-1] if zeros.ordinates else 0.0
    return {
        "source": zeros.source,
        "n": n,
        "partial_value": value,
        "pairs_used": zeros.pairs_used,
        "tail_note": (
            f"pair terms ~ n^2/gamma^2 beyond gamma = {gmax:.4f}; "
            f"heuristic tail {zero_tail_estimate(zeros, n):.3g}"
            if zeros.ordinates
            else "empty list: partial sum is 0"
        ),
    }


# -- incomplete gamma --------------------------------------------------------

_MAX_KERNEL_ITER = 20000


def _gamma_upper_mp(s, x, eps):
    """Upper incomplete gamma at mpmath working precision: lower series for
    x < |s| + 1, continued fraction (modified Lentz) otherwise."""
    s = mpmath.mpmathify(s)
    x = mpmath.mpf(x)
    if x < 0:
        raise DomainError("second argument must be > 0")
    if x == 0:
        return mpmath.gamma(s)
    if x < abs(s) + 1:
        # gamma_lower(s, x) = x^s e^-x sum_k x^k / (s (s+1) ... (s+k))
        term = 1 / s
        total = term
        k = 1
        while True:
            term *= x / (s + k)
            total += term
            if abs(term) < eps * abs(total):
                break
            k += 1
            if k > _MAX_KERNEL_ITER:
                raise NumericError(
                    f"lower series for Gamma({s}, {x}) stalled after "
                    f"{_MAX_KERNEL_ITER} terms (|term|={abs(term)})"
                )
        lower = mpmath.power(x, s) * mpmath.exp(-x) * total
        return mpmath.gamma(s) - lower
    # modified Lentz on  Gamma(s,x) = e^-x x^s / (x+1-s - 1(1-s)/(x+3-s - ...))
    tiny = mpmath.mpf(10) ** (-mpmath.mp.prec)
    b = x + 1 - s
    c = 1 / tiny
    d = 1 / b if b != 0 else 1 / tiny
    f = d
    i = 1
    while True:
        a = -i * (i - s)
        b += 2
        d = b + a * d
        if d == 0:
            d = tiny
        c = b + a / c
        if c == 0:
            c = tiny
        d = 1 / d
        delta = c * d
        f *= delta
        if abs(delta - 1) < eps:
            break
        i += 1
        if i > _MAX_KERNEL_ITER:
            raise NumericError(
                f"continued fraction for Gamma({s}, {x}) stalled after "
                f"{_MAX_KERNEL_ITER} steps (|delta-1|={abs(delta - 1)})"
            )
    return mpmath.exp(-x) * mpmath.power(x, s) * f


def incomplete_gamma_upper(s: complex, x: float) -> complex:
    """Gamma(s, x) for complex s (|s| <= 1e3) and real x > 0, relative
    error <= 1e-10 on that domain."""
    if x <= 0:
        raise DomainError(f"x must be > 0, got {x}")
    if abs(s) > 1e3:
        raise DomainError(f"|s| = {abs(s):.3g} beyond supported bound 1e3")
    with mpmath.workdps(30):
        val = _gamma_upper_mp(s, x, mpmath.mpf(10) ** -25)
        return complex(val)


# -- completed L-function ----------------------------------------------------


@dataclass(frozen=True)
class CompletedLValue:
    s: complex
    value: complex
    truncation_error: float


def required_coefficients(level: int, im_s: float) -> int:
    """Smallest safe truncation length for the split Mellin sum at height
    |Im s|: the tail must clear both the term decay exp(-cn) and the
    exp(pi t / 2) cancellation of the completed function."""
    c = 2 * math.pi / math.sqrt(level)
    return int(math.ceil((math.pi / 2 * abs(im_s) + 45.0) / c)) + 8


def _working_dps(im_s: float) -> int:
    # cancellation costs pi/(2 ln 10) = 0.6822 digits per unit height
    return 25 + int(math.ceil(0.6822 * abs(im_s)))


def _truncation_bound(level: int, s: complex, m_used: int) -> float:
    """Tail bound sum_{n > M} 6 d(n) sqrt(n) e^-cn / (cn), summed far
    enough that the geometric remainder is negligible."""
    c = 2 * math.pi / math.sqrt(level)
    total = 0.0
    last = 0.0
    for n in range(m_used + 1, m_used + 201):
        x = c * n
        if x > 700:
            break
        last = 6.0 * divisor_count(n) * math.sqrt(n) * math.exp(-x) / x
        total += last
    r = math.exp(-c)
    return total + 2.0 * last * r / (1.0 - r)


def _lambda_mp(
    qexp: QExpansion,
    level: int,
    sign: int,
    s,
    split: float = 1.0,
    m_terms: Optional[int] = None,
):
    """mpmath evaluation of Lambda(s) at the current working precision.
    Returns (value, max |term| as float) for noise-floor bookkeeping."""
    c = 2 * mpmath.pi / mpmath.sqrt(level)
    s = mpmath.mpmathify(s)
    two_minus_s = 2 - s
    eps = mpmath.mpf(10) ** (-mpmath.mp.dps + 4)
    t0 = mpmath.mpf(split)
    # on the line Re s = 1 with a symmetric split, 2 - s = conj(s) and the
    # second kernel is the conjugate of the first
    conj_shortcut = mpmath.re(s) == 1 and t0 == 1
    m = m_terms if m_terms is not None else qexp.M
    total = mpmath.mpc(0)
    peak = 0.0
    for n in range(1, m + 1):
        a_n = qexp.coeffs[n - 1]
        if a_n == 0:
            continue
        xn = c * n
        g1 = _gamma_upper_mp(s, xn * t0, eps)
        if conj_shortcut:
            g2 = mpmath.conj(g1)
        else:
            g2 = _gamma_upper_mp(two_minus_s, xn / t0, eps)
        ln_xn = mpmath.log(xn)
        term = a_n * (
            mpmath.exp(-s * ln_xn) * g1
            + sign * mpmath.exp((s - 2) * ln_xn) * g2
        )
        total += term
        size = float(abs(term))
        if size > peak:
            peak = size
    return total, peak


def completed_L(
    qexp: QExpansion,
    level: int,
    sign: int,
    s: complex,
    split: float = 1.0,
) -> CompletedLValue:
    """Completed L-value Lambda(s) with a reported truncation bound.

    Needs enough q-expansion coefficients for the height of s; raises
    ResourceLimitError stating the required count otherwise.
    """
    if sign not in (1, -1):
        raise DomainError(f"sign must be +1 or -1, got {sign}")
    s = complex(s)
    need = required_coefficients(level, s.imag)
    if qexp.M < need:
        raise ResourceLimitError(
            f"period sum at Im s = {s.imag:.3g} needs at least {need} "
            f"coefficients, expansion has {qexp.M}"
        )
    with mpmath.workdps(_working_dps(s.imag)):
        val, _ = _lambda_mp(qexp, level, sign, s, split, need)
        out = complex(val)
    return CompletedLValue(s=s, value=out, truncation_error=_truncation_bound(level, s, need))


def detect_sign(qexp: QExpansion, level: int, s_test: complex = 1.3 + 0.8j) -> int:
    """Functional-equation sign by split-point independence.

    With the symmetric split the functional-equation residual is zero by
    construction for EITHER sign, so the discriminating statistic is the
    change of the computed value under an asymmetric split: only the true
    sign leaves the value invariant.  Refuses (raises) when neither or
    both candidates look invariant, which signals broken coefficients.
    """
    s = complex(s_test)
    need = required_coefficients(level, s.imag) + 8
    if qexp.M < need:
        raise ResourceLimitError(
            f"sign detection needs {need} coefficients, expansion has {qexp.M}"
        )
    resid = {}
    scale = 0.0
    with mpmath.workdps(_working_dps(s.imag) + 5):
        for eps in (1, -1):
            v1, peak = _lambda_mp(qexp, level, eps, s, 1.0, need)
            v2, _ = _lambda_mp(qexp, level, eps, s, 1.3, need)
            resid[eps] = float(abs(v1 - v2))
            scale = max(scale, float(abs(v1)), float(abs(v2)))
    good = [e for e in (1, -1) if resid[e] < 1e-8 * max(scale, 1e-300)]
    if len(good) != 1:
        raise InternalInconsistencyError(
            f"sign detection degenerate at level {level}: residuals {resid}, "
            f"scale {scale:.3g}"
        )
    return good[0]


# -- zero finding ------------------------------------------------------------


def find_zeros(
    qexp: QExpansion,
    level: int,
    sign: Optional[int] = None,
    t_max: float = 30.0,
    grid: float = 0.25,
    refine_tol: float = 1e-6,
    check_count: bool = True,
) -> ZeroList:
    """Critical-line zeros of Lambda(1 + it) for 0 < t <= t_max.

    Scans the (real-valued) line restriction on a uniform grid, bisects
    each sign change to |t| tolerance refine_tol, flags ordinates whose
    bracket values sank below the numeric noise floor, and cross-checks
    the count against a coarse argument-principle integral around the
    rectangle (warning only).
    """
    if t_max > T_MAX_LIMIT:
        raise DomainError(f"t_max {t_max} beyond desk-scale limit {T_MAX_LIMIT}")
    if grid > GRID_LIMIT:
        raise DomainError(f"grid {grid} coarser than limit {GRID_LIMIT}")
    if sign is None:
        sign = detect_sign(qexp, level)
    need_top = required_coefficients(level, t_max)
    if qexp.M < need_top:
        raise ResourceLimitError(
            f"zero search to T = {t_max} needs {need_top} coefficients, "
            f"expansion has {qexp.M}"
        )

    def line_value(t: float, margin: int = 16) -> tuple[float, float]:
        """(real line restriction, noise floor) at 1 + it.  Sign scanning
        runs with a slim precision margin over the structural exp(pi t/2)
        cancellation; the noise floor reflects the margin used."""
        dps = margin + int(math.ceil(0.6822 * abs(t)))
        with mpmath.workdps(dps):
            val, peak = _lambda_mp(
                qexp, level, sign, mpmath.mpc(1, t), 1.0,
                required_coefficients(level, t),
            )
            r = float(val.real if sign == 1 else val.imag)
            noise = peak * 10.0 ** (-(dps - 8))
        return r, noise

    steps = int(math.floor(t_max / grid))
    ts = [grid * i for i in range(1, steps + 1)]
    vals: list[tuple[float, float]] = [line_value(t) for t in ts]

    from scipy.optimize import brentq

    ordinates: list[float] = []
    uncertain: list[bool] = []
    for i in range(len(ts) - 1):
        r1, n1 = vals[i]
        r2, n2 = vals[i + 1]
        if r1 == 0.0:
            continue  # exactly-on-grid zero gets caught by the flip test
        if (r1 < 0) == (r2 < 0):
            continue
        trail: list[tuple[float, float, float]] = [
            (ts[i], r1, n1),
            (ts[i + 1], r2, n2),
        ]

        def tracked(t: float) -> float:
            r, noise = line_value(t)
            trail.append((t, r, noise))
            return r

        g = float(
            brentq(tracked, ts[i], ts[i + 1], xtol=refine_tol, rtol=1e-15)
        )
        # sign reliability: the nearest recorded evaluations that are still
        # a safe distance from the root must straddle it with values clear
        # of the noise floor (values AT the root sink below noise by design)
        margin_t = 5 * refine_tol
        below = [e for e in trail if e[0] <= g - margin_t]
        above = [e for e in trail if e[0] >= g + margin_t]
        shaky = True
        if below and above:
            tb, rb, nb = max(below)
            ta, ra, na = min(above)
            shaky = not (
                (rb < 0) != (ra < 0)
                and abs(rb) > 3 * nb
                and abs(ra) > 3 * na
            )
        ordinates.append(g)
        uncertain.append(shaky)
        if shaky:
            warnings.warn(
                f"zero near t = {g:.6f} refined into the noise floor; "
                f"flagged uncertain",
                stacklevel=2,
            )

    if check_count and ordinates:
        got = _argument_principle_count(qexp, level, sign, t_max, ordinates)
        if got is not None:
            est, corner = got
            in_box = sum(1 for g in ordinates if g <= corner)
            if est != in_box:
                warnings.warn(
                    f"argument principle estimates {est} zeros below "
                    f"T = {corner:.2f}, scan found {in_box}; grid may be "
                    f"too coarse",
                    stacklevel=2,
                )

    return ZeroList(
        source=f"internal-finder:level={level},T={t_max},grid={grid}",
        ordinates=tuple(ordinates),
        multiplicities=tuple(1 for _ in ordinates),
        central_multiplicity=0,
        uncertain=tuple(uncertain),
    )


def _argument_principle_count(
    qexp: QExpansion,
    level: int,
    sign: int,
    t_top: float,
    found: Sequence[float],
) -> Optional[tuple[int, float]]:
    """Zeros inside (0,2) x (0,t_top') for a corner t_top' nudged just
    BELOW the requested height, by winding of Lambda along
    2 -> 2+iT -> 1+iT, divided by pi.  Keeping the corner below the scan
    ceiling (and away from located zeros) makes the rectangle a subset of
    the scanned range, so the estimate is comparable with the count of
    found ordinates <= corner.  Returns (estimate, corner) or None."""
    t_top = t_top - 0.02
    while any(abs(t_top - g) < 0.15 for g in found):
        t_top -= 0.13

    def lam(sig: float, t: float):
        dps = 16 + int(math.ceil(0.6822 * abs(t)))
        with mpmath.workdps(dps):
            val, _ = _lambda_mp(
                qexp, level, sign, mpmath.mpc(sig, t), 1.0,
                min(qexp.M, required_coefficients(level, t)),
            )
            return complex(val)

    def phase_sweep(points: list[complex]) -> Optional[float]:
        total = 0.0
        for a, b in zip(points, points[1:]):
            if a == 0 or b == 0:
                return None
            d = math.atan2((b / a).imag, (b / a).real)
            if abs(d) > 2.6:
                return None  # too coarse to unwrap reliably
            total += d
        return total

    for refine in range(3):
        step_v = 0.5 / (2**refine)
        nv = max(2, int(math.ceil(t_top / step_v)))
        vertical = [lam(2.0, t_top * i / nv) for i in range(nv + 1)]
        nh = max(8, 16 * 2**refine)
        horizontal = [lam(2.0 - i / nh, t_top) for i in range(nh + 1)]
        ph_v = phase_sweep(vertical)
        ph_h = phase_sweep(horizontal)
        if ph_v is not None and ph_h is not None:
            return int(round((ph_v + ph_h) / math.pi)), t_top
    return None


# -- local Euler factor diagnostics ------------------------------------------


def local_prime_side(p: int, alpha: complex, n: int, tol: float = 1e-14) -> complex:
    """Prime-power side of the local factor identity:

        sum_{j=1}^n C(n,j) (-1)^(j-1)/(j-1)!
            sum_{k>=1} (ln p / p^k) alpha^k (k ln p)^(j-1),

    the k-sum truncated once its geometric tail drops below tol."""
    if n < 1:
        raise DomainError(f"index must be >= 1, got {n}")
    if abs(alpha) > 1 + 1e-9:
        raise DomainError(f"|alpha| = {abs(alpha):.6g} must be <= 1 + 1e-9")
    lp = log(p)
    weights = [
        (-1.0) ** (j - 1) * comb(n, j) / factorial(j - 1) for j in range(1, n + 1)
    ]
    total = 0.0 + 0.0j
    ak = complex(alpha)
    k = 1
    while True:
        lk = k * lp
        w = weights[n - 1]
        for j in range(n - 2, -1, -1):
            w = w * lk + weights[j]
        term = lp * ak / p**k * w
        total += term
        bound = abs(ak) / p**k * lp * (1 + lk) ** (n - 1)
        if bound < tol and k > 3:
            break
        ak *= alpha
        k += 1
        if k > 10000:
            raise NumericError("local prime-side sum did not converge")
    return total


def _zero_term(rho: complex, n: int) -> float:
    """1 - (1 - 1/rho)^(-n) with the degenerate rho = 0 reading (term 1)."""
    if rho == 0:
        return 1.0
    return (1.0 - (1.0 - 1.0 / rho) ** (-n)).real


def local_zero_side(
    p: int, alpha: complex, n: int, k_pairs: int = 50
) -> tuple[float, float]:
    """Zero side of the local factor identity, summed over the explicit
    zeros s = i(t + 2 pi k)/ln p of 1 - alpha p^-s (alpha = e^it) with
    symmetric truncation |k| <= K, plus a Richardson step in 1/K.

    Returns (partial sum at K, extrapolated value from K and 2K)."""
    if n < 1:
        raise DomainError(f"index must be >= 1, got {n}")
    if k_pairs < 10:
        raise DomainError(f"need K >= 10, got {k_pairs}")
    a = complex(alpha)
    if abs(abs(a) - 1.0) > 1e-9:
        raise DomainError("explicit-zero branch needs |alpha| = 1")
    t = math.atan2(a.imag, a.real) % (2 * math.pi)
    lp = log(p)

    def partial(kk: int) -> float:
        terms = [
            _zero_term(complex(0.0, (t + 2 * math.pi * k) / lp), n)
            for k in range(-kk, kk + 1)
        ]
        return fsum(terms)

    p1 = partial(k_pairs)
    p2 = partial(2 * k_pairs)
    return p1, 2.0 * p2 - p1


def coth_pair_sum(p: int) -> float:
    """Closed form of the n = 1, alpha = 1 zero-side sum:
    sum over k in Z of 1/(1 + (2 pi k / ln p)^2) = (L/2) coth(L/2)."""
    half = log(p) / 2.0
    return half / math.tanh(half)


# -- positivity reports ------------------------------------------------------


@dataclass(frozen=True)
class PositivityRow:
    n: int
    tau: float
    nonnegative: bool
    budget: float


def positivity_from_zeros(
    zeros: ZeroList, n_max: int, convention: str = "minus"
) -> list[PositivityRow]:
    """tau(n) partial sums from a zero list; provably nonnegative term by
    term when the list sits on the critical line."""
    if n_max < 1 or n_max > 64:
        raise DomainError(f"n_max must be in [1, 64], got {n_max}")
    rows = []
    for n in range(1, n_max + 1):
        v, _ = tau_from_zeros(zeros, n, convention)
        rows.append(
            PositivityRow(n, v, v >= 0, zero_tail_estimate(zeros, n))
        )
    return rows


def positivity_from_arithmetic(
    n_level: int,
    n_max: int,
    x: float,
    b_provider: Optional[Callable[[int, int], float]] = None,
) -> list[PositivityRow]:
    """tau(n) from the arithmetic formula with its heuristic budget; an
    exploratory report, not a verdict."""
    from .li import tau_N_arithmetic
    from .trace import build_b_provider

    if n_max < 1 or n_max > 64:
        raise DomainError(f"n_max must be in [1, 64], got {n_max}")
    if b_provider is None:
        b_provider = build_b_provider(n_level, int(math.ceil(x)))
    rows = []
    for n in range(1, n_max + 1):
        rep = tau_N_arithmetic(n_level, n, x, b_provider=b_provider)
        rows.append(PositivityRow(n, rep.tau, rep.tau >= 0, rep.budget))
    return rows
