"""Acceptance suite: every check the package must pass, as library calls.

Each criterion is a function returning a CheckResult; the registry is
consumed both by the test suite (full scope, spec tolerances) and by the
CLI selfcheck command (quick scope trims ranges but keeps every check
kind).  Measured diagnostics (the local-factor slope, the cross-method
gap) are carried in the info string; the pass/fail verdicts apply only to
the structural assertions.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import li
from . import modforms as mf
from . import trace as tr
from . import zeros as zs
from .errors import InternalInconsistencyError

GENUS_ZERO_LEVELS = (1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 13, 16, 18, 25)


@dataclass
class CheckResult:
    criterion: int
    name: str
    passed: bool
    info: str


Check = Callable[..., CheckResult]


def check_identity_dimension(n_max: int = 500) -> CheckResult:
    bad = [
        n
        for n in range(1, n_max + 1)
        if tr.trace_T(n, 1).total != mf.dim_S2(n)
    ]
    return CheckResult(
        1,
        "trace(N,1) equals dim S2(N)",
        not bad,
        f"N <= {n_max}; mismatches: {bad[:5] if bad else 'none'}",
    )


def check_degenerate_vanishing(
    n_max: int = 500, n_max_level1: int = 2000
) -> CheckResult:
    bad = []
    for level in GENUS_ZERO_LEVELS:
        top = n_max_level1 if level == 1 else n_max
        for n in range(1, top + 1):
            try:
                t = tr.trace_T(level, n).total
            except InternalInconsistencyError:
                bad.append((level, n, "non-integral"))
                continue
            if t != 0:
                bad.append((level, n, t))
    return CheckResult(
        2,
        "degenerate-level traces vanish",
        not bad,
        f"levels {GENUS_ZERO_LEVELS}, n <= {n_max} "
        f"(level 1 to {n_max_level1}); failures: {bad[:5] if bad else 'none'}",
    )


def check_eta_oracle(
    n_max: int = 500,
    levels: tuple[int, ...] = mf.ETA_LEVELS,
    pp_levels_max: int = 100,
    pp_max: int = 10**4,
) -> CheckResult:
    bad = []
    for level in levels:
        q = mf.eta_product_qexp(level, n_max)
        for n in range(1, n_max + 1):
            if math.gcd(n, level) != 1:
                continue
            if tr.trace_T(level, n).total != q.a(n):
                bad.append((level, n))
    pp_bad = []
    pps = tr.prime_powers_below(pp_max, 1)
    for level in range(1, pp_levels_max + 1):
        calc = tr.get_calculator(level)
        for m, p, k in pps:
            if level % p == 0:
                continue
            if calc.trace_prime_power(p, k) != calc.trace(m).total:
                pp_bad.append((level, p, k))
    ok = not bad and not pp_bad
    return CheckResult(
        3,
        "eta oracle and prime-power specialization",
        ok,
        f"eta mismatches: {bad[:5] if bad else 'none'}; "
        f"specialization mismatches (N <= {pp_levels_max}, p^k <= {pp_max}): "
        f"{pp_bad[:5] if pp_bad else 'none'}",
    )


def check_integrality_and_convention(
    n_max: int = 120, eta_n_max: int = 60
) -> CheckResult:
    """Integrality is asserted inside every trace call; here the A/B
    convention selection is replayed: exactly one convention must pass the
    degenerate + eta subset."""
    verdict = {}
    for conv in tr.CONVENTIONS:
        ok = True
        for level in GENUS_ZERO_LEVELS:
            for n in range(1, n_max + 1):
                try:
                    if tr.TraceCalculator(level, conv).trace(n).total != 0:
                        ok = False
                        break
                except InternalInconsistencyError:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            for level in mf.ETA_LEVELS:
                q = mf.eta_product_qexp(level, eta_n_max)
                calc = tr.TraceCalculator(level, conv)
                for n in range(1, eta_n_max + 1):
                    if math.gcd(n, level) != 1:
                        continue
                    try:
                        if calc.trace(n).total != q.a(n):
                            ok = False
                            break
                    except InternalInconsistencyError:
                        ok = False
                        break
                if not ok:
                    break
        verdict[conv] = ok
    winners = [c for c, ok in verdict.items() if ok]
    return CheckResult(
        4,
        "integrality and mu-convention selection",
        winners == [tr.DEFAULT_CONVENTION],
        f"convention verdicts {verdict}; selected "
        f"{winners[0] if len(winners) == 1 else 'ambiguous'} "
        f"(default is {tr.DEFAULT_CONVENTION})",
    )


def check_deligne_bound(
    level_max: int = 100, pp_max: int = 10**4
) -> CheckResult:
    bad = []
    pps = tr.prime_powers_below(pp_max, 1)
    for level in range(1, level_max + 1):
        calc = tr.get_calculator(level)
        g = calc.genus()
        for m, p, k in pps:
            if level % p == 0:
                continue
            b = calc.b_value(p, k).value
            if b * b > 4 * g * g * m:  # |B| <= 2 g p^(k/2), squared exactly
                bad.append((level, p, k, b))
    return CheckResult(
        5,
        "power-sum trace bound",
        not bad,
        f"|B(N,p,k)| <= 2 g(N) p^(k/2) over N <= {level_max}, "
        f"p^k <= {pp_max}; violations: {bad[:5] if bad else 'none'}",
    )


def check_newform_recursion(n_max: int = 2000) -> CheckResult:
    bad = []
    for n in range(1, n_max + 1):
        nu = mf.newform_dim(n)  # raises if negative
        total = sum(
            mf.newform_dim(m) * mf.divisor_count(n // m)
            for m in mf.divisors(n)
        )
        if total != mf.dim_S2(n) or nu < 0:
            bad.append(n)
    return CheckResult(
        6,
        "newform-count recursion",
        not bad,
        f"sum nu_m d(N/m) = g(N) and nu_N >= 0 for N <= {n_max}; "
        f"failures: {bad[:5] if bad else 'none'}",
    )


def check_constant_identity(tol: float = 1e-10) -> CheckResult:
    lhs, rhs = li.constant_identity_511()
    series = li.series_3_over_l(10**6)
    lo, hi = li.series_3_over_l_tail_bounds(10**6)
    closed = 8.0 / 3.0 - 2.0 * math.log(2.0)
    gap = abs(lhs - rhs)
    series_ok = lo <= closed - series <= hi
    series_gap = abs((series + (lo + hi) / 2) - closed)
    return CheckResult(
        7,
        "linear-constant identity",
        gap < tol and series_ok and series_gap < tol,
        f"|lhs - rhs| = {gap:.3e}; series vs closed form 8/3 - 2 ln 2 "
        f"within integral bracket: {series_ok}",
    )


def check_transform(tol: float = 1e-6) -> CheckResult:
    worst = 0.0
    for n in range(1, 7):
        for s in (2.0, 1 + 1j, 0.5 + 3j):
            q, cf = li.test_function_transform(n, s)
            worst = max(worst, abs(q - cf))
    return CheckResult(
        8,
        "test-function transform quadrature",
        worst < tol,
        f"max |quadrature - closed form| = {worst:.3e} over n <= 6",
    )


def check_asymptotic_ratio() -> CheckResult:
    rows = li.conrey_asymptotic_check([100, 1000, 10000])
    r100, r1000, r10000 = (r[2] for r in rows)
    in_band = 0.75 <= r1000 <= 1.25
    improving = abs(r10000 - 1) < abs(r100 - 1)
    return CheckResult(
        9,
        "binomial-tail growth ratio",
        in_band and improving,
        f"value/(n ln n): {r100:.4f} at 100, {r1000:.4f} at 1000, "
        f"{r10000:.4f} at 10000",
    )


def check_local_factor_slope(
    primes: tuple[int, ...] = (2, 3, 5),
    n_top: int = 8,
    k_pairs: int = 400,
    slope_rtol: float = 0.02,
    r2_min: float = 0.9999,
) -> CheckResult:
    """Measured diagnostic: the zero side exceeds the prime side by a
    linear-in-n amount.  A clean product representation with no exponential
    factor would make the two sides equal; the measured slope matches
    (ln p)/2, i.e. the factorization of 1 - p^-s carries exp(-s ln(p)/2)."""
    details = []
    ok = True
    for p in primes:
        diffs = []
        for n in range(1, n_top + 1):
            ps = zs.local_prime_side(p, 1.0, n).real
            _, zext = zs.local_zero_side(p, 1.0, n, k_pairs)
            diffs.append(zext - ps)
        ns = np.arange(1, n_top + 1, dtype=float)
        a = np.vstack([ns, np.ones_like(ns)]).T
        sol, res, *_ = np.linalg.lstsq(a, np.array(diffs), rcond=None)
        slope = sol[0]
        ss_tot = float(np.sum((diffs - np.mean(diffs)) ** 2))
        r2 = 1.0 - (float(res[0]) / ss_tot if len(res) and ss_tot else 0.0)
        want = math.log(p) / 2.0
        p_ok = r2 > r2_min and abs(slope - want) <= slope_rtol * want
        ok = ok and p_ok
        details.append(
            f"p={p}: slope {slope:.6f} vs (ln p)/2 = {want:.6f}, R^2 {r2:.6f}"
        )
    info = (
        "; ".join(details)
        + " -- zero side minus prime side is NOT zero: the measured linear "
        "offset n (ln p)/2 contradicts a vanishing exponential factor in "
        "the local product representation"
    )
    return CheckResult(10, "local-factor two-side slope", ok, info)


def check_cross_method_tau(
    cutoff: float = 1e5,
    t_max: float = 100.0,
    n_list: tuple[int, ...] = (1, 2, 3),
    checkpoint_pairs: tuple[tuple[float, float], ...] = (
        (1e2, 25.0),
        (3.2e3, 50.0),
        (1e5, 100.0),
    ),
    zeros_list: Optional[zs.ZeroList] = None,
) -> CheckResult:
    """Arithmetic tau_f vs zero-sum tau at level 11: absolute gap within
    max(0.5, combined budgets) at the endpoints, and the gap shrinking
    along matched (X, T) checkpoints."""
    q = mf.eta_product_qexp(11, max(400, int(cutoff)))
    if zeros_list is None:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            zeros_list = zs.find_zeros(q, 11, 1, t_max=t_max, grid=0.25)
    ok = True
    details = []
    for n in n_list:
        rep = li.tau_f_arithmetic(11, n, cutoff, qexp=q)
        zval, _ = zs.tau_from_zeros(zeros_list, n)
        gap = abs(rep.tau - zval)
        budget = rep.budget + zs.zero_tail_estimate(zeros_list, n)
        tol = max(0.5, budget)
        trend = []
        for x_i, t_i in checkpoint_pairs:
            sub = zs.ZeroList(
                source="truncated",
                ordinates=tuple(g for g in zeros_list.ordinates if g <= t_i),
                multiplicities=tuple(
                    m
                    for g, m in zip(
                        zeros_list.ordinates, zeros_list.multiplicities
                    )
                    if g <= t_i
                ),
            )
            v_ar = li.tau_f_arithmetic(11, n, x_i, qexp=q).tau
            v_ze, _ = zs.tau_from_zeros(sub, n)
            trend.append(abs(v_ar - v_ze))
        shrinking = all(a > b for a, b in zip(trend, trend[1:]))
        n_ok = gap <= tol and shrinking
        ok = ok and n_ok
        details.append(
            f"n={n}: gap {gap:.4f} (tol {tol:.3f}), checkpoint gaps "
            + " > ".join(f"{g:.4f}" for g in trend)
        )
    return CheckResult(
        11,
        "cross-method tau at level 11",
        ok,
        f"X = {cutoff:g}, T = {t_max:g}; " + "; ".join(details),
    )


def check_bad_prime_decomposition(
    cutoff: float = 1e4, n_top: int = 10, tol: float = 1e-10
) -> CheckResult:
    q = mf.eta_product_qexp(11, int(cutoff))
    provider = tr.build_b_provider(11, int(cutoff))
    worst = 0.0
    for n in range(1, n_top + 1):
        t_n = li.tau_N_arithmetic(11, n, cutoff, b_provider=provider)
        t_f = li.tau_f_arithmetic(11, n, cutoff, qexp=q)
        bad = li.bad_prime_partial_sum(11, n, cutoff, qexp=q)
        worst = max(worst, abs((t_n.tau - t_f.tau) - bad))
    return CheckResult(
        12,
        "bad-prime decomposition identity",
        worst < tol,
        f"max |(tau_N - tau_f) - bad-prime sum| = {worst:.3e} "
        f"for n <= {n_top} at X = {cutoff:g}",
    )


def check_positivity_report(
    n_max: int = 20, cutoff: float = 1e5, zeros_list: Optional[zs.ZeroList] = None
) -> CheckResult:
    """Exploratory: the arithmetic report must complete with budgets; the
    zero-sourced flags must all be nonnegative."""
    provider = tr.build_b_provider(11, int(cutoff))
    rows = zs.positivity_from_arithmetic(11, n_max, cutoff, b_provider=provider)
    complete = len(rows) == n_max and all(math.isfinite(r.tau) for r in rows)
    if zeros_list is None:
        zeros_list = zs.ZeroList(
            "synthetic-critical-line",
            (6.362614, 8.603540, 10.035509),
            (1, 1, 1),
        )
    zrows = zs.positivity_from_zeros(zeros_list, n_max)
    z_ok = all(r.nonnegative for r in zrows)
    neg = [r.n for r in rows if not r.nonnegative]
    return CheckResult(
        13,
        "positivity report",
        complete and z_ok,
        f"{len(rows)} arithmetic rows at X = {cutoff:g} "
        f"(negative flags at n = {neg if neg else 'none'}, exploratory); "
        f"zero-sourced flags all nonnegative: {z_ok}",
    )


def run_suite(scope: str = "quick", log=print) -> list[CheckResult]:
    """Run every criterion.  quick trims ranges to stay under a minute;
    full uses the spec ranges (minutes)."""
    if scope not in ("quick", "full"):
        raise ValueError(f"scope must be quick or full, got {scope!r}")
    quick = scope == "quick"
    plan: list[tuple[Check, dict]] = [
        (check_identity_dimension, {"n_max": 100} if quick else {}),
        (
            check_degenerate_vanishing,
            {"n_max": 60, "n_max_level1": 200} if quick else {},
        ),
        (
            check_eta_oracle,
            {"n_max": 60, "pp_levels_max": 20, "pp_max": 200} if quick else {},
        ),
        (
            check_integrality_and_convention,
            {"n_max": 40, "eta_n_max": 30} if quick else {},
        ),
        (
            check_deligne_bound,
            {"level_max": 30, "pp_max": 300} if quick else {},
        ),
        (check_newform_recursion, {"n_max": 300} if quick else {}),
        (check_constant_identity, {}),
        (check_transform, {}),
        (check_asymptotic_ratio, {}),
        (
            check_local_factor_slope,
            {"primes": (2,), "k_pairs": 120} if quick else {},
        ),
        (
            check_cross_method_tau,
            {
                "cutoff": 2e3,
                "t_max": 16.0,
                "n_list": (1,),
                "checkpoint_pairs": ((2e2, 8.0), (6e2, 12.0), (2e3, 16.0)),
            }
            if quick
            else {},
        ),
        (check_bad_prime_decomposition, {"cutoff": 2e3} if quick else {}),
        (
            check_positivity_report,
            {"n_max": 5, "cutoff": 2e3} if quick else {},
        ),
    ]
    results = []
    for fn, kwargs in plan:
        res = fn(**kwargs)
        results.append(res)
        log(
            f"{'PASS' if res.passed else 'FAIL'} criterion {res.criterion}: "
            f"{res.name} -- {res.info}"
        )
    return results
