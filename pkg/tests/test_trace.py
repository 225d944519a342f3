import math
from fractions import Fraction

import pytest

from hecke_li import modforms as mf
from hecke_li import trace as tr
from hecke_li.errors import DomainError, InternalInconsistencyError


class TestTraceAnchors:
    def test_identity_is_genus(self):
        for n in (1, 2, 11, 36, 100, 400):
            assert tr.trace_T(n, 1).total == mf.dim_S2(n)

    def test_level_11_against_eta(self):
        q = mf.eta_product_qexp(11, 120)
        for n in range(1, 121):
            if math.gcd(n, 11) == 1:
                assert tr.trace_T(11, n).total == q.a(n)

    def test_level_11_index_2_breakdown(self):
        t = tr.trace_T(11, 2)
        assert t.total == -2
        assert (t.identity, t.divisor, t.elliptic, t.hyperbolic) == (
            Fraction(0),
            Fraction(3),
            Fraction(3),
            Fraction(2),
        )
        assert t.as_fraction_sum() == t.total

    def test_level_one_vanishes(self):
        for n in range(1, 501):
            assert tr.trace_T(1, n).total == 0

    def test_term_sign_convention(self):
        # identity + divisor - elliptic - hyperbolic = total, exactly
        for (level, n) in ((11, 4), (14, 9), (37, 12), (1, 16)):
            t = tr.trace_T(level, n)
            assert t.as_fraction_sum() == Fraction(t.total)

    def test_bad_index(self):
        with pytest.raises(DomainError):
            tr.trace_T(11, 0)
        with pytest.raises(DomainError):
            tr.trace_T(0, 1)


class TestConventions:
    def test_a_fails_where_b_wins(self):
        # N=4, n=7 separates the two residue-count readings: the elliptic
        # term must make the genus-zero trace vanish
        assert tr.trace_T(4, 7, "B").total == 0
        assert tr.trace_T(4, 7, "A").total != 0

    def test_conventions_coincide_for_coprime_gcd(self):
        for level in (11, 13):
            for n in range(1, 40):
                a = tr.TraceCalculator(level, "A").trace(n).total
                b = tr.TraceCalculator(level, "B").trace(n).total
                assert a == b  # gcd(N, m) = 1 throughout at squarefree small n

    def test_unknown_convention(self):
        with pytest.raises(DomainError):
            tr.TraceCalculator(11, "C")


class TestMuCount:
    def test_scan_example(self):
        # x^2 + 2 = 0 mod 11 has the two roots 3, 8
        assert tr.mu_count(0, 2, 1, 11) == 2
        assert tr.mu_count(0, 2, 1, 11, "A") == 2

    def test_level_one(self):
        assert tr.mu_count(0, 1, 1, 1) == 1

    def test_conventions_equal_when_gcd_one(self):
        for level in range(1, 51):
            for t in range(0, 8):
                for n in (2, 3, 5):
                    if t * t - 4 * n >= 0:
                        continue
                    a = tr.mu_count(t, n, 1, level, "A")
                    b = tr.mu_count(t, n, 1, level, "B")
                    assert a == b

    def test_precondition(self):
        with pytest.raises(DomainError):
            tr.mu_count(0, 2, 3, 11)  # 9 does not divide -8


class TestPrimePower:
    def test_agrees_with_general(self):
        for level in (1, 4, 11, 12, 45, 100):
            calc = tr.get_calculator(level)
            for m, p, k in tr.prime_powers_below(250, coprime_to=level):
                assert calc.trace_prime_power(p, k) == calc.trace(m).total

    def test_eta_value(self):
        assert tr.trace_T_primepower(11, 2, 1) == -2

    def test_level_one_all_vanish(self):
        for k in range(1, 21):
            assert tr.trace_T_primepower(1, 2, k) == 0

    def test_requires_coprime(self):
        with pytest.raises(DomainError):
            tr.trace_T_primepower(11, 11, 2)


class TestBValues:
    def test_b_zero_is_twice_genus(self):
        assert tr.B_value(11, 2, 0).value == 2
        assert tr.B_value(37, 5, 0).value == 4

    def test_b_via_eta_recursion(self):
        # B(11,2,2) = trace(4) - 2 g = a_2^2 - 2*2 = 0
        assert tr.B_value(11, 2, 2).value == 0
        q = mf.eta_product_qexp(11, 3000)
        for m, p, k in tr.prime_powers_below(3000, coprime_to=11):
            assert tr.B_value(11, p, k).value == mf.b_from_eigen(q, p, k)

    def test_deligne_bound_sampled(self):
        for level in (11, 15, 37, 90):
            g = mf.dim_S2(level)
            for m, p, k in tr.prime_powers_below(500, coprime_to=level):
                b = tr.B_value(level, p, k).value
                assert b * b <= 4 * g * g * m

    def test_genus_one_b_recursion(self):
        # at genus one the trace IS the eigenvalue, so the three-term
        # recursion holds for B itself
        for level in (11, 14, 27):
            calc = tr.get_calculator(level)
            for p in (5, 13):
                if level % p == 0:
                    continue
                bs = [calc.b_value(p, k).value for k in range(0, 6)]
                for k in range(1, 5):
                    assert bs[k + 1] == bs[1] * bs[k] - p * bs[k - 1]


class TestTables:
    def test_compute_and_provider(self):
        table = tr.compute_prime_power_traces(11, 100)
        assert table[1] == 1
        prov = tr.TraceBProvider(11, table, 100)
        assert prov(2, 1) == -2
        assert prov(2, 0) == 2
        assert prov(7, 2) == tr.trace_T(11, 49).total - 7 * 1

    def test_provider_horizon(self):
        table = tr.compute_prime_power_traces(11, 50)
        prov = tr.TraceBProvider(11, table, 50)
        from hecke_li.errors import ResourceLimitError

        with pytest.raises(ResourceLimitError, match="precompute"):
            prov(53, 1)

    def test_jobs_reduction_deterministic(self):
        serial = tr.compute_prime_power_traces(11, 400, jobs=1)
        parallel = tr.compute_prime_power_traces(11, 400, jobs=2)
        assert serial == parallel

    def test_csv_round_trip(self, tmp_path):
        table = tr.compute_prime_power_traces(14, 60)
        path = str(tmp_path / "traces.csv")
        tr.save_trace_table_csv(path, 14, table)
        level, loaded = tr.load_trace_table_csv(path)
        assert level == 14 and loaded == table

    def test_json_export(self, tmp_path):
        import json

        table = {1: 1, 2: -2}
        path = str(tmp_path / "t.json")
        tr.export_trace_table_json(path, 11, table)
        assert json.load(open(path)) == [
            {"N": 11, "n": 1, "trace": 1},
            {"N": 11, "n": 2, "trace": -2},
        ]

    def test_precompute_resumable(self, tmp_path):
        cache = str(tmp_path)
        # stop after 3 chunks, then resume to completion
        tr.precompute_traces(11, 300, cache, chunk_count=8, max_chunks_this_run=3)
        final = tr.trace_table_path(11, cache)
        import os

        assert not os.path.exists(final)
        tr.precompute_traces(11, 300, cache, chunk_count=8)
        assert os.path.exists(final)
        level, table = tr.load_trace_table_csv(final)
        assert level == 11
        assert table == tr.compute_prime_power_traces(11, 300)
        # rerun after completion is a no-op (same bytes)
        before = open(final, "rb").read()
        tr.precompute_traces(11, 300, cache, chunk_count=8)
        assert open(final, "rb").read() == before
