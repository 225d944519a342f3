import math

import pytest

from hecke_li import li
from hecke_li import modforms as mf
from hecke_li import trace as tr
from hecke_li.errors import DomainError


class TestHurwitzTail:
    def test_m2_closed_form(self):
        assert li.hurwitz_tail(2) == pytest.approx(
            math.pi**2 / 2 - 4, abs=1e-14
        )

    def test_large_m_first_term_dominates(self):
        assert li.hurwitz_tail_series(60) / (2 / 3) ** 60 == pytest.approx(
            1.0, rel=1e-10
        )

    def test_dual_methods_agree(self):
        for m in range(2, 51):
            assert abs(li.hurwitz_tail(m) - li.hurwitz_tail_series(m)) < 1e-12

    def test_divergent_domain(self):
        with pytest.raises(DomainError):
            li.hurwitz_tail(1)


class TestBinomialTail:
    def test_n1_empty(self):
        assert li.binomial_tail_term(1, 1) == 0.0

    def test_n2_single_term(self):
        assert li.binomial_tail_term(2, 1) == pytest.approx(
            li.hurwitz_tail(2), abs=1e-12
        )

    def test_resummed_vs_direct(self):
        for n in range(2, 26):
            assert abs(
                li.binomial_tail_term(n) - li.binomial_tail_direct(n)
            ) < 1e-8

    def test_dimension_scaling(self):
        assert li.binomial_tail_term(7, 3) == pytest.approx(
            3 * li.binomial_tail_term(7, 1), rel=1e-14
        )


class TestAsymptoticRatio:
    def test_n2_base(self):
        rows = li.conrey_asymptotic_check([2])
        n, v, ratio = rows[0]
        assert v == pytest.approx(li.hurwitz_tail(2), abs=1e-12)
        assert ratio == pytest.approx(v / (2 * math.log(2)), rel=1e-15)

    def test_band_and_trend(self):
        rows = li.conrey_asymptotic_check([100, 1000, 10000])
        ratios = [r[2] for r in rows]
        assert 0.75 <= ratios[1] <= 1.25
        assert abs(ratios[2] - 1) < abs(ratios[1] - 1) < abs(ratios[0] - 1)


class TestConstantIdentity:
    def test_series_closed_form(self):
        # sum 3/(l(2l+3)) = 8/3 - 2 ln 2; value frozen from the direct
        # 10^6-term summation with tail bracket (test below)
        closed = 8.0 / 3.0 - 2.0 * math.log(2)
        assert closed == pytest.approx(1.2803723055467762, abs=1e-12)
        lhs, rhs = li.constant_identity_511()
        assert abs(lhs - rhs) < 1e-10

    def test_partial_sum_within_tail_bounds(self):
        s = li.series_3_over_l(10**6)
        lo, hi = li.series_3_over_l_tail_bounds(10**6)
        closed = 8.0 / 3.0 - 2.0 * math.log(2)
        assert lo <= closed - s <= hi


@pytest.fixture(scope="module")
def q11():
    return mf.eta_product_qexp(11, 200)


class TestPrimeSum:

    def test_seven_term_hand_sum(self, q11):
        # n = 1, X = 10: m in {2,3,4,5,7,8,9} with B from the eta eigenvalues
        prov = lambda p, k: mf.b_from_eigen(q11, p, k)
        value, marks, budget = li.prime_sum_term(11, 1, 10, prov)
        expected = math.fsum(
            [
                math.log(2) * 2**-1.5 * -2,
                math.log(3) * 3**-1.5 * -1,
                math.log(2) * 4**-1.5 * 0,
                math.log(5) * 5**-1.5 * 1,
                math.log(7) * 7**-1.5 * -2,
                math.log(2) * 8**-1.5 * 4,
                math.log(3) * 9**-1.5 * -5,
            ]
        )
        assert value == expected
        assert budget == pytest.approx(10**-0.5 * math.log(10), rel=1e-15)

    def test_coprime_filter_excludes_level(self, q11):
        prov = lambda p, k: mf.b_from_eigen(q11, p, k)
        with_filter, _, _ = li.prime_sum_term(11, 1, 12, prov, True)
        without, _, _ = li.prime_sum_term(11, 1, 12, prov, False)
        a11 = q11.a(11)
        assert without - with_filter == pytest.approx(
            math.log(11) * 11**-1.5 * a11, abs=1e-15
        )

    def test_checkpoint_count_and_monotone_x(self, q11):
        prov = lambda p, k: mf.b_from_eigen(q11, p, k)
        for want in (3, 6, 9):
            _, marks, _ = li.prime_sum_term(11, 2, 100, prov, checkpoints=want)
            assert len(marks) == want
            xs = [x for x, _ in marks]
            assert xs == sorted(xs) and xs[-1] == 100

    def test_prefix_consistency(self, q11):
        # the checkpoint at X/2 equals a fresh run with cutoff X/2
        prov = lambda p, k: mf.b_from_eigen(q11, p, k)
        full, marks, _ = li.prime_sum_term(11, 3, 64, prov)
        half, _, _ = li.prime_sum_term(11, 3, 32, prov)
        assert marks[-2][1] == half
        assert marks[-1][1] == full

    def test_trace_and_eta_providers_agree(self, q11):
        eta_prov = lambda p, k: mf.b_from_eigen(q11, p, k)
        trace_prov = tr.build_b_provider(11, 200)
        for n in (1, 2, 4):
            a, _, _ = li.prime_sum_term(11, n, 200, eta_prov)
            b, _, _ = li.prime_sum_term(11, n, 200, trace_prov)
            assert abs(a - b) < 1e-12

    def test_index_cap(self, q11):
        prov = lambda p, k: 0
        with pytest.raises(DomainError):
            li.prime_sum_term(11, 65, 10, prov)
        with pytest.raises(DomainError):
            li.prime_sum_term(11, 1, 1.5, prov)


class TestTauAssembly:
    def test_level_one_vanishes(self):
        for n in (1, 2, 3):
            rep = li.tau_N_arithmetic(1, n, 100)
            assert rep.tau == 0.0
            assert rep.term_conductor == 0.0

    def test_level_11_composition(self):
        provider = tr.build_b_provider(11, 1000)
        rep = li.tau_N_arithmetic(11, 1, 1000, b_provider=provider)
        assert rep.term_conductor == pytest.approx(math.log(11) / 2, rel=1e-15)
        assert rep.term_linear == pytest.approx(
            -(math.log(8 * math.pi) + li.EULER_GAMMA - 2), rel=1e-15
        )
        assert rep.term_binomial_tail == 0.0
        assert rep.tau == pytest.approx(
            rep.term_conductor
            - rep.term_prime_sum
            + rep.term_linear
            + rep.term_binomial_tail,
            abs=0,
        )

    def test_newform_variant_constants(self):
        q = mf.eta_product_qexp(11, 1000)
        rep = li.tau_f_arithmetic(11, 1, 1000, qexp=q)
        assert rep.term_conductor == pytest.approx(
            math.log(math.sqrt(11) / (2 * math.pi)) - li.EULER_GAMMA, rel=1e-12
        )
        assert rep.term_linear == pytest.approx(2 - 2 * math.log(2), rel=1e-15)

    def test_bad_prime_decomposition_identity(self):
        q = mf.eta_product_qexp(11, 3000)
        provider = tr.build_b_provider(11, 3000)
        for n in range(1, 11):
            t_n = li.tau_N_arithmetic(11, n, 3000, b_provider=provider).tau
            t_f = li.tau_f_arithmetic(11, n, 3000, qexp=q).tau
            bad = li.bad_prime_partial_sum(11, n, 3000, qexp=q)
            assert abs((t_n - t_f) - bad) < 1e-10

    def test_unsupported_newform_level(self):
        with pytest.raises(DomainError):
            li.tau_f_arithmetic(13, 1, 100)

    def test_json_schema(self):
        rep = li.tau_N_arithmetic(1, 2, 64)
        d = rep.to_json_dict()
        assert set(d) == {
            "level", "n", "cutoff", "terms", "tau", "partial_sums", "budget",
        }
        assert set(d["terms"]) == {
            "conductor", "prime_sum", "linear", "binomial_tail",
        }
        assert all(set(m) == {"X", "value"} for m in d["partial_sums"])

    def test_reproducible_bit_for_bit(self):
        provider = tr.build_b_provider(11, 500)
        a = li.tau_N_arithmetic(11, 3, 500, b_provider=provider)
        b = li.tau_N_arithmetic(11, 3, 500, b_provider=provider)
        assert a == b


class TestTransform:
    def test_unit_cases(self):
        q, cf = li.test_function_transform(1, 1.0)
        assert cf == 1.0
        assert abs(q - 1.0) < 1e-10
        q2, cf2 = li.test_function_transform(2, 2.0)
        assert cf2 == pytest.approx(0.75)
        assert abs(q2 - 0.75) < 1e-10

    def test_quadrature_matches_closed_form(self):
        for n in range(1, 7):
            for s in (2.0, 1 + 1j, 0.5 + 3j):
                q, cf = li.test_function_transform(n, s)
                assert abs(q - cf) < 1e-6

    def test_domain(self):
        with pytest.raises(DomainError):
            li.test_function_transform(1, -1.0 + 0j)
        with pytest.raises(DomainError):
            li.test_function_transform(13, 2.0)
