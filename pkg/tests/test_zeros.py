import math
import warnings

import mpmath
import pytest
from scipy.integrate import quad
from scipy.special import gamma as scipy_gamma

from hecke_li import modforms as mf
from hecke_li import zeros as zs
from hecke_li.errors import (
    DomainError,
    ResourceLimitError,
    ZeroFileParseError,
)


@pytest.fixture(scope="module")
def q400():
    return mf.eta_product_qexp(11, 400)


@pytest.fixture(scope="module")
def small_zeros(q400):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return zs.find_zeros(q400, 11, 1, t_max=12.0, grid=0.25)


class TestZeroFiles:
    def test_two_ordinates(self, tmp_path):
        p = tmp_path / "z.txt"
        p.write_text("6.3620\n8.6083\n")
        zl = zs.load_zeros(str(p))
        assert zl.ordinates == (6.3620, 8.6083)
        assert zl.multiplicities == (1, 1)
        assert zl.central_multiplicity == 0

    def test_comments_and_header(self, tmp_path):
        p = tmp_path / "z.txt"
        p.write_text("# a comment\ncentral=2\n1.5\n\n# more\n2.5\n")
        zl = zs.load_zeros(str(p))
        assert zl.ordinates == (1.5, 2.5)
        assert zl.central_multiplicity == 2

    def test_empty_file_gives_zero_sums(self, tmp_path):
        p = tmp_path / "empty.txt"
        p.write_text("")
        zl = zs.load_zeros(str(p))
        assert zl.ordinates == ()
        value, pairs = zs.tau_from_zeros(zl, 3)
        assert value == 0.0 and pairs == []

    @pytest.mark.parametrize(
        "content,fragment",
        [
            ("1.5\nxyz\n", "not a number"),
            ("2.5\n1.5\n", "not ascending"),
            ("-1.0\n", "not positive"),
            ("central=q\n", "bad header"),
        ],
    )
    def test_parse_errors_carry_line_numbers(self, tmp_path, content, fragment):
        p = tmp_path / "bad.txt"
        p.write_text(content)
        with pytest.raises(ZeroFileParseError, match=fragment):
            zs.load_zeros(str(p))

    def test_unknown_plane(self, tmp_path):
        p = tmp_path / "z.txt"
        p.write_text("1.0\n")
        with pytest.raises(DomainError):
            zs.load_zeros(str(p), plane="other")


class TestTauFromZeros:
    def test_conventions_agree_exactly(self):
        zl = zs.ZeroList("t", (2.0, 5.5, 9.25), (1, 2, 1))
        for n in (1, 2, 7, 16):
            a, _ = zs.tau_from_zeros(zl, n, "plus")
            b, _ = zs.tau_from_zeros(zl, n, "minus")
            assert a == b

    def test_pair_terms_in_unit_range(self):
        zl = zs.ZeroList("t", tuple(float(k) for k in range(1, 40)), (1,) * 39)
        for n in (1, 3, 10):
            _, pairs = zs.tau_from_zeros(zl, n)
            assert all(0.0 <= v <= 4.0 for _, v in pairs)

    def test_central_zero_parity(self):
        zl = zs.ZeroList("t", (), (), central_multiplicity=3)
        assert zs.tau_from_zeros(zl, 1)[0] == 6.0  # 3 * (1 - (-1))
        assert zs.tau_from_zeros(zl, 2)[0] == 0.0

    def test_explicit_pair_value(self):
        # rho = 1/2 + i gamma, n = 1: pair term is 1/(gamma^2 + 1/4)
        g = 6.362614
        zl = zs.ZeroList("t", (g,), (1,))
        v, _ = zs.tau_from_zeros(zl, 1)
        assert v == pytest.approx(1.0 / (g * g + 0.25), rel=1e-12)

    def test_report_fields(self):
        zl = zs.ZeroList("somewhere", (3.0,), (1,))
        rep = zs.tau_zeros_report(zl, 2)
        assert set(rep) == {
            "source", "n", "partial_value", "pairs_used", "tail_note",
        }
        assert rep["pairs_used"] == 1

    def test_partial_sums_monotone_in_t(self, small_zeros):
        # pair terms are nonnegative on the line, so prefixes increase
        for n in (1, 2, 5):
            prev = -1.0
            for k in range(len(small_zeros.ordinates) + 1):
                sub = zs.ZeroList(
                    "prefix",
                    small_zeros.ordinates[:k],
                    small_zeros.multiplicities[:k],
                )
                v, _ = zs.tau_from_zeros(sub, n)
                assert v >= prev
                prev = v


class TestIncompleteGamma:
    def test_s_equals_one(self):
        for x in (0.1, 1.0, 5.0, 40.0):
            assert zs.incomplete_gamma_upper(1.0, x) == pytest.approx(
                math.exp(-x), rel=1e-10
            )

    def test_small_x_limit_is_gamma(self):
        # the deficit from the full gamma is the lower tail, first term
        # x^s/s, which dominates the allowed discrepancy
        x = 1e-8
        for s in (0.7, 2.0, 3.5 + 1j):
            got = zs.incomplete_gamma_upper(s, x)
            deficit = 2 * x ** complex(s).real / abs(complex(s))
            assert got == pytest.approx(
                complex(scipy_gamma(s)), abs=max(deficit, 1e-10)
            )

    def test_half_one_against_quadrature(self):
        # frozen from the quadrature oracle below
        val = zs.incomplete_gamma_upper(0.5, 1.0)
        assert val.real == pytest.approx(0.2788055852949344, abs=1e-10)
        oracle, err = quad(lambda t: t**-0.5 * math.exp(-t), 1.0, 200.0)
        assert val.real == pytest.approx(oracle, abs=max(1e-10, 10 * err))

    def test_against_mpmath_across_regimes(self):
        with mpmath.workdps(30):
            for s in (1 + 100j, 2 - 50j, 0.5 + 3j, 7.0):
                for x in (0.3, 5.0, 90.0, 110.0, 250.0):
                    mine = zs.incomplete_gamma_upper(s, x)
                    ref = complex(mpmath.gammainc(mpmath.mpmathify(s), x, mpmath.inf))
                    assert mine == pytest.approx(ref, rel=1e-9)

    def test_domain(self):
        with pytest.raises(DomainError):
            zs.incomplete_gamma_upper(1.0, 0.0)
        with pytest.raises(DomainError):
            zs.incomplete_gamma_upper(2000.0, 1.0)


class TestCompletedL:
    def test_sign_detection(self, q400):
        assert zs.detect_sign(q400, 11) == 1

    def test_central_value_positive(self, q400):
        v = zs.completed_L(q400, 11, 1, 1.0)
        assert v.value.real > 0
        assert abs(v.value.imag) <= v.truncation_error

    def test_real_on_critical_line(self, q400):
        for t in (0.5, 3.25, 11.0):
            v = zs.completed_L(q400, 11, 1, complex(1.0, t))
            assert abs(v.value.imag) <= max(v.truncation_error, 1e-25)

    def test_functional_equation_residual_grid(self, q400):
        import random

        rng = random.Random(7)
        for _ in range(20):
            s = complex(rng.uniform(1.0, 1.5), rng.uniform(-20, 20))
            a = zs.completed_L(q400, 11, 1, s)
            b = zs.completed_L(q400, 11, 1, 2 - s)
            assert abs(a.value - b.value) <= 10 * max(
                a.truncation_error, 1e-30
            )

    def test_insufficient_coefficients(self):
        q = mf.eta_product_qexp(11, 10)
        with pytest.raises(ResourceLimitError, match="coefficients"):
            zs.completed_L(q, 11, 1, complex(1, 5.0))

    def test_bad_sign_argument(self, q400):
        with pytest.raises(DomainError):
            zs.completed_L(q400, 11, 2, 1.0)


class TestFindZeros:
    def test_first_ordinate_bracket(self, small_zeros):
        assert 5.0 < small_zeros.ordinates[0] < 8.0
        # residual at the reported ordinate is far below the spec gate
        assert small_zeros.source.startswith("internal-finder")

    def test_residual_below_gate(self, q400, small_zeros):
        for g in small_zeros.ordinates[:2]:
            v = zs.completed_L(q400, 11, 1, complex(1.0, g))
            assert abs(v.value) < 1e-6

    def test_count_nondecreasing_in_t(self, q400, small_zeros):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            shorter = zs.find_zeros(
                q400, 11, 1, t_max=9.0, grid=0.25, check_count=False
            )
        assert len(shorter.ordinates) <= len(small_zeros.ordinates)
        assert shorter.ordinates == small_zeros.ordinates[: len(shorter.ordinates)]

    def test_grid_refinement_agreement(self, q400, small_zeros):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            fine = zs.find_zeros(
                q400, 11, 1, t_max=12.0, grid=0.1, check_count=False
            )
        assert len(fine.ordinates) == len(small_zeros.ordinates)
        for a, b in zip(fine.ordinates, small_zeros.ordinates):
            assert abs(a - b) < 1e-5

    def test_limits(self, q400):
        with pytest.raises(DomainError):
            zs.find_zeros(q400, 11, 1, t_max=121.0)
        with pytest.raises(DomainError):
            zs.find_zeros(q400, 11, 1, t_max=10.0, grid=0.3)


class TestLocalFactors:
    def test_prime_side_alpha_one(self):
        assert zs.local_prime_side(2, 1.0, 1).real == pytest.approx(
            math.log(2), abs=1e-12
        )
        assert zs.local_prime_side(3, 1.0, 1).real == pytest.approx(
            math.log(3) / 2, abs=1e-12
        )

    def test_prime_side_alpha_zero(self):
        assert zs.local_prime_side(5, 0.0, 3) == 0.0

    def test_zero_side_closed_form(self):
        # sum over all pair zeros at alpha=1, n=1 has the closed form
        # (L/2) coth(L/2); frozen value for p = 2 is (3/2) ln 2
        assert zs.coth_pair_sum(2) == pytest.approx(1.5 * math.log(2), rel=1e-12)
        _, extrap = zs.local_zero_side(2, 1.0, 1, 300)
        assert extrap == pytest.approx(zs.coth_pair_sum(2), abs=5e-6)

    def test_partial_monotone_in_k(self):
        vals = [zs.local_zero_side(2, 1.0, 1, k)[0] for k in (10, 20, 40, 80)]
        assert vals == sorted(vals)

    def test_two_side_offset_is_linear_in_n(self):
        import numpy as np

        diffs = []
        for n in range(1, 7):
            ps = zs.local_prime_side(2, 1.0, n).real
            _, zext = zs.local_zero_side(2, 1.0, n, 250)
            diffs.append(zext - ps)
        ns = np.arange(1, 7, dtype=float)
        a = np.vstack([ns, np.ones_like(ns)]).T
        (slope, _), res, *_ = np.linalg.lstsq(a, np.array(diffs), rcond=None)
        assert slope == pytest.approx(math.log(2) / 2, rel=0.02)

    def test_domain_checks(self):
        with pytest.raises(DomainError):
            zs.local_prime_side(2, 1.5, 1)
        with pytest.raises(DomainError):
            zs.local_zero_side(2, 0.5, 1, 50)
        with pytest.raises(DomainError):
            zs.local_zero_side(2, 1.0, 1, 5)


class TestPositivity:
    def test_zero_sourced_always_nonnegative(self, small_zeros):
        rows = zs.positivity_from_zeros(small_zeros, 20)
        assert len(rows) == 20
        assert all(r.nonnegative for r in rows)

    def test_single_row(self, small_zeros):
        rows = zs.positivity_from_zeros(small_zeros, 1)
        assert len(rows) == 1 and rows[0].n == 1

    def test_arithmetic_rows_complete(self):
        rows = zs.positivity_from_arithmetic(11, 4, 500)
        assert len(rows) == 4
        assert all(math.isfinite(r.tau) and r.budget > 0 for r in rows)

    def test_bounds(self, small_zeros):
        with pytest.raises(DomainError):
            zs.positivity_from_zeros(small_zeros, 65)
