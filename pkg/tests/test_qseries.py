import gmpy2
import pytest
from gmpy2 import mpc, mpfr
from hypothesis import given, settings
from hypothesis import strategies as st

from podles.precision import PrecisionContext
from podles.qseries import (NonTerminatingSeriesError, Polynomial, QContext,
                            askey_wilson, basic_hypergeometric, bracket,
                            fourier_to_chebyshev, q_pochhammer,
                            q_pochhammer_infinite, theta_grid)


@pytest.fixture(scope="module")
def qc():
    return QContext("0.5", "0.3")


class TestBrackets:
    def test_square_zero(self, qc):
        with qc.prec:
            assert bracket("square", 0, qc) == 0

    def test_square_one(self, qc):
        with qc.prec:
            assert abs(bracket("square", 1, qc) - 1) < qc.prec.tol_residual

    def test_square_two_factorizes(self, qc):
        with qc.prec:
            expect = qc.q + 1 / qc.q
            assert abs(bracket("square", 2, qc) - expect) < qc.prec.tol_residual

    def test_double_and_curly(self, qc):
        with qc.prec:
            x = mpfr("0.7")
            qx = qc.qpow(x)
            assert bracket("double", x, qc) == qx - 1 / qx
            assert bracket("curly", x, qc) == qx + 1 / qx

    def test_derived_context_scalars(self, qc):
        with qc.prec:
            assert abs(qc.t - (qc.qpow(qc.a) - qc.qpow(-qc.a))) < qc.prec.tol_residual
            assert abs(qc.bracket_a - qc.t / (qc.q - 1 / qc.q)) < qc.prec.tol_residual
            assert abs(qc.cprime - qc.t ** 2 / (qc.q + 1 / qc.q)) < qc.prec.tol_residual
            assert qc.kappa > 0

    def test_q_range_enforced(self):
        with pytest.raises(ValueError):
            QContext("1.5", "0.3")


class TestPochhammer:
    def test_empty_product(self, qc):
        with qc.prec:
            assert q_pochhammer(mpc("0.37"), qc.q, 0) == 1

    def test_single_factor(self, qc):
        with qc.prec:
            b = mpc(mpfr("0.37"), mpfr("0.2"))
            assert q_pochhammer(b, qc.q, 1) == 1 - b

    def test_zero_argument_infinite(self, qc):
        with qc.prec:
            assert q_pochhammer(mpc(0), qc.q) == 1

    def test_infinite_reports_truncation_index(self, qc):
        with qc.prec:
            val, idx = q_pochhammer_infinite(mpc("0.3"), qc.q)
            assert idx > 0
            # error bounded by the first omitted factor
            assert abs(mpfr("0.3") * qc.q ** idx) < mpfr(2) ** -qc.prec.bits

    def test_infinite_needs_base_below_one(self, qc):
        with qc.prec:
            with pytest.raises(ValueError):
                q_pochhammer(mpc("0.3"), mpfr("1.5"))

    @settings(max_examples=20, deadline=None)
    @given(st.integers(min_value=0, max_value=32),
           st.floats(min_value=-2, max_value=2, allow_nan=False),
           st.floats(min_value=-1, max_value=1, allow_nan=False))
    def test_defining_ratio(self, n, br, bi):
        qc = QContext("0.5", "0.3")
        with qc.prec:
            b = mpc(mpfr(br), mpfr(bi))
            lhs = q_pochhammer(b, qc.q, n) * q_pochhammer(b * qc.q ** n, qc.q)
            rhs = q_pochhammer(b, qc.q)
            assert abs(lhs - rhs) < qc.prec.tol_residual * (1 + abs(rhs))


class TestBasicHypergeometric:
    def test_unit_parameter_collapses(self, qc):
        # a numerator parameter equal to 1 kills every term past i = 0
        with qc.prec:
            val = basic_hypergeometric([mpfr(1), mpfr(2), mpfr(3)],
                                       [mpfr(5), mpfr(7)], qc.q, mpc(11))
            assert val == 1

    def test_degenerate_all_units(self, qc):
        with qc.prec:
            val = basic_hypergeometric([mpfr(1), mpfr(1), mpfr(1)],
                                       [mpfr(2), mpfr(3)], qc.q, mpc("0.9"))
            assert val == 1

    def test_two_term_sum_against_direct_summation(self, qc):
        # oracle: independent term-by-term summation at 4x precision
        with qc.prec:
            base = qc.q
            num = [1 / base, mpfr("0.25")]
            den = [mpfr("0.75")]
            z = mpc(mpfr("0.6"), mpfr("0.1"))
            got = basic_hypergeometric(num, den, base, z)
        hi = PrecisionContext(bits=4 * qc.prec.bits)
        with hi:
            term1 = (1 - 1 / mpfr("0.5")) * (1 - mpfr("0.25"))
            term1 = term1 * mpc(mpfr("0.6"), mpfr("0.1"))
            term1 = term1 / ((1 - mpfr("0.75")) * (1 - mpfr("0.5")))
            expect = 1 + term1
            assert abs(got - expect) < mpfr(2) ** -(qc.prec.bits - 8)

    def test_non_terminating_rejected(self, qc):
        with qc.prec:
            with pytest.raises(NonTerminatingSeriesError):
                basic_hypergeometric([mpfr("0.3"), mpfr("0.4")], [mpfr("0.5")],
                                     qc.q, mpc(1))

    def test_parameter_count(self, qc):
        with qc.prec:
            with pytest.raises(ValueError):
                basic_hypergeometric([mpfr(1)], [mpfr(2)], qc.q, mpc(1))


class TestAskeyWilson:
    def test_n0_is_one(self, qc):
        with qc.prec:
            for x in (mpfr(-1), mpfr("0.3"), mpfr(2)):
                assert askey_wilson(0, x, qc) == 1

    def test_n1_two_term_expansion(self, qc):
        # oracle: the k = 0, 1 terms written out independently at 4x precision
        with qc.prec:
            got = askey_wilson(1, mpfr(1), qc)
        hi = PrecisionContext(bits=4 * qc.prec.bits)
        with hi:
            q = mpfr("0.5")
            a = mpfr("0.3")
            q2 = q * q
            u = -(q ** (-2 * a + 1))
            b = -(q ** (-2 * a + 2))
            pref = u ** -1 * (1 - q2) * (1 - b) ** 2
            term1 = q2 * (1 - q ** -2) * (1 - q ** 4) * (1 - 2 * u + u * u)
            term1 /= (1 - q2) ** 2 * (1 - b) ** 2
            expect = pref * (1 + term1)
            assert abs(got - expect) < mpfr(2) ** -(qc.prec.bits - 8)

    @pytest.mark.parametrize("n", [1, 2, 4, 6])
    def test_degree_n_polynomial(self, qc, n):
        # fit n+1 samples, then check on a disjoint grid
        from podles.linalg import Mat, solve
        with qc.prec:
            nodes = [gmpy2.cos(t) for t in theta_grid(n + 1)]
            V = Mat.from_entries([[x ** k for k in range(n + 1)] for x in nodes])
            coef = solve(V, [mpc(askey_wilson(n, x, qc)) for x in nodes])
            P = Polynomial(coef)
            for t in theta_grid(17):
                x = gmpy2.cos(t)
                ref = askey_wilson(n, x, qc)
                assert abs(P(x).real - ref) < qc.prec.tol_residual * (1 + abs(ref))


class TestFourierToChebyshev:
    def test_constant(self, qc):
        with qc.prec:
            P = fourier_to_chebyshev([mpfr(1)])
            assert P.degree == 0 and P.coeffs[0] == 1

    def test_first_harmonic(self, qc):
        with qc.prec:
            P = fourier_to_chebyshev([mpfr(0), mpfr(1)])
            assert P.degree == 1
            assert P.coeffs[0] == 0 and P.coeffs[1] == 2

    def test_second_harmonic_brute_force_grid(self, qc):
        # oracle: direct trigonometric sums on a 64 point grid
        with qc.prec:
            P = fourier_to_chebyshev([mpfr(0), mpfr(0), mpfr(1)])
            assert [c.real for c in P.coeffs] == [-2, 0, 4]
            for t in theta_grid(64):
                lhs = P(gmpy2.cos(t)).real
                rhs = 2 * gmpy2.cos(2 * t)
                assert abs(lhs - rhs) < qc.prec.tol_residual

    def test_general_profile_on_grid(self, qc):
        with qc.prec:
            cs = [mpfr("0.3"), mpfr("0.1"), mpfr("0.7"), mpfr("0.2")]
            P = fourier_to_chebyshev(cs)
            for t in theta_grid(64):
                rhs = cs[0] + 2 * sum(cs[i] * gmpy2.cos(i * t) for i in range(1, 4))
                assert abs(P(gmpy2.cos(t)).real - rhs) < qc.prec.tol_residual


class TestPolynomialOps:
    def test_derivative_constant(self, qc):
        with qc.prec:
            assert Polynomial([mpfr(1)]).derivative().coeffs == [mpc(0)]

    def test_derivative_square_at_one(self, qc):
        with qc.prec:
            P = Polynomial([0, 0, 1])
            assert P.derivative()(1) == 2

    def test_affine_compose_linear(self, qc):
        with qc.prec:
            P = Polynomial([0, 1])
            Q = P.affine_compose(mpfr("0.5"), mpfr("0.25"))
            assert Q.coeffs[0] == mpfr("0.25") and Q.coeffs[1] == mpfr("0.5")

    def test_affine_compose_matches_pointwise(self, qc):
        with qc.prec:
            P = Polynomial([1, -2, 3, mpfr("0.5")])
            al, be = mpfr("0.7"), mpfr("-0.2")
            Q = P.affine_compose(al, be)
            for x in (mpfr("0.1"), mpfr("1.4"), mpfr("-2.3")):
                assert abs(Q(x) - P(al * x + be)) < qc.prec.tol_residual
