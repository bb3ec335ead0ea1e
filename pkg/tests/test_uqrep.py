from fractions import Fraction

import gmpy2
import pytest
from gmpy2 import mpc, mpfr

from podles.linalg import Mat, eigh, norm, numerical_rank, vdot
from podles.qseries import bracket
from podles.uqrep import (as_spin, cg_decompose, dim_of,
                          irange, kernel_coeffs, kernel_vector, op_matrices,
                          rep, spherical_vector, star_intertwiner,
                          validate_R_candidate, weight_eigenbasis)

HALF = Fraction(1, 2)


def relation_residual(r, ctx):
    q = ctx.q
    ident = Mat.identity(r.dim)
    devs = [
        ((r.k @ r.k_inv) - ident).max_abs(),
        ((r.k_inv @ r.k) - ident).max_abs(),
        ((r.k @ r.e) - (r.e @ r.k).scale(q * q)).max_abs(),
        ((r.k @ r.f) - (r.f @ r.k).scale(1 / (q * q))).max_abs(),
        ((r.e @ r.f) - (r.f @ r.e) - (r.k - r.k_inv).scale(1 / (q - 1 / q))).max_abs(),
        ((r.A @ r.D) - ident).max_abs(),
        ((r.D @ r.A) - ident).max_abs(),
        ((r.A @ r.B) - (r.B @ r.A).scale(q)).max_abs(),
        ((r.A @ r.C) - (r.C @ r.A).scale(1 / q)).max_abs(),
        ((r.B @ r.C) - (r.C @ r.B)
         - ((r.A @ r.A) - (r.D @ r.D)).scale(1 / (q - 1 / q))).max_abs(),
        (r.e.dagger() - (r.f @ r.k)).max_abs(),
        (r.B.dagger() - r.C).max_abs(),
    ]
    return max(devs)


class TestSpinRep:
    def test_spin_half_entries(self, ctx):
        # displayed actions at s = 1/2: e xi_{-1/2} = q^(1/2) xi_{1/2},
        # k = diag(q^-1, q) in ascending order
        with ctx.prec:
            r = rep(HALF, ctx)
            q = ctx.q
            assert abs(r.e[1, 0] - gmpy2.sqrt(q) * q ** 0) < ctx.prec.tol_residual
            assert abs(r.e[1, 0] - q ** mpfr("0.5")) < ctx.prec.tol_residual
            assert r.e[0, 1] == 0
            assert abs(r.k[0, 0] - 1 / q) < ctx.prec.tol_residual
            assert abs(r.k[1, 1] - q) < ctx.prec.tol_residual

    def test_trivial_rep(self, ctx):
        with ctx.prec:
            r = rep(0, ctx)
            assert r.k[0, 0] == 1 and r.e[0, 0] == 0 and r.f[0, 0] == 0

    @pytest.mark.parametrize("twice_s", list(range(0, 13)))
    def test_relations_all_spins(self, ctx, twice_s):
        with ctx.prec:
            r = rep(Fraction(twice_s, 2), ctx)
            assert relation_residual(r, ctx) < ctx.prec.tol_residual

    def test_koornwinder_diagonal_after_identification(self, ctx):
        # t^s(A) e_j = q^-j e_j reads A xi_i = q^i xi_i under e_{-i} = xi_i
        with ctx.prec:
            r = rep(1, ctx)
            for m, i in enumerate(irange(1)):
                assert abs(r.A[m, m] - ctx.qpow(i)) < ctx.prec.tol_residual

    def test_spin_validation(self):
        with pytest.raises(ValueError):
            as_spin(Fraction(1, 3))
        with pytest.raises(ValueError):
            as_spin(-1)


class TestOpMatrices:
    def test_spin0_W_is_bracket_a(self, ctx):
        with ctx.prec:
            ops = op_matrices(0, ctx)
            assert abs(ops.W[0, 0] - ctx.bracket_a) < ctx.prec.tol_residual
            assert abs(ops.eps_iBt - ctx.bracket_a) < ctx.prec.tol_residual

    def test_spin_half_W_eigenvalues(self, ctx):
        # oracle: roots of the characteristic polynomial of the 2x2 matrix
        with ctx.prec:
            W = op_matrices(HALF, ctx).W
            tr = (W[0, 0] + W[1, 1]).real
            det = (W[0, 0] * W[1, 1] - W[0, 1] * W[1, 0]).real
            disc = gmpy2.sqrt(tr * tr / 4 - det)
            roots = sorted([tr / 2 - disc, tr / 2 + disc])
            expect = sorted([ctx.bracket_a - 1, ctx.bracket_a + 1])
            for r_, e_ in zip(roots, expect):
                assert abs(r_ - e_) < ctx.prec.tol_residual
            evals, _ = eigh(W)
            for r_, e_ in zip(evals, expect):
                assert abs(r_ - e_) < ctx.prec.tol_residual

    def test_W_hermitian(self, ctx):
        with ctx.prec:
            for s in (HALF, 1, 2):
                W = op_matrices(s, ctx).W
                assert (W - W.dagger()).max_abs() < ctx.prec.tol_residual

    def test_X_matches_independent_assembly(self, ctx):
        # oracle: independent assembly from the A, B, C, D matrices
        with ctx.prec:
            s = HALF
            r = rep(s, ctx)
            qh = gmpy2.sqrt(ctx.q)
            X2 = Mat.zeros(r.dim, r.dim)
            coef = ctx.t / (ctx.q - 1 / ctx.q)
            for i in range(r.dim):
                for j in range(r.dim):
                    X2[i, j] = (mpc(0, 1) * qh * r.B[i, j]
                                - mpc(0, 1) / qh * r.C[i, j]
                                + coef * (r.A[i, j] - r.D[i, j]))
            assert (op_matrices(s, ctx).X - X2).max_abs() == 0

    def test_B_tilde_counit_structure(self, ctx):
        # the displayed elements differ by B~_t - B_t = i [a] (2 - k), and the
        # counits are eps(B~_t) = 0, eps(B_t) = -i [a]
        with ctx.prec:
            s = 1
            ops = op_matrices(s, ctx)
            r = rep(s, ctx)
            diff = ops.B_tilde - ops.B_t
            expect = (Mat.identity(r.dim).scale(2) - r.k).scale(mpc(0, 1) * ctx.bracket_a)
            assert (diff - expect).max_abs() < ctx.prec.tol_residual


class TestKernel:
    @pytest.mark.parametrize("s", [1, 2, 3, 4])
    def test_closed_form_annihilated(self, ctx, s):
        with ctx.prec:
            ops = op_matrices(s, ctx)
            v = kernel_vector(s, ctx)
            assert norm(ops.X.matvec(v)) < ctx.prec.tol_residual

    @pytest.mark.parametrize("s", [1, 2, 3])
    def test_starred_kernel(self, ctx, s):
        with ctx.prec:
            ops = op_matrices(s, ctx)
            v = kernel_vector(s, ctx, starred=True)
            assert norm(ops.X.dagger().matvec(v)) < ctx.prec.tol_residual

    def test_symmetry(self, ctx):
        with ctx.prec:
            for s in (1, 2, 3):
                cs = kernel_coeffs(s, ctx)
                for i in range(len(cs)):
                    assert abs(cs[i] - cs[len(cs) - 1 - i]) < ctx.prec.tol_residual

    def test_top_coefficient_closed_form(self, ctx):
        # c_s = i^s q^(-(s-a)s) q^(s^2/2) / (q^2; q^2)_{2s}^(1/2); the 3phi2
        # with a unit top parameter collapses to 1
        from podles.qseries import q_pochhammer
        with ctx.prec:
            for s in (1, 2, 3):
                cs = kernel_coeffs(s, ctx)
                q2 = ctx.q * ctx.q
                expect = (mpc(0, 1) ** s * ctx.qpow(-(s - ctx.a) * s)
                          * ctx.qpow(mpfr(s * s) / 2)
                          / gmpy2.sqrt(q_pochhammer(q2, q2, 2 * s).real))
                assert abs(cs[-1] - expect) < ctx.prec.tol_residual

    def test_s0_single_coefficient(self, ctx):
        with ctx.prec:
            assert kernel_coeffs(0, ctx) == [mpc(1)]

    def test_half_integer_rejected(self, ctx):
        with pytest.raises(ValueError):
            kernel_coeffs(HALF, ctx)

    @pytest.mark.parametrize("twice_s", list(range(2, 13)))
    def test_rank_deficiency(self, ctx, twice_s):
        # integer spin: kernel dimension exactly 1; half integer: 0
        with ctx.prec:
            s = Fraction(twice_s, 2)
            X = op_matrices(s, ctx).X
            r = numerical_rank(X, ctx.prec.tol_rank)
            expected = dim_of(s) - (1 if s.denominator == 1 else 0)
            assert r == expected


class TestSphericalVectors:
    def test_s0_trivial(self, ctx):
        with ctx.prec:
            for conv in ("left", "right"):
                v = spherical_vector(0, conv, ctx)
                assert len(v) == 1 and abs(v[0] - 1) < ctx.prec.tol_residual

    def test_left_equals_twisted_nullvector(self, ctx):
        # invariant: left vector = normalize(pi(k^(1/2)) nullvector(X*)) up to phase
        from podles.linalg import rank_one_nullvector
        with ctx.prec:
            for s in (1, 2, 3):
                ops = op_matrices(s, ctx)
                nv = rank_one_nullvector(ops.X.dagger(), ctx.prec.tol_rank)
                tw = [ctx.qpow(i) * x for i, x in zip(irange(s), nv)]
                tw = [x / norm(tw) for x in tw]
                got = spherical_vector(s, "left", ctx)
                ov = abs(vdot(got, tw))
                assert abs(ov - 1) < ctx.prec.tol_residual

    def test_right_s1_components(self, ctx):
        # oracle: nullspace of pi_1(e - f k), expected direction xi_1 + q xi_-1
        with ctx.prec:
            v = spherical_vector(1, "right", ctx)
            q = ctx.q
            nrm = gmpy2.sqrt(1 + q * q)
            assert abs(v[2] - 1 / nrm) < ctx.prec.tol_rank
            assert abs(v[0] - q / nrm) < ctx.prec.tol_rank
            assert abs(v[1]) < ctx.prec.tol_rank

    def test_right_eigen_property(self, ctx):
        with ctx.prec:
            for s in (1, 2, 3):
                W = op_matrices(s, ctx).W
                v = spherical_vector(s, "right", ctx)
                resid = norm([a - ctx.bracket_a * b for a, b in zip(W.matvec(v), v)])
                assert resid < ctx.prec.tol_residual * 100

    def test_left_s1_against_display_conjugate(self, ctx):
        # the printed n = 1 display and the kernel-chain vector are complex
        # conjugates of one another; the chain vector is what the closed-form
        # machinery produces (see the acceptance suite for the literal check)
        with ctx.prec:
            v = spherical_vector(1, "left", ctx)
            q = ctx.q
            disp = [1 / gmpy2.sqrt(q),
                    -mpc(0, 1) * ctx.t / gmpy2.sqrt(q + 1 / q),
                    gmpy2.sqrt(q)]
            nrm = norm(disp)
            disp = [x / nrm for x in disp]
            conj_dev = max(abs(a - b.conjugate()) for a, b in zip(v, disp))
            assert conj_dev < ctx.prec.tol_residual * 10


class TestWeightEigenbasis:
    def test_s0(self, ctx):
        with ctx.prec:
            evals, V = weight_eigenbasis(0, ctx)
            assert abs(evals[0] - ctx.bracket_a) < ctx.prec.tol_residual
            assert abs(V[0, 0] - 1) < ctx.prec.tol_residual

    @pytest.mark.parametrize("s", [1, 2, 3, 4])
    def test_spectrum_symmetric_about_bracket_a(self, ctx, s):
        with ctx.prec:
            evals, _ = weight_eigenbasis(s, ctx)
            shifted = [e - ctx.bracket_a for e in evals]
            for x, y in zip(shifted, reversed(shifted)):
                assert abs(x + y) < ctx.prec.tol_residual * 100
            assert sum(1 for e in shifted if abs(e) < ctx.prec.tol_rank) == 1

    def test_half_integer_rejected(self, ctx):
        with pytest.raises(ValueError):
            weight_eigenbasis(HALF, ctx)


class TestCG:
    def test_zero_times_m_is_identity(self, ctx):
        with ctx.prec:
            cg = cg_decompose(0, Fraction(3, 2), ctx)
            W = cg.isometries[Fraction(3, 2)]
            assert (W - Mat.identity(4)).max_abs() < ctx.prec.tol_residual

    def test_half_half_dimensions(self, ctx):
        with ctx.prec:
            cg = cg_decompose(HALF, HALF, ctx)
            assert cg.spins() == [Fraction(0), Fraction(1)]
            assert cg.isometries[Fraction(0)].shape() == (4, 1)
            assert cg.isometries[Fraction(1)].shape() == (4, 3)

    @pytest.mark.parametrize("nm", [(HALF, HALF), (1, 1), (1, 2),
                                    (Fraction(3, 2), Fraction(3, 2)), (2, 3), (3, 3)])
    def test_isometry_completeness_intertwining(self, ctx, nm):
        n, m = nm
        with ctx.prec:
            cg = cg_decompose(n, m, ctx)
            rn, rm = rep(n, ctx), rep(m, ctx)
            dn, dm = rn.dim, rm.dim

            def kron(A, B):
                out = Mat.zeros(dn * dm, dn * dm)
                for i1 in range(dn):
                    for j1 in range(dn):
                        if A[i1, j1] == 0:
                            continue
                        for i2 in range(dm):
                            for j2 in range(dm):
                                out[i1 * dm + i2, j1 * dm + j2] = A[i1, j1] * B[i2, j2]
                return out

            DK = kron(rn.k, rm.k)
            DE = kron(rn.e, Mat.identity(dm)) + kron(rn.k, rm.e)
            DF = kron(Mat.identity(dn), rm.f) + kron(rn.f, rm.k_inv)
            comp = Mat.zeros(dn * dm, dn * dm)
            for k, W in cg.isometries.items():
                rk = rep(k, ctx)
                assert ((W.dagger() @ W) - Mat.identity(rk.dim)).max_abs() \
                    < ctx.prec.tol_residual
                for D, g in ((DK, rk.k), (DE, rk.e), (DF, rk.f)):
                    assert ((D @ W) - (W @ g)).max_abs() < ctx.prec.tol_residual
                comp = comp + (W @ W.dagger())
            assert (comp - Mat.identity(dn * dm)).max_abs() < ctx.prec.tol_residual


class TestStarIntertwiner:
    def test_s0(self, ctx):
        with ctx.prec:
            G = star_intertwiner(0, ctx)
            assert abs(G[0, 0] - 1) < ctx.prec.tol_residual

    @pytest.mark.parametrize("s", [HALF, 1, 2])
    def test_intertwining_residual(self, ctx, s):
        with ctx.prec:
            r = rep(s, ctx)
            G = star_intertwiner(s, ctx)
            checks = ((r.k_inv, r.k),
                      ((r.k_inv @ r.e).scale(-1), r.e),
                      ((r.f @ r.k).scale(-1), r.f))
            for Sh, h in checks:
                assert ((Sh.transpose() @ G) - (G @ h)).max_abs() \
                    < ctx.prec.tol_residual

    def test_normalization(self, ctx):
        with ctx.prec:
            G = star_intertwiner(2, ctx)
            assert abs(G.max_abs() - 1) < ctx.prec.tol_residual


class TestRCandidate:
    def test_s0_report_well_defined(self, ctx):
        with ctx.prec:
            rep_ = validate_R_candidate(0, ctx)
            assert "residual_identity_S" in rep_

    def test_spin_half_spectrum_discrepancy_recorded(self, ctx):
        # the candidate spectra disagree with the [a+2i] reference labels at
        # generic (q, a); the report must expose that rather than hide it
        with ctx.prec:
            rep_ = validate_R_candidate(HALF, ctx)
            dev = rep_["spectrum_vs_reference_S"]
            assert dev is not None and dev > ctx.prec.tol_rank

    def test_s1_both_sign_variants_present(self, ctx):
        with ctx.prec:
            rep_ = validate_R_candidate(1, ctx)
            for tag in ("S", "S_inv"):
                assert f"residual_identity_{tag}" in rep_
                assert f"residual_identity_flipped_{tag}" in rep_
