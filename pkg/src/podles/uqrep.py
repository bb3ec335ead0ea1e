"""Finite dimensional representations of U_q(su(2)) and of Koornwinder's
four generator presentation, the distinguished coideal elements, spherical
and weight vectors, Clebsch-Gordan isometries and the star intertwiner.

Basis conventions.  Each spin-s space carries the orthonormal basis xi_i,
i = -s..s in ascending order (row/column m corresponds to i = m - s).  The
four generator presentation acts on e_i with e_{-i} identified with xi_i;
all matrices below are expressed in the xi basis after that identification.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpc, mpfr

from .linalg import (Mat, eigh, fix_phase, norm, normalize, nullspace,
                     rank_one_nullvector, singular_values, vdot)
from .precision import I, FalsificationError, PrecisionError, to_real
from .qseries import QContext, basic_hypergeometric, bracket, q_pochhammer


def as_spin(s) -> Fraction:
    """Normalize a spin label to an exact nonnegative half-integer Fraction."""
    f = Fraction(s)
    if f.denominator not in (1, 2) or f < 0:
        raise ValueError(f"spin must be a nonnegative half-integer, got {s}")
    return f


def dim_of(s) -> int:
    return int(2 * as_spin(s)) + 1


def irange(s) -> list:
    """Weights -s..s ascending, as exact Fractions."""
    s = as_spin(s)
    return [Fraction(-s) + m for m in range(dim_of(s))]


@dataclass(frozen=True)
class SpinRep:
    """Generator matrices of the spin-s representation in both presentations."""

    s: Fraction
    k: Mat
    k_inv: Mat
    e: Mat
    f: Mat
    A: Mat
    B: Mat
    C: Mat
    D: Mat

    @property
    def dim(self) -> int:
        return int(2 * self.s) + 1

    def matrix(self, name: str) -> Mat:
        return getattr(self, {"k": "k", "k_inv": "k_inv", "e": "e", "f": "f",
                              "A": "A", "B": "B", "C": "C", "D": "D"}[name])


_rep_cache: dict = {}
_cache_lock = threading.Lock()


def _cached(cache_key, builder):
    with _cache_lock:
        if cache_key in _rep_cache:
            return _rep_cache[cache_key]
    value = builder()
    with _cache_lock:
        return _rep_cache.setdefault(cache_key, value)


def _key(ctx: QContext, *extra):
    return (ctx.prec.bits, str(ctx.q), str(ctx.a)) + extra


def rep(s, ctx: QContext) -> SpinRep:
    """The spin-s *-representation with pi(k) xi_i = q^(2i) xi_i and the
    standard raising/lowering amplitudes; Koornwinder's A, B, C, D follow by
    the identification e_{-i} = xi_i."""
    s = as_spin(s)
    return _cached(_key(ctx, "rep", s), lambda: _build_rep(s, ctx))


def _build_rep(s: Fraction, ctx: QContext) -> SpinRep:
    with ctx.prec:
        d = dim_of(s)
        q = ctx.q
        K = Mat.zeros(d, d)
        Kinv = Mat.zeros(d, d)
        E = Mat.zeros(d, d)
        F = Mat.zeros(d, d)
        A = Mat.zeros(d, d)
        B = Mat.zeros(d, d)
        C = Mat.zeros(d, d)
        D = Mat.zeros(d, d)
        for m in range(d):
            i = Fraction(-s) + m
            K[m, m] = ctx.qpow(2 * i)
            Kinv[m, m] = ctx.qpow(-2 * i)
            A[m, m] = ctx.qpow(i)
            D[m, m] = ctx.qpow(-i)
            if m + 1 < d:
                amp = gmpy2.sqrt(bracket("square", s - i, ctx) * bracket("square", s + i + 1, ctx))
                E[m + 1, m] = ctx.qpow(i + 1) * amp
                B[m + 1, m] = amp
            if m - 1 >= 0:
                amp = gmpy2.sqrt(bracket("square", s + i, ctx) * bracket("square", s - i + 1, ctx))
                F[m - 1, m] = ctx.qpow(-i) * amp
                C[m - 1, m] = amp
        return SpinRep(s=s, k=K, k_inv=Kinv, e=E, f=F, A=A, B=B, C=C, D=D)


# ---------------------------------------------------------------------------
# distinguished operators


@dataclass(frozen=True)
class CoidealOperators:
    """Matrices of B_t, B~_t, X_{-a} and W = i pi(B_t) on the spin-s space,
    together with the scalar epsilon(i B_t) = [a]."""

    s: Fraction
    B_t: Mat
    B_tilde: Mat
    X: Mat
    W: Mat
    eps_iBt: mpfr


def op_matrices(s, ctx: QContext) -> CoidealOperators:
    s = as_spin(s)
    return _cached(_key(ctx, "ops", s), lambda: _build_ops(s, ctx))


def _build_ops(s: Fraction, ctx: QContext) -> CoidealOperators:
    with ctx.prec:
        r = rep(s, ctx)
        d = r.dim
        q = ctx.q
        qh = gmpy2.sqrt(q)
        t = ctx.t
        coef = t / (q - 1 / q)  # equals [a]
        ident = Mat.identity(d)
        EFK = r.e - (r.f @ r.k)
        B_t = EFK.scale(1 / qh) + ident.scale(-I * coef)
        B_tilde = EFK.scale(1 / qh) + r.k.scale(-I * coef) + ident.scale(I * coef)
        X = r.B.scale(I * qh) + r.C.scale(-I / qh) + (r.A - r.D).scale(coef)
        W = B_t.scale(I)
        return CoidealOperators(s=s, B_t=B_t, B_tilde=B_tilde, X=X, W=W,
                                eps_iBt=ctx.bracket_a)


# ---------------------------------------------------------------------------
# kernel coefficients and spherical vectors


def kernel_coeffs(s, ctx: QContext) -> list:
    """Closed-form coefficients c_i, i = -s..s, of the kernel of t^s(X_{-a}).

    c_i = i^i q^(-(s-a)i) q^(i^2/2) / ((q^2;q^2)_{s+i} (q^2;q^2)_{s-i})^(1/2)
          * 3phi2(q^(-2s+2i), q^(-2s), -q^(-2s+2a); q^(-4s), 0; q^2, q^2).

    Only integer s admits a kernel; half-integer s raises.
    """
    s = as_spin(s)
    if s.denominator != 1:
        raise ValueError("the kernel exists only for integer spin")
    return _cached(_key(ctx, "kercoef", s), lambda: _build_kernel_coeffs(int(s), ctx))


def _build_kernel_coeffs(s: int, ctx: QContext) -> list:
    with ctx.prec:
        q = ctx.q
        q2 = q * q
        out = []
        for i in range(-s, s + 1):
            pref = (I ** i) * ctx.qpow(-(s - ctx.a) * i) * ctx.qpow(mpfr(i * i) / 2)
            den = gmpy2.sqrt((q_pochhammer(q2, q2, s + i) * q_pochhammer(q2, q2, s - i)).real)
            phi = basic_hypergeometric(
                [ctx.qpow(-2 * s + 2 * i), ctx.qpow(-2 * s), -ctx.qpow(-2 * s + 2 * ctx.a)],
                [ctx.qpow(-4 * s), mpfr(0)], q2, q2)
            out.append(pref / den * phi)
        return out


def kernel_vector(s, ctx: QContext, starred: bool = False) -> list:
    """The closed-form kernel vector of t^s(X_{-a}) (or of its adjoint) in the
    xi basis: sum_i q^(-i/2) c_i e_i = sum_j q^(j/2) c_{-j} xi_j, and with the
    sign of the exponent flipped for the adjoint."""
    s = as_spin(s)
    cs = kernel_coeffs(s, ctx)
    d = dim_of(s)
    with ctx.prec:
        half = Fraction(1, 2)
        out = []
        for m in range(d):
            j = -int(s) + m
            c = cs[d - 1 - m]  # c_{-j}
            expo = -Fraction(j) * half if starred else Fraction(j) * half
            out.append(c * ctx.qpow(expo))
        return normalize(out)


def spherical_vector(s, convention: str, ctx: QContext) -> list:
    """Unit spherical vector in the spin-s space.

    left: normalize(sum_i q^(i/2) c_i xi_i), i.e. pi(k^(1/2)) applied to the
    closed-form kernel vector of X*_{-a}.  right: the eigenvector of
    W = i pi(B_t) with eigenvalue [a] (within tol_rank).  Phase: the top
    component (first nonzero from the top) is made real positive.
    """
    s = as_spin(s)
    if convention == "left":
        if s.denominator != 1:
            raise ValueError("left spherical vectors exist only for integer spin")
        return _cached(_key(ctx, "sph_left", s), lambda: _build_left_spherical(s, ctx))
    if convention == "right":
        if s.denominator != 1:
            raise ValueError("right spherical vectors exist only for integer spin")
        return _cached(_key(ctx, "sph_right", s), lambda: _build_right_spherical(s, ctx))
    raise ValueError(f"unknown convention {convention!r}")


def _top_phase(v, tol):
    for x in reversed(v):
        if abs(x) > tol:
            ph = x / abs(x)
            return [y / ph for y in v]
    return list(v)


def _build_left_spherical(s: Fraction, ctx: QContext) -> list:
    with ctx.prec:
        cs = kernel_coeffs(s, ctx)
        half = Fraction(1, 2)
        v = [c * ctx.qpow(Fraction(i - int(s)) * half)
             for i, c in enumerate(cs)]
        return _top_phase(normalize(v), ctx.prec.tol_rank)


def _build_right_spherical(s: Fraction, ctx: QContext) -> list:
    with ctx.prec:
        evals, vecs = weight_eigenbasis(s, ctx)
        target = ctx.bracket_a
        hits = [j for j, ev in enumerate(evals) if abs(ev - target) < ctx.prec.tol_rank]
        if len(hits) != 1:
            raise FalsificationError(
                f"expected exactly one W-eigenvalue at [a], found {len(hits)} at spin {s}")
        return _top_phase(vecs.column(hits[0]), ctx.prec.tol_rank)


def slot_spherical_weights(n, convention: str, ctx: QContext) -> list:
    """Squared moduli |eta_j|^2, j = -n..n ascending, of the degree-n spherical
    vector; this is the Laurent/Fourier profile of the spherical element's
    torus character."""
    v = spherical_vector(n, convention, ctx)
    with ctx.prec:
        return [abs(x) ** 2 for x in v]


def weight_eigenbasis(s, ctx: QContext):
    """Hermitian eigendecomposition of W = i pi(B_t); eigenvalues ascending.

    Exactly one eigenvalue must sit at [a] (the spherical one) for integer s,
    and eigenvalue gaps below tol_rank raise PrecisionError.
    """
    s = as_spin(s)
    if s.denominator != 1:
        raise ValueError("weight_eigenbasis is defined for integer spin")
    return _cached(_key(ctx, "weig", s), lambda: _build_weight_eigenbasis(s, ctx))


def _build_weight_eigenbasis(s: Fraction, ctx: QContext):
    with ctx.prec:
        W = op_matrices(s, ctx).W
        herm = (W - W.dagger()).max_abs()
        if herm > ctx.prec.tol_residual:
            raise FalsificationError(f"W_{s} is not Hermitian, deviation {herm}")
        evals, V = eigh(W)
        for j in range(len(evals) - 1):
            if evals[j + 1] - evals[j] < ctx.prec.tol_rank:
                raise PrecisionError(
                    f"W_{s} eigenvalues closer than tol_rank; raise precision_bits")
        return evals, V


# ---------------------------------------------------------------------------
# Clebsch-Gordan decomposition


@dataclass(frozen=True)
class CGDecomposition:
    """Isometries W_k : H_k -> H_n (x) H_m for k = |n-m| .. n+m.

    Tensor index order is (i, j) -> (i + n) * dim(m) + (j + m), i.e. the first
    factor index moves slowest.
    """

    n: Fraction
    m: Fraction
    isometries: dict  # Fraction k -> Mat of shape dim(n)*dim(m) x dim(k)

    def spins(self):
        return sorted(self.isometries)


_cg_cache: dict = {}
_cg_lock = threading.Lock()


def cg_decompose(n, m, ctx: QContext) -> CGDecomposition:
    """Multiplicity-free decomposition of the spin-n (x) spin-m tensor product.

    Highest weight vectors are numerical nullspaces of Delta(e) restricted to
    each top weight space, then lowered with exact amplitude division by the
    pi_k(f) coefficients; per weight space the columns are re-orthonormalized
    against higher-k blocks to keep completeness at working precision.
    """
    n = as_spin(n)
    m = as_spin(m)
    key = _key(ctx, "cg", n, m)
    with _cg_lock:
        if key in _cg_cache:
            return _cg_cache[key]
    value = _build_cg(n, m, ctx)
    with _cg_lock:
        return _cg_cache.setdefault(key, value)


def _tensor_pairs(n: Fraction, m: Fraction):
    return [(Fraction(-n) + i, Fraction(-m) + j)
            for i in range(dim_of(n)) for j in range(dim_of(m))]


def _build_cg(n: Fraction, m: Fraction, ctx: QContext) -> CGDecomposition:
    with ctx.prec:
        rn, rm = rep(n, ctx), rep(m, ctx)
        dn, dm = rn.dim, rm.dim
        pairs = _tensor_pairs(n, m)
        posn = {p: t for t, p in enumerate(pairs)}

        def delta_e(vec):
            # Delta(e) = e (x) 1 + k (x) e, via the reshape trick
            Vm_ = [vec[t * dm:(t + 1) * dm] for t in range(dn)]
            out = [[mpc(0)] * dm for _ in range(dn)]
            for r_ in range(dn):
                for c_ in range(dn):
                    if rn.e[r_, c_] != 0:
                        out[r_] = [o + rn.e[r_, c_] * v for o, v in zip(out[r_], Vm_[c_])]
            for t in range(dn):
                kv = rn.k[t, t]
                row = Vm_[t]
                add = rm.e.matvec(row)
                out[t] = [o + kv * x for o, x in zip(out[t], add)]
            return [x for blk in out for x in blk]

        def delta_f(vec):
            # Delta(f) = 1 (x) f + f (x) k^-1
            Vm_ = [vec[t * dm:(t + 1) * dm] for t in range(dn)]
            out = []
            for t in range(dn):
                out.append(rm.f.matvec(Vm_[t]))
            for r_ in range(dn):
                for c_ in range(dn):
                    if rn.f[r_, c_] != 0:
                        kin = rm.k_inv
                        add = kin.matvec(Vm_[c_])
                        out[r_] = [o + rn.f[r_, c_] * x for o, x in zip(out[r_], add)]
            return [x for blk in out for x in blk]

        isoms = {}
        # columns per weight already produced (for re-orthonormalization)
        produced: dict = {}
        k = n + m
        while k >= abs(n - m):
            wspace = [posn[p] for p in pairs if p[0] + p[1] == k]
            # restricted Delta(e): image vectors of the basis of this weight space
            cols = []
            for t in wspace:
                vec = [mpc(0)] * (dn * dm)
                vec[t] = mpc(1)
                cols.append(delta_e(vec))
            A = Mat([[cols[c][r_] for c in range(len(wspace))] for r_ in range(dn * dm)])
            nv = nullspace(A, ctx.prec.tol_rank)
            if len(nv) != 1:
                raise FalsificationError(
                    f"CG({n},{m}) top weight {k}: nullspace dimension {len(nv)} != 1")
            hw = [mpc(0)] * (dn * dm)
            for t, comp in zip(wspace, nv[0]):
                hw[t] = comp
            hw = fix_phase(normalize(hw), ctx.prec.tol_rank)
            # lower through the spin-k ladder
            rk = rep(k, ctx)
            dcol = dim_of(k)
            colsk = [None] * dcol
            colsk[dcol - 1] = hw
            cur = hw
            mu = k
            while mu > -k:
                amp = rk.f[posk_index(k, mu - 1), posk_index(k, mu)]
                cur = [x / amp for x in delta_f(cur)]
                mu -= 1
                colsk[posk_index(k, mu)] = cur
            # re-orthonormalize within each weight against previous blocks
            for idx_ in range(dcol):
                wt = Fraction(-k) + idx_
                prev = produced.setdefault(wt, [])
                v = colsk[idx_]
                for p in prev:
                    ov = vdot(p, v)
                    v = [x - ov * y for x, y in zip(v, p)]
                v = normalize(v)
                colsk[idx_] = v
                prev.append(v)
            isoms[k] = Mat([[colsk[c][r_] for c in range(dcol)] for r_ in range(dn * dm)])
            k -= 1
        return CGDecomposition(n=n, m=m, isometries=isoms)


def posk_index(k: Fraction, mu: Fraction) -> int:
    return int(mu + k)


# ---------------------------------------------------------------------------
# star intertwiner


def star_intertwiner(s, ctx: QContext) -> Mat:
    """G with pi(S(h))^T = G pi(h) G^-1 for h in {k, e, f}, normalized so the
    first largest-magnitude entry equals 1; the joint solution space must be
    one dimensional."""
    s = as_spin(s)
    return _cached(_key(ctx, "starG", s), lambda: _build_star_intertwiner(s, ctx))


def _build_star_intertwiner(s: Fraction, ctx: QContext) -> Mat:
    with ctx.prec:
        r = rep(s, ctx)
        d = r.dim
        Sk = r.k_inv
        Se = (r.k_inv @ r.e).scale(-1)
        Sf = (r.f @ r.k).scale(-1)
        # rows of the linear system M vec(G) = 0, vec column-major:
        # (S(h)^T) G - G h = 0  <=>  (I (x) S(h)^T - h^T (x) I) vec(G) = 0
        blocks = []
        for Sh, h in ((Sk, r.k), (Se, r.e), (Sf, r.f)):
            ShT = Sh.transpose()
            big = Mat.zeros(d * d, d * d)
            for a_ in range(d):
                for b_ in range(d):
                    ridx = a_ * d + b_
                    # (S(h)^T G)[a_, b_] = sum_c ShT[a_, c] G[c, b_]
                    for c_ in range(d):
                        big[ridx, c_ * d + b_] = big[ridx, c_ * d + b_] + ShT[a_, c_]
                    # -(G h)[a_, b_] = -sum_c G[a_, c] h[c, b_]
                    for c_ in range(d):
                        big[ridx, a_ * d + c_] = big[ridx, a_ * d + c_] - h[c_, b_]
            blocks.append(big)
        M = Mat(blocks[0].rows + blocks[1].rows + blocks[2].rows)
        vec = rank_one_nullvector(M, ctx.prec.tol_rank)
        G = Mat([[vec[a_ * d + b_] for b_ in range(d)] for a_ in range(d)])
        mx = G.max_abs()
        pivot = None
        for a_ in range(d):
            for b_ in range(d):
                if abs(G[a_, b_]) == mx:
                    pivot = G[a_, b_]
                    break
            if pivot is not None:
                break
        G = G.scale(1 / pivot)
        res = max(((Sh.transpose() @ G) - (G @ h)).max_abs()
                  for Sh, h in ((Sk, r.k), (Se, r.e), (Sf, r.f)))
        if res > ctx.prec.tol_residual * max(mpfr(1), G.max_abs()):
            raise FalsificationError(f"star intertwiner residual {res} too large at spin {s}")
        return G


def star_intertwiner_inverse(s, ctx: QContext) -> Mat:
    s = as_spin(s)

    def build():
        with ctx.prec:
            G = star_intertwiner(s, ctx)
            d = G.nrows
            cols = []
            ident = Mat.identity(d)
            from .linalg import solve
            for j in range(d):
                cols.append(solve(G, ident.column(j)))
            return Mat([[cols[j][i] for j in range(d)] for i in range(d)])

    return _cached(_key(ctx, "starGinv", s), build)


# ---------------------------------------------------------------------------
# diagnostics for the unitary antipode candidates


def validate_R_candidate(s, ctx: QContext) -> dict:
    """Diagnostic report for candidate unitary antipodes.

    Candidates: R1(h) = k^(1/2) S(h) k^(-1/2) and R2(h) = k^(1/2) S^-1(h)
    k^(-1/2).  Reports the residuals of i pi(R(B~_t)) against
    +/- pi(k^(-1/2)) X_{-a} and the spectrum of i pi(R(B_t)) next to the
    reference list [a+2i].  Purely informational; nothing downstream gates
    on these numbers.
    """
    s = as_spin(s)
    with ctx.prec:
        r = rep(s, ctx)
        ops = op_matrices(s, ctx)
        d = r.dim
        q = ctx.q
        qh = gmpy2.sqrt(q)
        coef = ctx.bracket_a
        Khalf = Mat.zeros(d, d)
        Khalf_inv = Mat.zeros(d, d)
        for m in range(d):
            i = Fraction(-s) + m
            Khalf[m, m] = ctx.qpow(i)
            Khalf_inv[m, m] = ctx.qpow(-i)

        def sandwich(M):
            return Khalf @ M @ Khalf_inv

        # antipode images of the generators
        S = {"k": r.k_inv, "e": (r.k_inv @ r.e).scale(-1), "f": (r.f @ r.k).scale(-1)}
        Sinv = {"k": r.k_inv, "e": (r.e @ r.k_inv).scale(-1), "f": (r.k @ r.f).scale(-1)}
        report = {"s": s}
        ref = sorted(bracket("square", ctx.a + 2 * to_real(i), ctx) for i in irange(s))
        for tag, antipode in (("S", S), ("S_inv", Sinv)):
            # both maps are anti-homomorphisms: the image of fk is S(k) S(f)
            efk = antipode["e"] - (antipode["k"] @ antipode["f"])
            RB_t = sandwich(efk.scale(1 / qh) + Mat.identity(d).scale(-I * coef))
            RB_tilde = sandwich(efk.scale(1 / qh) + antipode["k"].scale(-I * coef)
                                + Mat.identity(d).scale(I * coef))
            lhs = RB_tilde.scale(I)
            rhs = Khalf_inv @ ops.X
            report[f"residual_identity_{tag}"] = (lhs - rhs).frobenius()
            report[f"residual_identity_flipped_{tag}"] = (lhs + rhs).frobenius()
            WR = RB_t.scale(I)
            herm = (WR - WR.dagger()).max_abs()
            report[f"hermiticity_{tag}"] = herm
            if herm < ctx.prec.tol_rank:
                evals, _ = eigh(WR)
                report[f"spectrum_{tag}"] = evals
                report[f"spectrum_vs_reference_{tag}"] = max(
                    abs(ev - rv) for ev, rv in zip(evals, ref))
            else:
                report[f"spectrum_{tag}"] = None
                report[f"spectrum_vs_reference_{tag}"] = None
        report["reference_labels"] = ref
        return report
