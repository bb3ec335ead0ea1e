"""The spherical polynomial families, the principal-series matrix element,
and the generating functional on the Podles coideal.

Two routes produce the degree-n spherical polynomial data:

* the Fourier route from the closed-form kernel coefficients (this is the
  source of Q_n, P_n and of the Askey-Wilson cross-check), used for the left
  convention where those closed forms live;
* a torus-character route that matches Laurent coefficients of the spherical
  elements' diagonal data, which works for either convention and is the only
  closed route available for the right convention.

Both give the same family for the left convention (tested); the right
convention has its own family.  The functional's values are
lambda_n = kappa * (-P_n'(1)) / (q + q^-1 + c'), with the chain-rule constant
confirmed against a Richardson finite-difference oracle.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import gmpy2
from gmpy2 import mpc, mpfr

from .linalg import Mat, lstsq
from .oqalg import AlgElement, basis_coordinates, coideal_membership
from .precision import to_complex, to_real
from .qseries import (Polynomial, QContext, askey_wilson, fourier_to_chebyshev,
                      q_pochhammer, theta_grid)
from .uqrep import kernel_coeffs, slot_spherical_weights


class PrincipalRangeWarning(UserWarning):
    """The spectral parameter left the open principal range (0, q + q^-1)."""


def q_poly(n: int, ctx: QContext):
    """Fourier-route polynomial Q_n plus the closed-form cross-check residual.

    Q_n(cos t) = |alpha_n|^-2 sum_i |c_i|^2 e^(i i t), through the Chebyshev
    conversion; the closed route is |alpha_n|^-2 |c_n|^2 (q^(2n+2); q^2)_n^-1
    times the Askey-Wilson value, compared on a 4n+4 point grid.
    """
    poly, residual, _ = q_poly_report(n, ctx)
    return poly, residual


def q_poly_report(n: int, ctx: QContext):
    """Like q_poly, with a diagnostic dict separating shape from normalization."""
    with ctx.prec:
        q = ctx.q
        if n == 0:
            return Polynomial([1]), mpfr(0), {
                "ratio": mpfr(1), "shape_residual": mpfr(0), "verdict": "match"}
        cs = kernel_coeffs(n, ctx)
        b = [abs(cs[n + i]) ** 2 for i in range(0, n + 1)]
        alpha2 = abs(cs[n]) ** 2 + sum(
            (ctx.qpow(i) + ctx.qpow(-i)) * abs(cs[n + i]) ** 2 for i in range(1, n + 1))
        R = fourier_to_chebyshev(b)
        Qn = R.scale(1 / alpha2)
        const = abs(cs[2 * n]) ** 2 / alpha2 / q_pochhammer(
            ctx.qpow(2 * n + 2), q * q, n).real
        grid = theta_grid(4 * n + 4)
        dev = mpfr(0)
        ratios = []
        for th in grid:
            x = gmpy2.cos(th)
            f = Qn(x).real
            c = const * askey_wilson(n, x, ctx)
            dev = max(dev, abs(f - c))
            if abs(c) > ctx.prec.tol_rank:
                ratios.append(f / c)
        ratio = ratios[len(ratios) // 2] if ratios else mpfr(1)
        shape = mpfr(0)
        for th in grid:
            x = gmpy2.cos(th)
            shape = max(shape, abs(Qn(x).real - ratio * const * askey_wilson(n, x, ctx)))
        if dev < ctx.prec.tol_rank:
            verdict = "match"
        elif shape < ctx.prec.tol_rank:
            verdict = "normalization_mismatch"
        else:
            verdict = "shape_mismatch"
        return Qn, dev, {"ratio": ratio, "shape_residual": shape, "verdict": verdict,
                         "constant": const}


def p_poly(n: int, ctx: QContext) -> Polynomial:
    """P_n with u^n = P_n(u^1) on the spherical line: P_n(y) = Q_n of the
    inverse affine substitution, so that P_n(1) = 1."""
    with ctx.prec:
        Qn, _ = q_poly(n, ctx)
        c = ctx.q + 1 / ctx.q
        al = (c + ctx.cprime) / 2
        be = -ctx.cprime / 2
        P = Qn.affine_compose(al, be)
        dev = abs(P(1) - 1)
        if dev > ctx.prec.tol_rank:
            raise ArithmeticError(f"P_{n}(1) = 1 fails by {dev}; route bug")
        return P


def p_poly_torus(n: int, convention: str, ctx: QContext) -> Polynomial:
    """The degree-n spherical polynomial from torus-character data.

    Matches Laurent coefficients of sum_j |eta^n_j|^2 z^j against powers of
    the degree-1 profile; the overdetermined system must be consistent, which
    is the numerical content of the spherical elements forming a polynomial
    family.
    """
    with ctx.prec:
        if n == 0:
            return Polynomial([1])
        prof1 = slot_spherical_weights(1, convention, ctx)
        target = slot_spherical_weights(n, convention, ctx)

        def laurent_mul(A, B):
            na, nb = (len(A) - 1) // 2, (len(B) - 1) // 2
            out = [mpfr(0)] * (2 * (na + nb) + 1)
            for ia, va in enumerate(A):
                if va == 0:
                    continue
                for ib, vb in enumerate(B):
                    out[ia + ib] += va * vb
            return out

        def pad(A, half):
            na = (len(A) - 1) // 2
            out = [mpfr(0)] * (2 * half + 1)
            out[half - na:half + na + 1] = A
            return out

        powers = [[mpfr(1)]]
        for _ in range(n):
            powers.append(laurent_mul(powers[-1], prof1))
        rows = [pad(p, n) for p in powers]
        A = Mat.from_entries([[rows[k][j] for k in range(n + 1)]
                              for j in range(2 * n + 1)])
        bvec = [to_complex(v) for v in pad(target, n)]
        coef, resid = lstsq(A, bvec)
        if resid > ctx.prec.tol_rank:
            raise ArithmeticError(
                f"degree-{n} {convention} spherical element is not a polynomial in the "
                f"degree-1 element (residual {resid})")
        return Polynomial(coef)


def omega_value(lam, n: int, ctx: QContext, convention: str = "left") -> mpfr:
    """The principal-series spherical matrix element a_0^{lambda,n}:
    P_n((lambda + c') / (q + q^-1 + c')).  Values outside the open principal
    range (0, q+q^-1) are returned with a warning."""
    with ctx.prec:
        lam = to_real(lam)
        c = ctx.q + 1 / ctx.q
        if not (0 < lam < c):
            warnings.warn(f"lambda = {lam} outside the principal range (0, {c})",
                          PrincipalRangeWarning, stacklevel=2)
        P = _family_poly(n, convention, ctx)
        return P((lam + ctx.cprime) / (c + ctx.cprime)).real


def _family_poly(n: int, convention: str, ctx: QContext) -> Polynomial:
    if convention == "left":
        return p_poly(n, ctx)
    return p_poly_torus(n, convention, ctx)


def finite_difference_limit(n: int, ctx: QContext, convention: str = "left",
                            steps: int = 12) -> mpfr:
    """Richardson-extrapolated central-difference oracle for the limit
    lim_{lambda -> q+q^-1} (a_0^{lambda,n} - 1) / (q + q^-1 - lambda),
    which equals minus the lambda derivative of a_0 at the endpoint."""
    with ctx.prec:
        c = ctx.q + 1 / ctx.q
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", PrincipalRangeWarning)
            h0 = mpfr(1) / 16
            vals = []
            for j in range(steps):
                h = h0 * mpfr(2) ** (-j)
                d = (omega_value(c - h, n, ctx, convention)
                     - omega_value(c + h, n, ctx, convention)) / (2 * h)
                vals.append(d)
        for r in range(1, len(vals)):
            factor = mpfr(4) ** r
            vals = [(factor * vals[i + 1] - vals[i]) / (factor - 1)
                    for i in range(len(vals) - 1)]
        return vals[0]


@dataclass(frozen=True)
class GenFunctional:
    """Per-degree values lambda_n of the generating functional, with the raw
    limits in both normalization modes and the finite-difference oracle."""

    ctx: QContext
    convention: str
    mode: str
    n_max: int
    lambdas: dict          # n -> mpfr, lambda_0 = 0
    raw_derivative: dict   # n -> -P_n'(1) / (q + q^-1 + c')
    raw_paper_constant: dict    # n -> -P_n'(1)
    fd_oracle: dict        # n -> Richardson limit
    p_polys: dict          # n -> Polynomial
    q_residuals: dict      # n -> two-route residual (left convention only)

    def value(self, n: int) -> mpfr:
        return self.lambdas[n]


def build_functional(ctx: QContext, n_max: int, mode: str = "derivative",
                     convention: str = "right") -> GenFunctional:
    """Assemble the generating functional data up to degree n_max.

    mode selects the raw limit constant: 'derivative' applies the chain rule
    to the displayed argument (oracle confirmed), 'paper_constant' keeps the
    bare -P_n'(1).  The oracle must agree with derivative mode within
    tol_rank, for every degree.
    """
    if mode not in ("derivative", "paper_constant"):
        raise ValueError(f"unknown mode {mode!r}")
    with ctx.prec:
        c = ctx.q + 1 / ctx.q
        denom = c + ctx.cprime
        lambdas = {0: mpfr(0)}
        raw_d = {}
        raw_p = {}
        fd = {}
        ps = {0: Polynomial([1])}
        qres = {}
        for n in range(1, n_max + 1):
            if convention == "left":
                _, res = q_poly(n, ctx)
                qres[n] = res
            P = _family_poly(n, convention, ctx)
            ps[n] = P
            dP1 = P.derivative()(1).real
            raw_d[n] = -dP1 / denom
            raw_p[n] = -dP1
            fd[n] = finite_difference_limit(n, ctx, convention)
            if abs(raw_d[n] - fd[n]) > ctx.prec.tol_rank * max(mpfr(1), abs(fd[n])):
                raise ArithmeticError(
                    f"derivative-mode raw limit disagrees with the finite-difference "
                    f"oracle at degree {n}: {raw_d[n]} vs {fd[n]}")
            lambdas[n] = ctx.kappa * (raw_d[n] if mode == "derivative" else raw_p[n])
        return GenFunctional(ctx=ctx, convention=convention, mode=mode, n_max=n_max,
                             lambdas=lambdas, raw_derivative=raw_d,
                             raw_paper_constant=raw_p, fd_oracle=fd, p_polys=ps,
                             q_residuals=qres)


def apply(F: GenFunctional, x: AlgElement) -> mpc:
    """Evaluate the functional on a coideal element: sum_n lambda_n times the
    spherical-spherical coefficient of the degree-n block.  The element must
    pass the coideal membership test of F's convention."""
    ctx = F.ctx
    with ctx.prec:
        res = coideal_membership(x, F.convention, ctx)
        if res >= ctx.prec.tol_rank:
            raise ValueError(
                f"element is not in the {F.convention} coideal (residual {res})")
        coords, resid = basis_coordinates(x, F.n_max, F.convention, ctx)
        if resid >= ctx.prec.tol_rank:
            raise ValueError(f"element leaves the degree <= {F.n_max} span "
                             f"(residual {resid})")
        total = mpc(0)
        for (n, i), coeff in coords.items():
            if n == 0:
                continue
            if _is_spherical_index(n, i, F.convention, ctx):
                total += F.lambdas[n] * coeff
        return total


def _is_spherical_index(n: int, i: int, convention: str, ctx: QContext) -> bool:
    from .oqalg import slot_basis
    _, sph, _ = slot_basis(n, convention, ctx)
    return i == (sph if convention == "right" else 0)
