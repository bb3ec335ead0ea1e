"""Peter-Weyl model of the coordinate algebra of quantum SU(2).

An element is a finite family of degree blocks: x = sum_s sum_{ij} (F_s)_ij
u^s_{ij}, where u^s_{ij}(h) = <xi_i, pi_s(h) xi_j> and matrix coefficients are
conjugate linear in the first index, so u_{v,w} has block conj(v) w^T.
Products are computed through the Clebsch-Gordan isometries, the star through
the contragredient intertwiner, and the Podles coideal through the spherical
and weight vectors of uqrep.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpc, mpfr

from .linalg import Mat, norm, outer_conj_first, vdot
from .precision import format_real, to_complex
from .qseries import QContext
from .uqrep import (as_spin, cg_decompose, dim_of, op_matrices, rep,
                    spherical_vector, star_intertwiner,
                    star_intertwiner_inverse, weight_eigenbasis)


@dataclass(frozen=True)
class AlgElement:
    """Graded coefficient blocks over the matrix-coefficient bases u^s_{ij}."""

    blocks: dict  # Fraction degree -> Mat

    def degrees(self):
        return sorted(self.blocks)

    def block(self, s) -> Mat:
        s = as_spin(s)
        d = dim_of(s)
        return self.blocks.get(s, Mat.zeros(d, d))

    def max_degree(self):
        return max(self.blocks, default=Fraction(0))

    def norm(self) -> mpfr:
        s = mpfr(0)
        for b in self.blocks.values():
            f = b.frobenius()
            s += f * f
        return gmpy2.sqrt(s)


def element(blocks: dict, tol=None) -> AlgElement:
    """Build an AlgElement, dropping blocks with Frobenius norm below tol."""
    clean = {}
    for s, b in blocks.items():
        s = as_spin(s)
        if tol is None or b.frobenius() >= tol:
            clean[s] = b
    return AlgElement(blocks=clean)


def zero() -> AlgElement:
    return AlgElement(blocks={})


def unit() -> AlgElement:
    return AlgElement(blocks={Fraction(0): Mat.from_entries([[1]])})


def coefficient_unit(s, i: int, j: int) -> AlgElement:
    """The basis coefficient u^s_{ij} with i, j counted from 0 (ascending weight)."""
    s = as_spin(s)
    b = Mat.zeros(dim_of(s), dim_of(s))
    b[i, j] = mpc(1)
    return AlgElement(blocks={s: b})


def matrix_coefficient(s, v, w) -> AlgElement:
    """u^s_{v,w}, conjugate linear in v."""
    return AlgElement(blocks={as_spin(s): outer_conj_first(v, w)})


def add(x: AlgElement, y: AlgElement, cy=1) -> AlgElement:
    out = {s: b.copy() for s, b in x.blocks.items()}
    cy = to_complex(cy)
    for s, b in y.blocks.items():
        out[s] = (out[s] + b.scale(cy)) if s in out else b.scale(cy)
    return element(out, tol=mpfr(0))


def scale(x: AlgElement, c) -> AlgElement:
    c = to_complex(c)
    return AlgElement(blocks={s: b.scale(c) for s, b in x.blocks.items()})


def generators(ctx: QContext) -> dict:
    """alpha, gamma and their stars as elements, pinned by the dual pairing:
    (alpha, k) = q, (gamma, f) = q^(-1/2), (-q gamma*, e) = q^(1/2)."""
    with ctx.prec:
        alpha = coefficient_unit(Fraction(1, 2), 1, 1)
        gamma = coefficient_unit(Fraction(1, 2), 0, 1)
        return {
            "alpha": alpha,
            "gamma": gamma,
            "alpha_star": star(alpha, ctx),
            "gamma_star": star(gamma, ctx),
        }


def pairing(x: AlgElement, h: str, ctx: QContext) -> mpc:
    """Evaluate x against a generator h of U_q(su(2)): sum_s <F_s, pi_s(h)>."""
    with ctx.prec:
        total = mpc(0)
        for s, b in x.blocks.items():
            m = rep(s, ctx).matrix(h)
            for i in range(b.nrows):
                for j in range(b.ncols):
                    if b[i, j] != 0:
                        total += b[i, j] * m[i, j]
        return total


def mul(x: AlgElement, y: AlgElement, ctx: QContext) -> AlgElement:
    """Product through the coproduct: for blocks F (degree n) and G (degree m)
    the degree-k contribution is W_k^T (F (x) G) conj(W_k), computed column by
    column via the reshape identity (F (x) G) vec(X) = vec(F X G^T)."""
    with ctx.prec:
        out: dict = {}
        for n, F in x.blocks.items():
            for m, G in y.blocks.items():
                Gt = G.transpose()
                cg = cg_decompose(n, m, ctx)
                dn, dm = dim_of(n), dim_of(m)
                for k, W in cg.isometries.items():
                    dk = dim_of(k)
                    cols = []
                    for c in range(dk):
                        wc = [W[r, c].conjugate() for r in range(dn * dm)]
                        X = Mat([wc[t * dm:(t + 1) * dm] for t in range(dn)])
                        Y = F @ X @ Gt
                        yv = [Y[i_, j_] for i_ in range(dn) for j_ in range(dm)]
                        cols.append(yv)
                    blk = Mat([[sum((W[d_, r] * cols[c][d_] for d_ in range(dn * dm)), mpc(0))
                                for c in range(dk)] for r in range(dk)])
                    out[k] = (out[k] + blk) if k in out else blk
        return element(out, tol=ctx.prec.tol_residual)


def star(x: AlgElement, ctx: QContext) -> AlgElement:
    """Involution: blockwise G^T conj(F) G^(-T) with G the star intertwiner.

    Derived from the dual-pairing star (x*, h) = conj((x, S(h)*)) together
    with pi(S(h))^T = G pi(h) G^(-1).
    """
    with ctx.prec:
        out = {}
        for s, F in x.blocks.items():
            G = star_intertwiner(s, ctx)
            Ginv = star_intertwiner_inverse(s, ctx)
            out[s] = G.transpose() @ F.conjugate() @ Ginv.transpose()
        return element(out, tol=mpfr(0))


def counit(x: AlgElement) -> mpc:
    total = mpc(0)
    for b in x.blocks.values():
        for i in range(b.nrows):
            total += b[i, i]
    return total


def haar(x: AlgElement) -> mpc:
    b = x.blocks.get(Fraction(0))
    return b[0, 0] if b is not None else mpc(0)


def eval_torus(x: AlgElement, theta, ctx: QContext) -> mpc:
    """Torus character: sum_s sum_j (F_s)_jj exp(i j theta)."""
    with ctx.prec:
        th = to_complex(theta).real
        total = mpc(0)
        for s, b in x.blocks.items():
            for m in range(b.nrows):
                j = to_complex(Fraction(-s) + m).real
                if b[m, m] != 0:
                    ang = j * th
                    total += b[m, m] * mpc(gmpy2.cos(ang), gmpy2.sin(ang))
        return total


_WORD_TOKENS = ("k", "k_inv", "e", "f", "B_t", "B_tilde")


def _token_matrix(tok: str, s, ctx: QContext) -> Mat:
    if tok in ("k", "k_inv", "e", "f"):
        return rep(s, ctx).matrix(tok)
    ops = op_matrices(s, ctx)
    return {"B_t": ops.B_t, "B_tilde": ops.B_tilde}[tok]


def act(h_side: str, word, x: AlgElement, ctx: QContext) -> AlgElement:
    """Module actions h |> x (left) and x <| h (right) for a word in
    {k, k_inv, e, f, B_t, B_tilde}; the word is the product of its letters in
    the given order.  Blockwise: h |> u_{v,w} = u_{v, pi(h) w} gives
    F -> F pi(h)^T; u_{v,w} <| h = u_{pi(h)^dagger v, w} gives F -> pi(h)^T F.
    """
    if isinstance(word, str):
        word = [word]
    for tok in word:
        if tok not in _WORD_TOKENS:
            raise ValueError(f"unknown generator token {tok!r}")
    with ctx.prec:
        out = {}
        for s, F in x.blocks.items():
            cur = F
            if h_side == "left":
                # (h1 h2) |> x = h1 |> (h2 |> x): apply letters right to left
                for tok in reversed(list(word)):
                    cur = cur @ _token_matrix(tok, s, ctx).transpose()
            elif h_side == "right":
                # x <| (h1 h2) = (x <| h1) <| h2: apply letters left to right
                for tok in word:
                    cur = _token_matrix(tok, s, ctx).transpose() @ cur
            else:
                raise ValueError(f"h_side must be 'left' or 'right', got {h_side!r}")
            out[s] = cur
        return element(out, tol=mpfr(0))


# ---------------------------------------------------------------------------
# Podles coideal


@dataclass(frozen=True)
class PodlesBasisIndex:
    n: int
    i: int
    convention: str
    is_spherical: bool
    eigenvalue_label: object  # mpfr for the right convention, None offsph left


def slot_basis(n: int, convention: str, ctx: QContext):
    """Orthonormal basis of the free slot in degree n plus the spherical index.

    right: the W-eigenbasis (ascending eigenvalues).  left: the pinned
    spherical vector extended by Gram-Schmidt from the W-eigenbasis; the
    labels of the non-spherical members are surrogate (metadata only).
    """
    n = as_spin(n)
    if n == 0:
        return [[mpc(1)]], 0, [None]
    with ctx.prec:
        evals, V = weight_eigenbasis(n, ctx)
        if convention == "right":
            target = ctx.bracket_a
            sph = min(range(len(evals)), key=lambda j: abs(evals[j] - target))
            return [V.column(j) for j in range(V.ncols)], sph, list(evals)
        if convention == "left":
            eta = spherical_vector(n, "left", ctx)
            basis = [list(eta)]
            for j in range(V.ncols):
                v = V.column(j)
                for b in basis:
                    ov = vdot(b, v)
                    v = [a - ov * c for a, c in zip(v, b)]
                if norm(v) > ctx.prec.tol_rank:
                    basis.append([a / norm(v) for a in v])
            if len(basis) != dim_of(n):
                raise ValueError(f"failed to extend the left slot basis at degree {n}")
            return basis, 0, [None] * dim_of(n)
    raise ValueError(f"unknown convention {convention!r}")


def podles_basis(n: int, convention: str, ctx: QContext):
    """Degree-n coideal basis elements with their index metadata.

    right: u^n_{eta_sph, eta_i} over the W-eigenbasis.  left: u^n_{eta_i,
    eta_sph} over the orthonormal extension of the pinned spherical vector.
    """
    n = int(as_spin(n))
    if n == 0:
        return [(PodlesBasisIndex(0, 0, convention, True, None), unit())]
    with ctx.prec:
        basis, sph, labels = slot_basis(n, convention, ctx)
        eta = basis[sph] if convention == "right" else basis[0]
        out = []
        for i, v in enumerate(basis):
            if convention == "right":
                el = matrix_coefficient(n, eta, v)
            else:
                el = matrix_coefficient(n, v, eta)
            out.append((PodlesBasisIndex(n, i, convention,
                                         i == (sph if convention == "right" else 0),
                                         labels[i]), el))
        return out


def coideal_membership(x: AlgElement, convention: str, ctx: QContext) -> mpfr:
    """Coideal membership residual.

    right: max blockwise Frobenius norm of x <| B_t - eps(B_t) x.  left: the
    condition through the unitary antipode is not pinned by an explicit
    formula, so the residual checks the second slot directly: every block
    must satisfy F = F conj(eta) eta^T for the pinned left spherical vector.
    """
    with ctx.prec:
        worst = mpfr(0)
        if convention == "right":
            eps = -gmpy2.mpc(0, 1) * ctx.bracket_a
            acted = act("right", ["B_t"], x, ctx)
            for s in set(x.blocks) | set(acted.blocks):
                d = (acted.block(s) - x.block(s).scale(eps)).frobenius()
                worst = max(worst, d)
            return worst
        if convention == "left":
            for s, F in x.blocks.items():
                if s == 0:
                    continue
                if s.denominator != 1:
                    worst = max(worst, F.frobenius())
                    continue
                eta = spherical_vector(s, "left", ctx)
                proj = Mat([[eta[i].conjugate() * eta[j] for j in range(len(eta))]
                            for i in range(len(eta))])
                worst = max(worst, (F - (F @ proj)).frobenius())
            return worst
    raise ValueError(f"unknown convention {convention!r}")


def basis_coordinates(x: AlgElement, N: int, convention: str, ctx: QContext):
    """Coordinates of a coideal element over the degree <= N basis.

    Returns (coords, residual): coords[(n, i)] is the coefficient of the
    degree-n basis element with free-slot index i; the residual is the
    blockwise norm of the part of x outside the coideal span (plus any
    half-integer or degree > N content).
    """
    with ctx.prec:
        coords = {}
        resid = mpfr(0)
        d0 = x.blocks.get(Fraction(0))
        coords[(0, 0)] = d0[0, 0] if d0 is not None else mpc(0)
        for s, F in x.blocks.items():
            if s == 0:
                continue
            if s.denominator != 1 or s > N:
                resid = max(resid, F.frobenius())
                continue
            n = int(s)
            basis, sph, _ = slot_basis(n, convention, ctx)
            eta = basis[sph] if convention == "right" else basis[0]
            recon = Mat.zeros(F.nrows, F.ncols)
            for i, v in enumerate(basis):
                if convention == "right":
                    c = _block_coefficient(F, eta, v)
                    coords[(n, i)] = c
                    recon = recon + outer_conj_first(eta, v).scale(c)
                else:
                    c = _block_coefficient(F, v, eta)
                    coords[(n, i)] = c
                    recon = recon + outer_conj_first(v, eta).scale(c)
            resid = max(resid, (F - recon).frobenius())
        return coords, resid


def _block_coefficient(F: Mat, r_vec, c_vec) -> mpc:
    """Coefficient of u_{r,c} in the block F for orthonormal slot vectors:
    r^T F conj(c)."""
    tmp = F.matvec([x.conjugate() for x in c_vec])
    return sum((a * b for a, b in zip(r_vec, tmp)), mpc(0))


def serialize(x: AlgElement, bits: int) -> dict:
    """JSON-ready structure: per degree, real and imaginary entry matrices as
    full-precision decimal strings."""
    out = []
    for s in x.degrees():
        b = x.blocks[s]
        out.append({
            "degree": str(s),
            "real": [[format_real(b[i, j].real, bits) for j in range(b.ncols)]
                     for i in range(b.nrows)],
            "imag": [[format_real(b[i, j].imag, bits) for j in range(b.ncols)]
                     for i in range(b.nrows)],
        })
    return {"blocks": out}


def deserialize(data: dict) -> AlgElement:
    blocks = {}
    for item in data["blocks"]:
        s = as_spin(Fraction(item["degree"]))
        re = item["real"]
        im = item["imag"]
        blocks[s] = Mat([[mpc(mpfr(re[i][j]), mpfr(im[i][j]))
                          for j in range(len(re[i]))] for i in range(len(re))])
    return AlgElement(blocks=blocks)
