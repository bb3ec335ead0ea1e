"""GNS construction from the generating functional: Gram matrices of the
associated sesquilinear form, conditional positivity checks, cocycle
coordinates, the GNS representation on the truncated space, per-degree growth
tables and the purely-non-Gaussian rank test.

The form is <x, y>_L = L((x - eps(x) 1)* (y - eps(y) 1)); all products run
through oqalg.mul and oqalg.star, and L through genfun.apply.
"""
from __future__ import annotations

from dataclasses import dataclass

import gmpy2
from gmpy2 import mpc, mpfr

from .genfun import GenFunctional, apply as L_apply
from .linalg import Mat, eigh, norm
from .oqalg import (AlgElement, add, basis_coordinates, counit, mul,
                    podles_basis, star, unit)
from .precision import FalsificationError
from .qseries import QContext


@dataclass(frozen=True)
class GnsSpace:
    """Truncated GNS data for the L-form over the coideal basis up to degree N.

    indices[j] is the PodlesBasisIndex of basis column j (the unit occupies
    j = 0 with degree 0).  gram is Hermitian PSD up to tol_rank; rank and the
    orthonormalizing map T (rank x len(indices), coords(x) = T beta(x)) are
    derived from its eigendecomposition, keeping eigenvalues above tol_rank.
    """

    N: int
    convention: str
    functional: GenFunctional
    indices: list
    elements: list
    gram: Mat
    eigenvalues: list
    rank: int
    spectral_gap: mpfr
    T: Mat

    def index_of(self, n: int, i: int) -> int:
        for j, idx in enumerate(self.indices):
            if idx.n == n and idx.i == i:
                return j
        raise KeyError((n, i))


def _tilde(x: AlgElement, ctx: QContext) -> AlgElement:
    return add(x, unit(), -counit(x))


def gram(N: int, F: GenFunctional, convention: str, ctx: QContext) -> GnsSpace:
    """Assemble the truncated GNS space over degrees 0..N (unit included).

    A minimum eigenvalue below -tol_rank is a falsification event and raises;
    it would contradict conditional positivity.
    """
    if convention != F.convention:
        raise ValueError(f"functional was built for {F.convention!r}, not {convention!r}")
    if F.n_max < 2 * N:
        raise ValueError(f"functional covers degrees <= {F.n_max}, need 2N = {2 * N}")
    with ctx.prec:
        indices = []
        elements = []
        for n in range(0, N + 1):
            for idx, el in podles_basis(n, convention, ctx):
                indices.append(idx)
                elements.append(el)
        m = len(elements)
        tildes = [_tilde(x, ctx) for x in elements]
        stars = [star(t, ctx) for t in tildes]
        G = Mat.zeros(m, m)
        for i in range(m):
            for j in range(m):
                # both triangles computed independently so the Hermitian
                # check below is a real test, not a tautology
                G[i, j] = L_apply(F, mul(stars[i], tildes[j], ctx))
        herm = (G - G.dagger()).max_abs()
        if herm > ctx.prec.tol_rank:
            raise FalsificationError(
                f"L-form Gram is not Hermitian (deviation {herm}); the functional is "
                f"not Hermitian over the {convention} coideal at this truncation")
        evals, V = eigh(G)
        if evals[0] < -ctx.prec.tol_rank:
            raise FalsificationError(
                f"conditional positivity violated: min Gram eigenvalue {evals[0]}")
        kept = [j for j, e in enumerate(evals) if e > ctx.prec.tol_rank]
        dropped = [e for e in evals if e <= ctx.prec.tol_rank]
        gap = (min(evals[j] for j in kept) if kept else mpfr(0))
        if dropped:
            gap = gap - max(dropped)
        rank = len(kept)
        # T = diag(sqrt(e_j)) V_kept^dagger, so that <T beta, T beta'> = beta^dagger G beta'
        rows = []
        for j in kept:
            col = V.column(j)
            se = gmpy2.sqrt(evals[j])
            rows.append([se * col[i].conjugate() for i in range(m)])
        T = Mat(rows) if rows else Mat.zeros(0, m)
        return GnsSpace(N=N, convention=convention, functional=F, indices=indices,
                        elements=elements, gram=G, eigenvalues=evals, rank=rank,
                        spectral_gap=gap, T=T)


def element_coordinates(x: AlgElement, space: GnsSpace):
    """Coefficients of x over the truncated coideal basis, as a column."""
    ctx = space.functional.ctx
    with ctx.prec:
        coords, resid = basis_coordinates(x, space.N, space.convention, ctx)
        if resid >= ctx.prec.tol_rank:
            raise ValueError(f"element leaves the truncated span (residual {resid})")
        beta = [mpc(0)] * len(space.indices)
        for (n, i), c in coords.items():
            beta[space.index_of(n, i)] = c
        return beta


def cocycle_vector(x: AlgElement, space: GnsSpace):
    """Coordinates of C_L(x) in the orthonormalized quotient."""
    ctx = space.functional.ctx
    with ctx.prec:
        beta = element_coordinates(x, space)
        return space.T.matvec(beta)


def cocycle_norm_sq(x: AlgElement, space: GnsSpace) -> mpfr:
    """<x, x>_L evaluated directly through products (independent of T)."""
    ctx = space.functional.ctx
    F = space.functional
    with ctx.prec:
        t = _tilde(x, ctx)
        return L_apply(F, mul(star(t, ctx), t, ctx)).real


def pi_L(b: AlgElement, space: GnsSpace, action_cap: int) -> Mat:
    """Matrix of the GNS representation pi_L(b) on (a sub-span of) the
    truncated space, from pi_L(b) C_L(x_j) = C_L(b x_j) - C_L(b) eps(x_j).

    Only basis columns x_j with degree(x_j) + degree(b) <= min(action_cap, N)
    enter the construction, because only those products stay inside the
    truncation; the matrix is the least-squares solution over the sub-span
    they generate and satisfies the defining identity on it.  Vectors to be
    acted on must lie in that sub-span for the identity to be meaningful.
    """
    ctx = space.functional.ctx
    with ctx.prec:
        degb = int(b.max_degree())
        cap = min(action_cap, space.N)
        usable = [j for j, idx in enumerate(space.indices) if idx.n + degb <= cap]
        if not usable:
            raise ValueError(f"no basis column fits degree(b) + n <= {cap}")
        m = len(space.indices)
        r = space.rank
        Cb = cocycle_vector(b, space)
        dom_cols = []
        rhs_cols = []
        for j in usable:
            dom_cols.append(space.T.matvec(_unit_beta(j, m)))
            prod = mul(b, space.elements[j], ctx)
            col = cocycle_vector(prod, space)
            eps_j = counit(space.elements[j])
            rhs_cols.append([c - cb * eps_j for c, cb in zip(col, Cb)])
        D = Mat([[dom_cols[j][i] for j in range(len(usable))] for i in range(r)])
        R = Mat([[rhs_cols[j][i] for j in range(len(usable))] for i in range(r)])
        # M D = R in the least-squares sense: M = R D^+ through the spectral
        # pseudo-inverse of D D^dagger at tol_rank
        DDh = D @ D.dagger()
        evals, V = eigh(DDh)
        Vd = V.dagger()
        RDh = R @ D.dagger()
        inv_diag = [1 / e if e > ctx.prec.tol_rank ** 2 else mpfr(0) for e in evals]
        tmp = RDh @ V
        for i in range(r):
            for j in range(r):
                tmp[i, j] = tmp[i, j] * inv_diag[j]
        return tmp @ Vd


def _unit_beta(j: int, m: int):
    beta = [mpc(0)] * m
    beta[j] = mpc(1)
    return beta


@dataclass(frozen=True)
class GrowthTable:
    """Per-degree Hermitian matrices of the L-form in the eigenbasis indexing."""

    n_max: int
    convention: str
    matrices: dict        # n -> Mat (2n+1 x 2n+1)
    diagonals: dict       # n -> list of real diagonal entries
    offdiag_max: dict     # n -> max |off-diagonal|
    zero_index: dict      # n -> index of the vanishing diagonal entry
    labels: dict          # n -> eigenvalue labels (right) or None (left)
    min_nonspherical: dict
    nondecreasing_trend: bool


def growth_table(n_max: int, F: GenFunctional, convention: str,
                 ctx: QContext) -> GrowthTable:
    """Degree-by-degree Gram of the cocycle over the coideal basis.

    Asserts nothing beyond structure collection; the properness trend of
    min_{i != spherical} g^n_i is reported, never asserted.
    """
    if convention != F.convention:
        raise ValueError(f"functional was built for {F.convention!r}, not {convention!r}")
    with ctx.prec:
        matrices = {}
        diags = {}
        offd = {}
        zidx = {}
        labels = {}
        min_nonsph = {}
        for n in range(0, n_max + 1):
            basis = podles_basis(n, convention, ctx)
            m = len(basis)
            tildes = [_tilde(el, ctx) for _, el in basis]
            stars = [star(t, ctx) for t in tildes]
            Gn = Mat.zeros(m, m)
            for i in range(m):
                for j in range(i, m):
                    val = L_apply(F, mul(stars[i], tildes[j], ctx))
                    Gn[i, j] = val
                    if i != j:
                        Gn[j, i] = val.conjugate()
            matrices[n] = Gn
            diags[n] = [Gn[i, i].real for i in range(m)]
            offd[n] = max((abs(Gn[i, j]) for i in range(m) for j in range(m) if i != j),
                          default=mpfr(0))
            small = [i for i in range(m) if abs(diags[n][i]) < ctx.prec.tol_rank]
            zidx[n] = small[0] if len(small) == 1 else (small if small else None)
            labels[n] = [getattr(idx, "eigenvalue_label", None) for idx, _ in basis]
            others = [diags[n][i] for i in range(m)
                      if not (len(small) == 1 and i == small[0])]
            min_nonsph[n] = min(others) if others else mpfr(0)
        seq = [min_nonsph[n] for n in range(1, n_max + 1)]
        trend = all(seq[i + 1] >= seq[i] for i in range(len(seq) - 1))
        return GrowthTable(n_max=n_max, convention=convention, matrices=matrices,
                           diagonals=diags, offdiag_max=offd, zero_index=zidx,
                           labels=labels, min_nonspherical=min_nonsph,
                           nondecreasing_trend=trend)


@dataclass(frozen=True)
class GaussianReport:
    N: int
    convention: str
    dim_image: int
    rank_ng: int
    dim_gaussian_part: int
    rank_gap: mpfr
    max_discard_mass: mpfr
    excluded_vectors: int


def gaussian_rank(N: int, F: GenFunctional, convention: str,
                  ctx: QContext) -> GaussianReport:
    """Rank test for the Gaussian part of the cocycle at truncation N.

    Defect vectors C_L(bc) - eps(b) C_L(c) - C_L(b) eps(c) over basis pairs
    with degree(b) + degree(c) <= N are restricted to the degree <= N-1 image
    (degree-N components discarded with their L-norm mass reported; a vector
    losing more than half its norm is excluded and counted).  The Gaussian
    part is dim(image restricted to degree <= N-1) minus the rank of the
    restricted defect span.
    """
    if convention != F.convention:
        raise ValueError(f"functional was built for {F.convention!r}, not {convention!r}")
    with ctx.prec:
        space = gram(N, F, convention, ctx)
        m = len(space.indices)
        keep = [j for j, idx in enumerate(space.indices) if idx.n <= N - 1]
        Gsub = Mat([[space.gram[i, j] for j in keep] for i in keep])
        evals_sub, Vsub = eigh(Gsub)
        kept_sub = [e for e in evals_sub if e > ctx.prec.tol_rank]
        dim_image = len(kept_sub)
        defects = []
        max_mass = mpfr(0)
        excluded = 0
        for i in range(m):
            for j in range(m):
                if space.indices[i].n + space.indices[j].n > N:
                    continue
                b, c = space.elements[i], space.elements[j]
                prod = mul(b, c, ctx)
                beta = element_coordinates(prod, space)
                eb = counit(b)
                ec = counit(c)
                bi = element_coordinates(b, space)
                ci = element_coordinates(c, space)
                vec = [p - eb * cc - bb * ec for p, cc, bb in zip(beta, ci, bi)]
                full_norm2 = _form_norm2(vec, space.gram)
                trunc = [vec[t] if space.indices[t].n <= N - 1 else mpc(0)
                         for t in range(m)]
                discard = [vec[t] - trunc[t] for t in range(m)]
                mass2 = _form_norm2(discard, space.gram)
                if full_norm2 > ctx.prec.tol_rank ** 2:
                    rel = gmpy2.sqrt(mass2 / full_norm2)
                    max_mass = max(max_mass, rel)
                    if rel > mpfr(1) / 2:
                        excluded += 1
                        continue
                defects.append([trunc[t] for t in keep])
        # Gram of the defect vectors in the L-form restricted to the kept block
        nd = len(defects)
        D = Mat.zeros(nd, nd)
        for i in range(nd):
            for j in range(i, nd):
                val = _form_pair(defects[i], defects[j], Gsub)
                D[i, j] = val
                if i != j:
                    D[j, i] = val.conjugate()
        evals_d, _ = eigh(D)
        kept_d = [e for e in evals_d if e > ctx.prec.tol_rank]
        rank_ng = len(kept_d)
        gap_candidates = kept_sub + kept_d
        gap = min(gap_candidates) if gap_candidates else mpfr(0)
        return GaussianReport(N=N, convention=convention, dim_image=dim_image,
                              rank_ng=rank_ng,
                              dim_gaussian_part=dim_image - rank_ng,
                              rank_gap=gap, max_discard_mass=max_mass,
                              excluded_vectors=excluded)


def _form_pair(u, v, G: Mat) -> mpc:
    Gv = G.matvec(v)
    return sum((a.conjugate() * b for a, b in zip(u, Gv)), mpc(0))


def _form_norm2(u, G: Mat) -> mpfr:
    return _form_pair(u, u, G).real
