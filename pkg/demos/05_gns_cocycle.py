"""GNS construction from the generating functional: conditional positivity,
the vanishing spherical cocycle, per-degree growth, and the purely
non-Gaussian rank test.

Run:  python demos/05_gns_cocycle.py   (about half a minute)
"""
from podles import genfun as gf, gnslab as gl, oqalg as oq
from podles.qseries import QContext

ctx = QContext("0.5", "0.3")

with ctx.prec:
    N = 3
    F = gf.build_functional(ctx, 2 * N, convention="right")
    space = gl.gram(N, F, "right", ctx)
    print(f"Gram of the L-form over degrees <= {N} "
          f"({len(space.indices)} basis elements):")
    print(f"  min eigenvalue {float(space.eigenvalues[0]):+.3e} (conditional positivity)")
    print(f"  rank {space.rank} = 2N weight lines of the cocycle space")
    print()

    print("the spherical-spherical elements are killed by the cocycle:")
    for n in range(1, N + 1):
        el = [e for idx, e in oq.podles_basis(n, "right", ctx) if idx.is_spherical][0]
        print(f"  ||C_L(u^{n}_sph,sph)||^2 = {float(gl.cocycle_norm_sq(el, space)):.3e}")
    print()

    table = gl.growth_table(N, F, "right", ctx)
    print("growth table (diagonal of C^n* C^n in the weight eigenbasis):")
    for n in range(1, N + 1):
        diag = ", ".join(f"{float(g):.6f}" for g in table.diagonals[n])
        print(f"  n={n}: [{diag}]   off-diagonal max {float(table.offdiag_max[n]):.1e}")
    print(f"  min nonspherical entries per degree: "
          f"{[float(table.min_nonspherical[n]) for n in range(1, N + 1)]}")
    print(f"  nondecreasing trend: {table.nondecreasing_trend} (reported, not asserted)")
    print()

    for NN in (2, 3):
        FF = gf.build_functional(ctx, 2 * NN, convention="right")
        rep = gl.gaussian_rank(NN, FF, "right", ctx)
        print(f"Gaussian part at truncation {NN}: dim {rep.dim_gaussian_part} "
              f"(image {rep.dim_image}, defect rank {rep.rank_ng}, "
              f"gap {float(rep.rank_gap):.2e})")
