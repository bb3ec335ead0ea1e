"""The Peter-Weyl model of quantum SU(2): defining relations, star, torus
character, and the Podles-sphere coideal bases in both conventions.

Run:  python demos/03_coideal_algebra.py
"""
import gmpy2
from gmpy2 import mpfr

from podles import oqalg as oq
from podles.qseries import QContext

ctx = QContext("0.5", "0.3")

with ctx.prec:
    g = oq.generators(ctx)
    al, ga = g["alpha"], g["gamma"]
    als, gas = g["alpha_star"], g["gamma_star"]
    one = oq.unit()
    q = ctx.q

    print("defining relations of the coordinate algebra:")
    rel = oq.add(oq.add(oq.mul(als, al, ctx), oq.mul(gas, ga, ctx)), one, -1)
    print(f"  |alpha* alpha + gamma* gamma - 1| = {float(rel.norm()):.2e}")
    rel = oq.add(oq.add(oq.mul(al, als, ctx), oq.mul(ga, gas, ctx), q * q), one, -1)
    print(f"  |alpha alpha* + q^2 gamma gamma* - 1| = {float(rel.norm()):.2e}")
    rel = oq.add(oq.mul(al, ga, ctx), oq.mul(ga, al, ctx), -q)
    print(f"  |alpha gamma - q gamma alpha| = {float(rel.norm()):.2e}")
    print()

    # the torus character is a *-homomorphism separating the grading
    th = mpfr("0.9")
    x = oq.mul(al, oq.mul(ga, gas, ctx), ctx)
    lhs = oq.eval_torus(oq.star(x, ctx), th, ctx)
    rhs = oq.eval_torus(x, th, ctx).conjugate()
    print(f"torus character star compatibility: |dev| = {float(abs(lhs - rhs)):.2e}")
    print()

    # Podles coideal bases; the right convention indexes the free slot by the
    # eigenbasis of the pinned weight operator W = i pi(B_t)
    for conv in ("right", "left"):
        print(f"{conv} convention coideal basis, degrees 0..2:")
        for n in (0, 1, 2):
            items = oq.podles_basis(n, conv, ctx)
            members = []
            for idx, el in items:
                res = oq.coideal_membership(el, conv, ctx)
                tag = "sph" if idx.is_spherical else f"i={idx.i}"
                members.append(f"{tag} (membership {float(res):.1e})")
            print(f"  degree {n}: " + "; ".join(members))
        print()
