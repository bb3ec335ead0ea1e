"""Spin representations, the coideal operators, kernel vectors and spherical
vectors, including the numerical verdict on the antipode-candidate identity.

Run:  python demos/02_representations.py
"""
from fractions import Fraction

from podles.linalg import norm
from podles.qseries import QContext
from podles.uqrep import (kernel_vector, op_matrices, rep,
                          spherical_vector, validate_R_candidate,
                          weight_eigenbasis)

ctx = QContext("0.5", "0.3")

with ctx.prec:
    # defining relations hold to working precision for every spin
    for twice_s in range(0, 9):
        s = Fraction(twice_s, 2)
        r = rep(s, ctx)
        q = ctx.q
        dev = max(
            ((r.k @ r.e) - (r.e @ r.k).scale(q * q)).max_abs(),
            ((r.e @ r.f) - (r.f @ r.e)
             - (r.k - r.k_inv).scale(1 / (q - 1 / q))).max_abs(),
            ((r.B @ r.C) - (r.C @ r.B)
             - ((r.A @ r.A) - (r.D @ r.D)).scale(1 / (q - 1 / q))).max_abs(),
        )
        print(f"spin {s}: relation residual {float(dev):.2e}")
    print()

    # the kernel of the twisted primitive operator exists only at integer spin
    for s in (1, 2, 3):
        ops = op_matrices(s, ctx)
        v = kernel_vector(s, ctx)
        print(f"spin {s}: |X v_closed_form| = {float(norm(ops.X.matvec(v))):.2e}")
    print()

    # spherical vectors in both conventions
    for conv in ("left", "right"):
        v = spherical_vector(1, conv, ctx)
        print(f"n=1 {conv:5s} spherical vector: "
              + ", ".join(f"{complex(x):.6f}" for x in v))
    evals, _ = weight_eigenbasis(1, ctx)
    print(f"W_1 spectrum: {[float(e) for e in evals]}  ([a] = {float(ctx.bracket_a):.6f})")
    print()

    # the candidate unitary antipodes fail the displayed identity; the report
    # records the residuals and the spectrum mismatch against [a+2i]
    rep_ = validate_R_candidate(1, ctx)
    print("antipode candidate diagnostics at spin 1:")
    for tag in ("S", "S_inv"):
        print(f"  {tag}: identity residual {float(rep_[f'residual_identity_{tag}']):.3f}, "
              f"flipped {float(rep_[f'residual_identity_flipped_{tag}']):.3f}, "
              f"spectrum vs [a+2i] {float(rep_[f'spectrum_vs_reference_{tag}']):.3f}")
