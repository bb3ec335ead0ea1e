"""q-brackets, q-Pochhammer symbols and terminating basic hypergeometric
series at 256-bit precision.

Run:  python demos/01_qseries_basics.py
"""
import gmpy2
from gmpy2 import mpc, mpfr

from podles.qseries import QContext, bracket, basic_hypergeometric, q_pochhammer, q_pochhammer_infinite

ctx = QContext("0.5", "0.3")

with ctx.prec:
    q = ctx.q
    print(f"q = {q},  a = {ctx.a}")
    print(f"[a]  = {ctx.bracket_a}")
    print(f"t    = q^a - q^-a = {ctx.t}")
    print(f"c'   = (q+q^-1)^-1 t^2 = {ctx.cprime}")
    print(f"kappa = {ctx.kappa}")
    print()

    # the three bracket flavours at a few points
    for x in (0, 1, 2, mpfr("0.3")):
        print(f"  [{x}] = {bracket('square', x, ctx)}   "
              f"[[{x}]] = {bracket('double', x, ctx)}   "
              f"{{{x}}} = {bracket('curly', x, ctx)}")
    print()

    # the defining ratio (b; q)_n (b q^n; q)_inf = (b; q)_inf
    b = mpc(mpfr("0.37"), mpfr("0.11"))
    for n in (0, 5, 20):
        lhs = q_pochhammer(b, q, n) * q_pochhammer(b * q ** n, q)
        rhs = q_pochhammer(b, q)
        print(f"  defining ratio at n={n:2d}: |lhs - rhs| = {float(abs(lhs - rhs)):.3e}")
    val, idx = q_pochhammer_infinite(b, q)
    print(f"  (b; q)_inf = {val}")
    print(f"  truncated after {idx} factors (first omitted < 2^-256)")
    print()

    # a terminating 3phi2: the unit numerator parameter collapses the sum
    v = basic_hypergeometric([mpfr(1), mpfr(2), mpfr(3)], [mpfr(5), mpfr(7)],
                             q, mpc(100))
    print(f"  3phi2 with a unit numerator parameter = {v} (only i = 0 survives)")
