"""q-brackets, q-Pochhammer symbols, terminating basic hypergeometric series,
Askey-Wilson polynomial evaluation and dense polynomial utilities.

Scalars are gmpy2 mpfr/mpc at the precision carried by the QContext.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import gmpy2
from gmpy2 import mpc, mpfr

from .precision import I, PrecisionContext, to_complex, to_real


@dataclass(frozen=True)
class QContext:
    """Deformation data (q, a) with the derived scalars used everywhere.

    t = q^a - q^-a, bracket_a = [a] = t/(q - q^-1),
    cprime = (q + q^-1)^-1 t^2 and the normalization constant
    kappa = {a+2} {a}^-1 ({2a+1} + q + q^-1)^-1.
    """

    q: mpfr
    a: mpfr
    prec: PrecisionContext = field(default_factory=PrecisionContext)

    def __post_init__(self):
        with self.prec:
            qv = to_real(self.q)
            av = to_real(self.a)
            if not (0 < qv < 1):
                raise ValueError(f"q must lie in (0,1), got {qv}")
            object.__setattr__(self, "q", qv)
            object.__setattr__(self, "a", av)
            if self.kappa <= 0:
                raise ValueError("kappa must be positive")

    # derived scalars -------------------------------------------------
    @property
    def t(self) -> mpfr:
        return bracket("double", self.a, self)

    @property
    def bracket_a(self) -> mpfr:
        return bracket("square", self.a, self)

    @property
    def cprime(self) -> mpfr:
        c = self.q + 1 / self.q
        return self.t ** 2 / c

    @property
    def kappa(self) -> mpfr:
        c = self.q + 1 / self.q
        return bracket("curly", self.a + 2, self) / bracket("curly", self.a, self) / (
            bracket("curly", 2 * self.a + 1, self) + c)

    def qpow(self, x) -> mpfr:
        return self.q ** to_real(x)


def bracket(kind: str, x, ctx: QContext) -> mpfr:
    """q-brackets: square [x], double (q^x - q^-x), curly (q^x + q^-x)."""
    with ctx.prec:
        qx = ctx.qpow(x)
        qxi = 1 / qx
        if kind == "square":
            return (qx - qxi) / (ctx.q - 1 / ctx.q)
        if kind == "double":
            return qx - qxi
        if kind == "curly":
            return qx + qxi
    raise ValueError(f"unknown bracket kind {kind!r}")


def q_pochhammer(b, base, n=None):
    """(b; base)_n as a finite product, or the infinite product when n is
    None or math.inf.

    The infinite product truncates once |b * base^i| < 2^-prec; the index at
    which that happened is available through q_pochhammer_infinite.
    """
    if n is None or n == math.inf:
        return q_pochhammer_infinite(b, base)[0]
    b = to_complex(b)
    base = to_real(base)
    out = mpc(1)
    p = mpc(1)
    for _ in range(int(n)):
        out *= 1 - b * p
        p *= base
    return out


def q_pochhammer_infinite(b, base):
    """Infinite q-Pochhammer with the truncation index reported.

    Truncation is error bounded by the first omitted factor, which decays
    geometrically since 0 < base < 1.
    """
    base = to_real(base)
    if not (0 < base < 1):
        raise ValueError("infinite q-Pochhammer needs 0 < base < 1")
    b = to_complex(b)
    cut = mpfr(2) ** (-gmpy2.get_context().precision)
    out = mpc(1)
    term = mpc(b)
    i = 0
    while abs(term) >= cut:
        out *= 1 - term
        term *= base
        i += 1
        if i > 10_000_000:
            raise RuntimeError("q-Pochhammer truncation did not engage")
    return out, i


class NonTerminatingSeriesError(ValueError):
    """The hypergeometric parameters do not force termination."""


def _termination_index(num, base):
    """Smallest m with some numerator parameter equal to base^-m, else None."""
    tol = mpfr(2) ** (-gmpy2.get_context().precision // 2)
    best = None
    logb = gmpy2.log(base)
    for p in num:
        p = to_complex(p)
        if abs(p - 1) < tol:
            best = 0 if best is None else min(best, 0)
            continue
        ap = abs(p)
        if ap <= 1:
            continue
        m = int(round(float(-gmpy2.log(ap) / logb)))
        if m >= 1 and abs(p * base ** m - 1) < tol:
            best = m if best is None else min(best, m)
    return best


def basic_hypergeometric(num, den, base, z) -> mpc:
    """Terminating r+1 phi r series sum_i (num; base)_i z^i / ((den; base)_i (base; base)_i).

    Only terminating parameter sets are accepted: some numerator parameter
    must equal base^-m for a natural m (m = 0, i.e. the parameter 1, collapses
    the sum to its i = 0 term).  Anything else raises, by design.
    """
    if len(num) != len(den) + 1:
        raise ValueError("need exactly one more numerator than denominator parameter")
    base = to_real(base)
    z = to_complex(z)
    num = [to_complex(p) for p in num]
    den = [to_complex(p) for p in den]
    m = _termination_index(num, base)
    if m is None:
        raise NonTerminatingSeriesError(
            "series does not terminate; this artifact only evaluates terminating series")
    total = mpc(0)
    term = mpc(1)
    bp = mpfr(1)  # base**i
    for i in range(m + 1):
        total += term
        if i == m:
            break
        f = z
        for p in num:
            f *= 1 - p * bp
        for p in den:
            d = 1 - p * bp
            if d == 0:
                raise ZeroDivisionError("denominator Pochhammer vanished before termination")
            f /= d
        f /= 1 - base * bp
        term *= f
        bp *= base
    return total


# ---------------------------------------------------------------------------
# Askey-Wilson evaluation


def askey_wilson(n: int, x, ctx: QContext) -> mpfr:
    """Askey-Wilson polynomial p_n(x; -q^(-2a+1), -q^(2a+1), q, q | q^2).

    Evaluated through the 4phi3 form with every Pochhammer, the series base
    and the argument taken in q^2, and prefactor u^-n (q^2, -q^(-2a+2),
    -q^(-2a+2); q^2)_n with u = -q^(-2a+1).  The paired parameters
    u e^(i theta), u e^(-i theta) enter only through the real combination
    1 - 2 u q^(2j) x + u^2 q^(4j), so any real x is accepted and the value is
    real.  See q_poly for the cross-check that pins this normalization.
    """
    with ctx.prec:
        q = ctx.q
        q2 = q * q
        x = to_real(x)
        u = -(q ** (-2 * ctx.a + 1))
        b = -(q ** (-2 * ctx.a + 2))
        pref = u ** (-n)
        pref *= q_pochhammer(q2, q2, n).real
        pref *= (q_pochhammer(b, q2, n) ** 2).real
        total = mpfr(0)
        term = mpfr(1)
        q2i = mpfr(1)  # q^(2i)
        for i in range(n + 1):
            total += term
            if i == n:
                break
            f = q2
            f *= 1 - q ** (-2 * n) * q2i
            f *= 1 - q ** (2 * n + 2) * q2i
            f *= 1 - 2 * u * q2i * x + u * u * q2i * q2i
            # the denominator parameter q^2 and the series' own (q^2; q^2)
            # factor coincide at base q^2, hence the square
            f /= (1 - q2 * q2i) ** 2
            f /= (1 - b * q2i) ** 2
            term *= f
            q2i *= q2
        return pref * total


def askey_wilson_base_q(n: int, x, ctx: QContext) -> mpfr:
    """Alternative reading of the closed form with base q throughout and the
    prefactor power +n.  It fails the Fourier cross-check even up to a
    constant; kept only so the two-route report can show the discrepancy.
    """
    with ctx.prec:
        q = ctx.q
        x = to_real(x)
        u = -(q ** (-2 * ctx.a + 1))
        b = -(q ** (-2 * ctx.a + 2))
        pref = u ** n
        pref *= q_pochhammer(q * q, q, n).real
        pref *= (q_pochhammer(b, q, n) ** 2).real
        total = mpfr(0)
        term = mpfr(1)
        qi = mpfr(1)
        for i in range(n + 1):
            total += term
            if i == n:
                break
            f = q
            f *= 1 - q ** (-n) * qi
            f *= 1 - q ** (n + 3) * qi
            f *= 1 - 2 * u * qi * x + u * u * qi * qi
            f /= 1 - q * q * qi
            f /= (1 - b * qi) ** 2
            f /= 1 - q * qi
            term *= f
            qi *= q
        return pref * total


# ---------------------------------------------------------------------------
# dense polynomials


class Polynomial:
    """Polynomial with mpc coefficients, ascending degree, trailing zeros trimmed."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = [to_complex(c) for c in coeffs] or [mpc(0)]
        self._trim()

    def _trim(self):
        cut = mpfr(0)
        while len(self.coeffs) > 1 and abs(self.coeffs[-1]) == cut:
            self.coeffs.pop()

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        x = to_complex(x)
        acc = mpc(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_real(self, x) -> mpfr:
        return self(x).real

    def derivative(self) -> "Polynomial":
        if len(self.coeffs) == 1:
            return Polynomial([mpc(0)])
        return Polynomial([k * c for k, c in enumerate(self.coeffs)][1:])

    def affine_compose(self, alpha, beta) -> "Polynomial":
        """The polynomial X -> P(alpha X + beta), by Horner in poly arithmetic."""
        alpha = to_complex(alpha)
        beta = to_complex(beta)
        acc = [mpc(0)]
        for c in reversed(self.coeffs):
            # acc <- acc*(alpha X + beta) + c
            shifted = [mpc(0)] + [alpha * v for v in acc]
            for k, v in enumerate(acc):
                shifted[k] += beta * v
            shifted[0] += c
            acc = shifted
        return Polynomial(acc)

    def scale(self, c) -> "Polynomial":
        c = to_complex(c)
        return Polynomial([c * v for v in self.coeffs])

    def __add__(self, other: "Polynomial") -> "Polynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        out = [mpc(0)] * n
        for k, c in enumerate(self.coeffs):
            out[k] += c
        for k, c in enumerate(other.coeffs):
            out[k] += c
        return Polynomial(out)

    def max_imag(self) -> mpfr:
        return max(abs(c.imag) for c in self.coeffs)

    def __repr__(self):
        return f"Polynomial(degree={self.degree})"


def fourier_to_chebyshev(even_coeffs) -> Polynomial:
    """The polynomial R with R(cos t) = c_0 + 2 sum_{i>=1} c_i cos(i t).

    Uses the Chebyshev three-term recursion to convert the symmetric Fourier
    data into monomial coefficients.
    """
    cs = [to_complex(c) for c in even_coeffs]
    n = len(cs) - 1
    # monomial coefficient lists for T_0..T_n
    T = [[mpc(1)], [mpc(0), mpc(1)]]
    for k in range(2, n + 1):
        prev, back = T[k - 1], T[k - 2]
        nxt = [mpc(0)] + [2 * c for c in prev]
        for j, c in enumerate(back):
            nxt[j] -= c
        T.append(nxt)
    out = [mpc(0)] * (n + 1)
    for j, c in enumerate(T[0]):
        out[j] += cs[0] * c
    for i in range(1, n + 1):
        for j, c in enumerate(T[i]):
            out[j] += 2 * cs[i] * c
    return Polynomial(out)


def theta_grid(count: int):
    """Deterministic open theta grid pi*(j+1/2)/count, j = 0..count-1."""
    pi = gmpy2.const_pi()
    return [pi * (2 * j + 1) / (2 * count) for j in range(count)]
