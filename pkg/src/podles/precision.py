"""Arbitrary-precision scalar arithmetic on top of gmpy2 (MPFR/MPC).

All numerical work in this package runs at a configurable binary precision.
Tolerances for residual and rank decisions are derived from that precision so
that every identity check tightens uniformly when the precision is raised.
"""
from __future__ import annotations

import fractions
import threading
from dataclasses import dataclass, field

import gmpy2
from gmpy2 import mpc, mpfr

_tls = threading.local()


class PrecisionError(ValueError):
    """Raised when a rank or eigenvalue decision needs more mantissa bits."""


class FalsificationError(AssertionError):
    """A structural claim (PSD, rank-1 solution space, ...) failed decisively."""


@dataclass(frozen=True)
class PrecisionContext:
    """Mantissa precision in bits plus the derived decision tolerances.

    tol_residual (default 2**(-bits/2)) bounds residuals of exact identities;
    tol_rank (default 2**(-bits/4)) separates zero from nonzero in rank,
    kernel and PSD decisions.  Use an instance as a context manager to make
    gmpy2 compute at this precision (thread safe, re-entrant).
    """

    bits: int = 256
    tol_residual: mpfr = field(default=None)
    tol_rank: mpfr = field(default=None)

    def __post_init__(self):
        if self.bits < 64:
            raise ValueError(f"bits must be >= 64, got {self.bits}")
        if self.tol_residual is None:
            object.__setattr__(self, "tol_residual", mpfr(2) ** (-(self.bits // 2)))
        if self.tol_rank is None:
            object.__setattr__(self, "tol_rank", mpfr(2) ** (-(self.bits // 4)))
        if not (self.tol_rank > self.tol_residual > 0):
            raise ValueError("need tol_rank > tol_residual > 0")

    def __enter__(self):
        stack = getattr(_tls, "stack", None)
        if stack is None:
            stack = _tls.stack = []
        stack.append(gmpy2.get_context())
        gmpy2.set_context(gmpy2.context(precision=self.bits))
        return self

    def __exit__(self, *exc):
        gmpy2.set_context(_tls.stack.pop())
        return False


def to_real(x) -> mpfr:
    """Convert int/str/Fraction/float/mpfr to mpfr at the active precision.

    Strings and Fractions convert without an intermediate binary64 rounding,
    which matters when q and a are given as decimal strings.
    """
    if isinstance(x, mpfr):
        return mpfr(x)
    if isinstance(x, fractions.Fraction):
        return mpfr(x.numerator) / mpfr(x.denominator)
    return mpfr(x)


def to_complex(x) -> mpc:
    if isinstance(x, mpc):
        return mpc(x)
    if isinstance(x, complex):
        return mpc(mpfr(x.real), mpfr(x.imag))
    return mpc(to_real(x), mpfr(0))


def is_small(z, tol) -> bool:
    return abs(z) < tol


def real_part(z) -> mpfr:
    return z.real if isinstance(z, mpc) else mpfr(z)


I = mpc(0, 1)


def decimal_digits(bits: int) -> int:
    # enough decimal digits to round-trip a bits-bit mantissa
    return int(bits * 0.30103) + 3


def format_real(x, bits: int) -> str:
    """Full-precision decimal string '[-]0.<digits>e<exp>', run-to-run stable."""
    x = to_real(x)
    mant, exp, _ = x.digits(10, decimal_digits(bits))
    sign = "-" if mant.startswith("-") else ""
    return f"{sign}0.{mant.lstrip('-')}e{exp}"


def format_complex(z, bits: int) -> str:
    z = to_complex(z)
    re = format_real(z.real, bits)
    im = format_real(abs(z.imag), bits)
    return f"{re}{'-' if z.imag < 0 else '+'}{im}j"
