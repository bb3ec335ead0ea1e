import random
from fractions import Fraction

import gmpy2
import pytest
from gmpy2 import mpc, mpfr

from podles import oqalg as oq
from podles.qseries import QContext

DEFAULT_Q = "0.5"
DEFAULT_A = "0.3"


@pytest.fixture(scope="session")
def ctx():
    return QContext(DEFAULT_Q, DEFAULT_A)


@pytest.fixture(scope="session")
def fun_right(ctx):
    from podles.genfun import build_functional
    with ctx.prec:
        return build_functional(ctx, 8, convention="right")


@pytest.fixture(scope="session")
def fun_left(ctx):
    from podles.genfun import build_functional
    with ctx.prec:
        return build_functional(ctx, 8, convention="left")


def dyadic(rng: random.Random):
    return mpfr(rng.getrandbits(30)) / 2 ** 30 - mpfr(1) / 2


def random_scalar(rng: random.Random) -> mpc:
    return mpc(dyadic(rng), dyadic(rng))


def random_element(rng: random.Random, degrees=(Fraction(0), Fraction(1, 2), Fraction(1))):
    from podles.linalg import Mat
    from podles.uqrep import dim_of
    blocks = {}
    for d in degrees:
        n = dim_of(d)
        M = Mat.zeros(n, n)
        for i in range(n):
            for j in range(n):
                M[i, j] = random_scalar(rng)
        blocks[d] = M
    return oq.element(blocks)


def random_coideal_element(rng: random.Random, ctx, convention, max_degree=1):
    x = oq.zero()
    for n in range(0, max_degree + 1):
        for _, el in oq.podles_basis(n, convention, ctx):
            x = oq.add(x, el, random_scalar(rng))
    return x
