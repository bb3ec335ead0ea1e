"""Dense complex linear algebra at working precision.

Everything here operates on plain lists of gmpy2.mpc scalars.  The Hermitian
eigensolver is a cyclic Jacobi iteration, chosen because it stays accurate at
any mantissa size and needs no external fixed-precision kernels.  Rank,
nullspace and singular values are derived from it through A^dagger A.
"""
from __future__ import annotations

import gmpy2
from gmpy2 import mpc, mpfr

from .precision import FalsificationError, PrecisionError, to_complex


class Mat:
    """Dense matrix with gmpy2.mpc entries, stored as a list of row lists."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows):
        self.rows = rows
        self.nrows = len(rows)
        self.ncols = len(rows[0]) if rows else 0

    @staticmethod
    def zeros(n, m) -> "Mat":
        z = mpc(0)
        return Mat([[z] * m for _ in range(n)])

    @staticmethod
    def identity(n) -> "Mat":
        out = Mat.zeros(n, n)
        one = mpc(1)
        for i in range(n):
            out.rows[i][i] = one
        return out

    @staticmethod
    def from_entries(entries) -> "Mat":
        return Mat([[to_complex(x) for x in row] for row in entries])

    def copy(self) -> "Mat":
        return Mat([row[:] for row in self.rows])

    def __getitem__(self, ij):
        return self.rows[ij[0]][ij[1]]

    def __setitem__(self, ij, v):
        self.rows[ij[0]][ij[1]] = to_complex(v)

    def shape(self):
        return (self.nrows, self.ncols)

    def __add__(self, other: "Mat") -> "Mat":
        return Mat([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other: "Mat") -> "Mat":
        return Mat([[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def scale(self, c) -> "Mat":
        c = to_complex(c)
        return Mat([[c * a for a in row] for row in self.rows])

    def __matmul__(self, other: "Mat") -> "Mat":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape()} @ {other.shape()}")
        orows = other.rows
        out = []
        zero = mpc(0)
        for arow in self.rows:
            acc = [zero] * other.ncols
            for k, aik in enumerate(arow):
                if aik == 0:
                    continue
                brow = orows[k]
                acc = [s + aik * b for s, b in zip(acc, brow)]
            out.append(acc)
        return Mat(out)

    def matvec(self, v):
        return [sum((a * x for a, x in zip(row, v)), mpc(0)) for row in self.rows]

    def transpose(self) -> "Mat":
        return Mat([list(col) for col in zip(*self.rows)])

    def conjugate(self) -> "Mat":
        return Mat([[a.conjugate() for a in row] for row in self.rows])

    def dagger(self) -> "Mat":
        return Mat([[a.conjugate() for a in col] for col in zip(*self.rows)])

    def frobenius(self) -> mpfr:
        s = mpfr(0)
        for row in self.rows:
            for a in row:
                s += a.real * a.real + a.imag * a.imag
        return gmpy2.sqrt(s)

    def max_abs(self) -> mpfr:
        m = mpfr(0)
        for row in self.rows:
            for a in row:
                v = abs(a)
                if v > m:
                    m = v
        return m

    def column(self, j):
        return [row[j] for row in self.rows]

    def __repr__(self):
        return f"Mat({self.nrows}x{self.ncols})"


# ---------------------------------------------------------------------------
# vector helpers; inner products are conjugate linear in the first argument

def vdot(u, v) -> mpc:
    return sum((a.conjugate() * b for a, b in zip(u, v)), mpc(0))


def norm(v) -> mpfr:
    s = mpfr(0)
    for a in v:
        s += a.real * a.real + a.imag * a.imag
    return gmpy2.sqrt(s)


def normalize(v):
    n = norm(v)
    if n == 0:
        raise ZeroDivisionError("cannot normalize the zero vector")
    return [a / n for a in v]


def fix_phase(v, tol=None):
    """Rescale a vector by a unit phase so its first nonzero entry is real > 0."""
    cut = tol if tol is not None else mpfr(2) ** (-gmpy2.get_context().precision // 3)
    for a in v:
        if abs(a) > cut:
            ph = a / abs(a)
            return [x / ph for x in v]
    return list(v)


def outer_conj_first(v, w) -> Mat:
    """Matrix conj(v) w^T, the coefficient block of a matrix unit u_{v,w}."""
    return Mat([[v[i].conjugate() * w[j] for j in range(len(w))] for i in range(len(v))])


# ---------------------------------------------------------------------------
# Hermitian eigensolver (cyclic Jacobi with complex rotations)

def eigh(H: Mat, max_sweeps: int = 64):
    """Eigenvalues (ascending) and orthonormal eigenvectors of Hermitian H.

    Returns (evals, V) with V a Mat whose columns are the eigenvectors,
    phase fixed so each column's first significant entry is real positive.
    """
    n = H.nrows
    if n == 0:
        return [], Mat([])
    prec = gmpy2.get_context().precision
    A = [[to_complex(x) for x in row] for row in H.rows]
    V = [[mpc(1) if i == j else mpc(0) for j in range(n)] for i in range(n)]
    stop = mpfr(2) ** (-(prec - 8))
    scale = max(H.max_abs(), mpfr(1))

    for _ in range(max_sweeps):
        off = mpfr(0)
        for p in range(n):
            for q_ in range(p + 1, n):
                off += abs(A[p][q_])
        if off <= stop * scale:
            break
        for p in range(n):
            for q_ in range(p + 1, n):
                apq = A[p][q_]
                if abs(apq) <= stop * scale / (n * n):
                    continue
                app = A[p][p].real
                aqq = A[q_][q_].real
                r = abs(apq)
                phase = apq / r
                tau = (aqq - app) / (2 * r)
                # smallest-magnitude root of t^2 + 2*tau*t - 1 = 0
                t = gmpy2.sqrt(tau * tau + 1)
                t = 1 / (tau + t) if tau >= 0 else 1 / (tau - t)
                c = 1 / gmpy2.sqrt(t * t + 1)
                s = t * c
                sp = s * phase
                spc = sp.conjugate()
                # right multiply columns p,q of A and V by J, left by J^dagger
                for i in range(n):
                    aip = A[i][p]
                    aiq = A[i][q_]
                    A[i][p] = c * aip - spc * aiq
                    A[i][q_] = sp * aip + c * aiq
                for j in range(n):
                    apj = A[p][j]
                    aqj = A[q_][j]
                    A[p][j] = c * apj - sp * aqj
                    A[q_][j] = spc * apj + c * aqj
                for i in range(n):
                    vip = V[i][p]
                    viq = V[i][q_]
                    V[i][p] = c * vip - spc * viq
                    V[i][q_] = sp * vip + c * viq
    else:
        off = mpfr(0)
        for p in range(n):
            for q_ in range(p + 1, n):
                off += abs(A[p][q_])
        if off > stop * scale:
            raise PrecisionError("Jacobi eigensolver did not converge; raise precision_bits")

    evals = [A[i][i].real for i in range(n)]
    order = sorted(range(n), key=lambda i: evals[i])
    evals_sorted = [evals[i] for i in order]
    cols = []
    for i in order:
        col = fix_phase(normalize([V[r][i] for r in range(n)]))
        cols.append(col)
    Vm = Mat([[cols[j][i] for j in range(n)] for i in range(n)])
    return evals_sorted, Vm


def singular_values(A: Mat):
    """Singular values of A, ascending, via the Hermitian eigenproblem of A^dagger A."""
    evals, _ = eigh(A.dagger() @ A)
    return [gmpy2.sqrt(e) if e > 0 else mpfr(0) for e in evals]


def nullspace(A: Mat, tol) -> list:
    """Orthonormal basis (list of vectors) of the numerical nullspace of A."""
    evals, V = eigh(A.dagger() @ A)
    out = []
    for j, e in enumerate(evals):
        sv = gmpy2.sqrt(e) if e > 0 else mpfr(0)
        if sv < tol:
            out.append(V.column(j))
    return out


def numerical_rank(A: Mat, tol) -> int:
    return sum(1 for sv in singular_values(A) if sv >= tol)


def solve(A: Mat, b):
    """Solve A x = b by Gaussian elimination with partial pivoting."""
    n = A.nrows
    if A.ncols != n or len(b) != n:
        raise ValueError("solve needs a square system")
    M = [row[:] + [to_complex(bi)] for row, bi in zip(A.rows, b)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(M[r][col]))
        if abs(M[piv][col]) == 0:
            raise ZeroDivisionError("singular system")
        M[col], M[piv] = M[piv], M[col]
        inv = 1 / M[col][col]
        for r in range(col + 1, n):
            f = M[r][col] * inv
            if f == 0:
                continue
            M[r] = [a - f * c for a, c in zip(M[r], M[col])]
    x = [mpc(0)] * n
    for r in range(n - 1, -1, -1):
        acc = M[r][n]
        for c in range(r + 1, n):
            acc -= M[r][c] * x[c]
        x[r] = acc / M[r][r]
    return x


def lstsq(A: Mat, b):
    """Least-squares solution of A x ~ b via normal equations, with residual."""
    At = A.dagger()
    x = solve(At @ A, At.matvec(b))
    r = [sum((a * xi for a, xi in zip(row, x)), mpc(0)) - bi for row, bi in zip(A.rows, b)]
    return x, norm(r)


def rank_one_nullvector(A: Mat, tol) -> list:
    """The nullspace vector of A when that nullspace is exactly one dimensional."""
    vecs = nullspace(A, tol)
    if len(vecs) != 1:
        raise FalsificationError(
            f"expected a one dimensional nullspace, found {len(vecs)} (tol={tol})")
    return fix_phase(vecs[0])
