"""Exact integer and rational linear algebra.

Matrices are plain row-major lists of lists holding ``int`` or
``fractions.Fraction``.  Nothing here ever touches floating point.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

IntMatrix = list[list[int]]
RatMatrix = list[list[Fraction]]


class SingularMatrix(ValueError):
    pass


class RankDeficient(ValueError):
    pass


def factorize(n: int) -> dict[int, int]:
    """Prime factorisation of ``|n|`` by trial division (inputs here are small)."""
    n = abs(n)
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(M: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*M)]


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list[list]:
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def matvec(A: Sequence[Sequence], v: Sequence) -> list:
    return [sum(a * x for a, x in zip(row, v)) for row in A]


def block_diag(*blocks: Sequence[Sequence[int]]) -> IntMatrix:
    n = sum(len(b) for b in blocks)
    out = [[0] * n for _ in range(n)]
    off = 0
    for b in blocks:
        k = len(b)
        for i in range(k):
            for j in range(k):
                out[off + i][off + j] = b[i][j]
        off += k
    return out


def is_symmetric(M: Sequence[Sequence]) -> bool:
    n = len(M)
    return all(len(row) == n for row in M) and all(
        M[i][j] == M[j][i] for i in range(n) for j in range(i + 1, n)
    )


def det(M: Sequence[Sequence[int]]) -> int:
    """Integer determinant by fraction-free (Bareiss) elimination."""
    n = len(M)
    if n == 0:
        return 1
    A = [list(map(int, row)) for row in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k] != 0:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def rat_inverse(M: Sequence[Sequence]) -> RatMatrix:
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(M)]
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c] != 0), None)
        if p is None:
            raise SingularMatrix("matrix is singular")
        A[c], A[p] = A[p], A[c]
        inv = 1 / A[c][c]
        A[c] = [x * inv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [row[n:] for row in A]


# ---------------------------------------------------------------------------
# Smith normal form


def smith_normal_form(M: Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return ``(D, U, V)`` with ``U @ M @ V == D``.

    ``U`` and ``V`` are unimodular and ``D`` is diagonal with nonnegative
    entries forming a divisibility chain.  Pivots are chosen by minimal
    absolute value to keep the entries small.
    """
    rows = len(M)
    cols = len(M[0]) if rows else 0
    A = [list(map(int, r)) for r in M]
    U = identity(rows)
    V = identity(cols)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, f):  # row_dst += f * row_src
        A[dst] = [a + f * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + f * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, f):  # col_dst += f * col_src
        for row in A:
            row[dst] += f * row[src]
        for row in V:
            row[dst] += f * row[src]

    t = 0
    while t < min(rows, cols):
        nz = [(abs(A[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if A[i][j]]
        if not nz:
            break
        _, pi, pj = min(nz)
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            done = True
            for i in range(t + 1, rows):
                if A[i][t]:
                    q = A[i][t] // A[t][t]
                    add_row(i, t, -q)
                    if A[i][t]:
                        done = False
            for j in range(t + 1, cols):
                if A[t][j]:
                    q = A[t][j] // A[t][t]
                    add_col(j, t, -q)
                    if A[t][j]:
                        done = False
            if done:
                # pivot must divide the rest of the block
                bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                            if A[i][j] % A[t][t]), None)
                if bad is None:
                    break
                add_row(t, bad[0], 1)
                continue
            # move the smallest remaining entry of row/column t into the pivot
            cand = [(abs(A[i][t]), i, t) for i in range(t, rows) if A[i][t]]
            cand += [(abs(A[t][j]), t, j) for j in range(t, cols) if A[t][j]]
            _, pi, pj = min(cand)
            if pi != t:
                swap_rows(t, pi)
            if pj != t:
                swap_cols(t, pj)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return A, U, V


def invariant_factors(M: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero diagonal of the Smith form, in divisibility order."""
    D, _, _ = smith_normal_form(M)
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0)) if D[i][i]]


# ---------------------------------------------------------------------------
# Signature


def signature(G: Sequence[Sequence]) -> tuple[int, int]:
    """Inertia indices ``(n_plus, n_minus)`` of a nondegenerate symmetric matrix.

    Symmetric Gaussian elimination over the rationals.  When every remaining
    diagonal entry is zero a 2x2 hyperbolic block is split off instead,
    which contributes one positive and one negative square.
    """
    if not is_symmetric(G):
        raise ValueError("matrix is not symmetric")
    A = [[Fraction(x) for x in row] for row in G]
    pos = neg = 0
    while A:
        n = len(A)
        k = next((i for i in range(n) if A[i][i] != 0), None)
        if k is not None:
            p = A[k][k]
            pos += p > 0
            neg += p < 0
            rest = [i for i in range(n) if i != k]
            A = [[A[i][j] - A[i][k] * A[k][j] / p for j in rest] for i in rest]
            continue
        pair = next(((i, j) for i in range(n) for j in range(i + 1, n) if A[i][j] != 0), None)
        if pair is None:
            raise SingularMatrix("symmetric matrix is degenerate")
        i, j = pair
        c = A[i][j]
        pos += 1
        neg += 1
        # inverse of [[0, c], [c, 0]] is [[0, 1/c], [1/c, 0]]
        rest = [r for r in range(n) if r not in (i, j)]
        A = [[A[r][s] - (A[r][i] * A[j][s] + A[r][j] * A[i][s]) / c for s in rest] for r in rest]
    return pos, neg


# ---------------------------------------------------------------------------
# Rational linear systems


@dataclass(frozen=True)
class AffineSolutionSpace:
    """``particular + span(kernel)``; ``particular`` is None when inconsistent."""

    particular: tuple[Fraction, ...] | None
    kernel: tuple[tuple[Fraction, ...], ...]

    @property
    def consistent(self) -> bool:
        return self.particular is not None


def rref(A: Sequence[Sequence]) -> tuple[RatMatrix, list[int]]:
    M = [[Fraction(x) for x in row] for row in A]
    if not M:
        return M, []
    cols = len(M[0])
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M, pivots


def rational_solve(A: Sequence[Sequence], b: Sequence, ncols: int | None = None) -> AffineSolutionSpace:
    """Solve ``A x = b`` exactly.  ``ncols`` is needed only when ``A`` has no rows."""
    n = len(A[0]) if A else (ncols or 0)
    aug = [list(row) + [rhs] for row, rhs in zip(A, b)]
    R, pivots = rref(aug) if aug else ([], [])
    if n in pivots:
        return AffineSolutionSpace(None, ())
    x = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        x[c] = R[i][n]
    free = [c for c in range(n) if c not in pivots]
    kernel = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -R[i][f]
        kernel.append(tuple(v))
    return AffineSolutionSpace(tuple(x), tuple(kernel))


# ---------------------------------------------------------------------------
# Hermite form and saturation


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> IntMatrix:
    """Row-style Hermite normal form; zero rows are dropped.

    The result spans the same Z-module as ``rows``, is upper echelon with
    positive pivots, and entries above each pivot are reduced into
    ``[0, pivot)``.
    """
    A = [list(map(int, r)) for r in rows if any(r)]
    if not A:
        return []
    ncols = len(A[0])
    out: IntMatrix = []
    r = 0
    for c in range(ncols):
        if r >= len(A):
            break
        while True:
            nz = [i for i in range(r, len(A)) if A[i][c]]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(A[i][c]))
            A[r], A[p] = A[p], A[r]
            clean = True
            for i in range(r + 1, len(A)):
                if A[i][c]:
                    q = A[i][c] // A[r][c]
                    A[i] = [x - q * y for x, y in zip(A[i], A[r])]
                    clean = clean and A[i][c] == 0
            if clean:
                break
        if r < len(A) and A[r][c]:
            if A[r][c] < 0:
                A[r] = [-x for x in A[r]]
            for i in range(r):
                q = A[i][c] // A[r][c]
                if q:
                    A[i] = [x - q * y for x, y in zip(A[i], A[r])]
            r += 1
    out = [row for row in A[:r]]
    return out


def rank(M: Sequence[Sequence]) -> int:
    if not M:
        return 0
    return len(rref(M)[1])


def hermite_saturation(B: Sequence[Sequence[int]]) -> IntMatrix:
    """Basis (as columns) of the primitive closure of the column span of ``B``.

    ``B`` is an ``n x k`` integer matrix of full column rank.  The result is
    ``n x k`` and in column Hermite form, so equal saturations give equal
    output.
    """
    n = len(B)
    k = len(B[0]) if n else 0
    if rank(B) != k:
        raise RankDeficient("columns are linearly dependent")
    D, U, V = smith_normal_form(B)
    # B = U^-1 D V^-1, so span(B) = span of the first k columns of U^-1 scaled by d_i
    Uinv = rat_inverse(U)
    cols = [[int(Uinv[i][j]) for i in range(n)] for j in range(k)]
    return transpose(hermite_normal_form(cols))


def is_unimodular_matrix(M: Sequence[Sequence[int]]) -> bool:
    return abs(det(M)) == 1
