"""Exact integer linear algebra on small dense matrices.

Matrices are plain lists of lists of Python ints (or anything array-like that
converts to them).  Everything here is exact; nothing touches floating point.
"""
from fractions import Fraction
from itertools import combinations
from math import gcd

__all__ = [
    "as_int_matrix",
    "integer_kernel",
    "smith_normal_form",
    "smith_invariants",
    "determinantal_divisor",
    "fraction_free_det",
    "rank",
]


def as_int_matrix(A):
    rows = [[int(x) for x in row] for row in A]
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise ValueError("ragged matrix")
    return rows


def _xgcd(a, b):
    """Return (g, s, t) with s*a + t*b == g == gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def _col_op(M, i, j, a, b, c, d):
    # (col_i, col_j) <- (a*col_i + b*col_j, c*col_i + d*col_j)
    for row in M:
        x, y = row[i], row[j]
        row[i] = a * x + b * y
        row[j] = c * x + d * y


def _reduce_basis(vectors):
    """Greedy pairwise size reduction in the l1 norm (cosmetic, keeps the lattice)."""
    vecs = [list(v) for v in vectors]
    norm = lambda v: sum(abs(x) for x in v)
    changed = True
    while changed:
        changed = False
        for i in range(len(vecs)):
            for j in range(len(vecs)):
                if i == j:
                    continue
                for sign in (1, -1):
                    cand = [x + sign * y for x, y in zip(vecs[i], vecs[j])]
                    if norm(cand) < norm(vecs[i]):
                        vecs[i] = cand
                        changed = True
    out = []
    for v in vecs:
        # first nonzero entry negative, so binomials read "p^plus - p^minus" with plus on the right
        lead = next(x for x in v if x != 0)
        out.append(tuple(-x for x in v) if lead > 0 else tuple(v))
    return sorted(out, key=lambda v: (sum(abs(x) for x in v), v))


def integer_kernel(A, reduce=True):
    """Lattice basis of ``{x in Z^m : A x = 0}``.

    Unimodular column operations bring ``A`` to column echelon form while the
    same operations are recorded on an identity matrix; the recorded columns
    that end up opposite zero columns of ``A`` span the kernel lattice.
    """
    A = as_int_matrix(A)
    if not A:
        return []
    d, m = len(A), len(A[0])
    # stack [A; I] and operate on columns
    M = [row[:] for row in A] + [[int(i == j) for j in range(m)] for i in range(m)]
    pivot = 0
    for i in range(d):
        if pivot >= m:
            break
        for j in range(pivot + 1, m):
            if M[i][j] == 0:
                continue
            a, b = M[i][pivot], M[i][j]
            g, s, t = _xgcd(a, b)
            # [s t; -b/g a/g] has determinant 1
            _col_op(M, pivot, j, s, t, -b // g, a // g)
        if M[i][pivot] != 0:
            pivot += 1
    basis = [tuple(M[d + k][j] for k in range(m)) for j in range(pivot, m)]
    for v in basis:
        assert all(sum(A[r][c] * v[c] for c in range(m)) == 0 for r in range(d))
    return _reduce_basis(basis) if reduce else basis


def smith_normal_form(M):
    """Diagonal of the Smith normal form of an integer matrix.

    Returns the full diagonal (length ``min(rows, cols)``), zeros included,
    with each entry dividing the next.  Euclidean pivoting: the pivot's
    absolute value strictly decreases until it divides its row, column and
    remaining block.
    """
    T = as_int_matrix(M)
    if not T or not T[0]:
        return []
    rows, cols = len(T), len(T[0])
    for k in range(min(rows, cols)):
        while True:
            nz = [(abs(T[i][j]), i, j) for i in range(k, rows) for j in range(k, cols) if T[i][j]]
            if not nz:
                return [abs(T[i][i]) for i in range(min(rows, cols))]
            _, pi, pj = min(nz)
            T[k], T[pi] = T[pi], T[k]
            for row in T:
                row[k], row[pj] = row[pj], row[k]
            piv = T[k][k]
            clean = True
            for i in range(k + 1, rows):
                q = T[i][k] // piv
                if q:
                    T[i] = [x - q * y for x, y in zip(T[i], T[k])]
                clean &= T[i][k] == 0
            for j in range(k + 1, cols):
                q = T[k][j] // piv
                if q:
                    for row in T:
                        row[j] -= q * row[k]
                clean &= T[k][j] == 0
            if not clean:
                continue
            bad = next((i for i in range(k + 1, rows)
                        if any(T[i][j] % piv for j in range(k + 1, cols))), None)
            if bad is None:
                break
            T[k] = [x + y for x, y in zip(T[k], T[bad])]
    return [abs(T[i][i]) for i in range(min(rows, cols))]


def smith_invariants(M):
    """Nonzero invariant factors of ``M``."""
    return [x for x in smith_normal_form(M) if x]


def fraction_free_det(M):
    """Determinant by Bareiss elimination; exact for ints and Fractions."""
    n = len(M)
    if n == 0:
        return 1
    A = [list(row) for row in M]
    if any(len(r) != n for r in A):
        raise ValueError("determinant of a non-square matrix")
    exact_int = all(isinstance(x, int) for row in A for x in row)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = A[i][j] * A[k][k] - A[i][k] * A[k][j]
                A[i][j] = num // prev if exact_int else num / prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def rank(A):
    A = [[Fraction(x) for x in row] for row in as_int_matrix(A)]
    if not A:
        return 0
    r = 0
    rows, cols = len(A), len(A[0])
    for c in range(cols):
        p = next((i for i in range(r, rows) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        for i in range(rows):
            if i != r and A[i][c] != 0:
                f = A[i][c] / A[r][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        r += 1
        if r == rows:
            break
    return r


def determinantal_divisor(M, k):
    """gcd of all k x k minors of ``M`` (equals the product of the first k invariant factors)."""
    M = as_int_matrix(M)
    rows, cols = len(M), len(M[0])
    g = 0
    for ri in combinations(range(rows), k):
        for ci in combinations(range(cols), k):
            g = gcd(g, fraction_free_det([[M[i][j] for j in ci] for i in ri]))
    return abs(g)
