"""Small exact linear algebra over Z and Q.

Matrices are lists (or tuples) of rows.  Everything here is meant for the
tiny sizes that show up in quadratic form work (m <= 8 or so), so clarity
wins over speed.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import invariant_factors


def identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(a):
    return [list(row) for row in zip(*a)]


def matmul(a, b):
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def congruence(s, x):
    """Return ``x^T s x``."""
    return matmul(transpose(x), matmul(s, x))


def det(a):
    """Exact determinant (Bareiss for integers, Gauss for fractions)."""
    n = len(a)
    if n == 0:
        return 1
    if all(isinstance(v, int) for row in a for v in row):
        return _bareiss(a)
    m = [[Fraction(v) for v in row] for row in a]
    sign = 1
    result = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            sign = -sign
        p = m[col][col]
        result *= p
        for r in range(col + 1, n):
            f = m[r][col] / p
            if f:
                for c in range(col, n):
                    m[r][c] -= f * m[col][c]
    return sign * result


def _bareiss(a):
    n = len(a)
    m = [list(row) for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if m[r][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def rank(a):
    if not a or not a[0]:
        return 0
    m = [[Fraction(v) for v in row] for row in a]
    rows, cols = len(m), len(m[0])
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(r + 1, rows):
            f = m[i][c] / m[r][c]
            if f:
                for j in range(c, cols):
                    m[i][j] -= f * m[r][j]
        r += 1
        if r == rows:
            break
    return r


def inverse(a):
    """Exact inverse over Q; raises ZeroDivisionError for singular input."""
    n = len(a)
    m = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(a)]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        m[c], m[piv] = m[piv], m[c]
        p = m[c][c]
        m[c] = [v / p for v in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [row[n:] for row in m]


def common_denominator(a):
    d = 1
    for row in a:
        for v in row:
            d = lcm(d, Fraction(v).denominator)
    return d


def minors_nonnegative(a):
    """True iff every principal minor is >= 0 (positive semidefinite test)."""
    from itertools import combinations

    n = len(a)
    for k in range(1, n + 1):
        for idx in combinations(range(n), k):
            if det([[a[i][j] for j in idx] for i in idx]) < 0:
                return False
    return True


def hnf_basis(generators, n):
    """Lower triangular column HNF basis of the Z-span of integer ``generators``.

    ``generators`` is a list of column vectors of length ``n`` spanning a full
    rank lattice.  Returns an n x n matrix whose columns form the basis, with
    positive diagonal and entries left of the diagonal reduced into
    ``[0, pivot)``.
    """
    cols = [list(v) for v in generators if any(v)]
    basis = []
    for i in range(n):
        # gather everything with a nonzero entry in row i into one pivot column
        pivot = None
        rest = []
        for c in cols:
            if c[i] == 0:
                rest.append(c)
                continue
            if pivot is None:
                pivot = c
                continue
            while c[i] != 0:
                q = pivot[i] // c[i]
                pivot = [x - q * y for x, y in zip(pivot, c)]
                pivot, c = c, pivot
            if any(c):
                rest.append(c)
        if pivot is None:
            raise ValueError("generators do not span a full rank lattice")
        if pivot[i] < 0:
            pivot = [-x for x in pivot]
        basis.append(pivot)
        cols = rest
    # reduce below-diagonal entries of earlier columns by later pivots
    for j in range(n):
        for i in range(j + 1, n):
            piv = basis[i]
            q = basis[j][i] // piv[i]
            if q:
                basis[j] = [x - q * y for x, y in zip(basis[j], piv)]
    return transpose(basis)


def elementary_divisors(a):
    """Invariant factors of a nonsingular integer matrix (Smith form diagonal)."""
    dm = DomainMatrix([[ZZ(int(v)) for v in row] for row in a], (len(a), len(a[0])), ZZ)
    return [abs(int(v)) for v in invariant_factors(dm)]


def content_gcd(values):
    g = 0
    for v in values:
        g = gcd(g, int(v))
    return g

