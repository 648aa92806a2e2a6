"""Fincke-Pohst enumeration of short vectors of a positive definite form.

The Gram matrix ``g`` is an integer symmetric matrix and the norm of ``x``
is ``x^T g x``.  Ranges are computed in floating point and widened slightly;
every candidate is then checked with exact integer arithmetic, so the output
is exact as long as the float Cholesky data is not wildly off.
"""

from __future__ import annotations

import math
from functools import lru_cache


def _pohst_data(g):
    n = len(g)
    q = [[float(v) for v in row] for row in g]
    for i in range(n):
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k][l] -= q[k][i] * q[i][l]
    for i in range(n):
        if q[i][i] <= 0:
            raise ValueError("Gram matrix is not positive definite")
    return q


def _norm(g, x):
    n = len(x)
    total = 0
    for i in range(n):
        xi = x[i]
        if xi:
            row = g[i]
            total += xi * sum(row[j] * x[j] for j in range(n))
    return total


def short_vectors(g, bound):
    """All ``(norm, x)`` with ``x^T g x <= bound``, sorted by norm then x.

    Includes the zero vector.  ``g`` must be integral positive definite.
    """
    g = tuple(tuple(int(v) for v in row) for row in g)
    return list(_short_vectors(g, int(bound)))


@lru_cache(maxsize=256)
def _short_vectors(g, bound):
    n = len(g)
    if bound < 0:
        return ()
    q = _pohst_data(g)
    slack = 1e-7 * (abs(bound) + 1)
    x = [0] * n
    found = []

    def rec(i, remaining):
        c = 0.0
        for j in range(i + 1, n):
            c += q[i][j] * x[j]
        r = math.sqrt(max(remaining, 0.0) / q[i][i]) + 1e-7
        lo = math.ceil(-c - r)
        hi = math.floor(-c + r)
        for xi in range(lo, hi + 1):
            t = q[i][i] * (xi + c) ** 2
            if t > remaining + slack:
                continue
            x[i] = xi
            if i == 0:
                found.append(tuple(x))
            else:
                rec(i - 1, remaining - t)
        x[i] = 0

    rec(n - 1, float(bound))
    out = []
    for v in found:
        nv = _norm(g, v)
        if nv <= bound:
            out.append((nv, v))
    out.sort()
    return tuple(out)


def vectors_by_norm(g, bound):
    """Map norm -> list of vectors for all vectors with norm <= bound."""
    table = {}
    for nv, v in short_vectors(g, bound):
        table.setdefault(nv, []).append(v)
    return table


def inner(g, x, y):
    return sum(x[i] * sum(g[i][j] * y[j] for j in range(len(y))) for i in range(len(x)) if x[i])
