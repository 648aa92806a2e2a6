"""Representation numbers A(S, T) and truncated theta series.

A(S, T) counts integer m x n matrices X with S[X] = X^T S X = T.  In doubled
coordinates this is X^T (2S) X = 2T, so everything reduces to integer
arithmetic once a rational Gram matrix is cleared of denominators.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

from . import _linalg as la
from .core_forms import (
    HalfIntegralForm,
    as_form,
    det_doubled,
    is_positive_definite,
    level,
    theta_character,
)
from .lattice import inner, short_vectors, vectors_by_norm
from .qexp import FourierExpansion


class RationalForm:
    """A positive definite symmetric matrix with rational entries (not doubled).

    Used for Gram matrices of rational lattices such as duals and Kitaoka
    partners, where the quadratic form is x -> x^T S x.
    """

    def __init__(self, entries):
        self.entries = tuple(tuple(Fraction(v) for v in row) for row in entries)
        n = len(self.entries)
        if n == 0 or any(len(r) != n for r in self.entries):
            raise ValueError("square nonempty matrix required")
        if any(self.entries[i][j] != self.entries[j][i] for i in range(n) for j in range(i)):
            raise ValueError("matrix must be symmetric")

    @property
    def n(self):
        return len(self.entries)

    def doubled(self):
        return [[2 * v for v in row] for row in self.entries]

    def scaled(self, c):
        return RationalForm([[c * v for v in row] for row in self.entries])

    def to_half_integral(self):
        return HalfIntegralForm.from_half(self.entries)

    def __eq__(self, other):
        return isinstance(other, RationalForm) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        return f"RationalForm({[[str(v) for v in r] for r in self.entries]})"


def _integral_gram(s):
    """Return (g, den) with g integral and x^T g x = den * 2 * S[x]."""
    if isinstance(s, HalfIntegralForm):
        return s.doubled, 1
    if hasattr(s, "form"):  # LatticeBasis
        s = s.form
    if not isinstance(s, RationalForm):
        s = as_form(s)
        return s.doubled, 1
    dbl = s.doubled()
    den = la.common_denominator(dbl)
    return tuple(tuple(int(v * den) for v in row) for row in dbl), den


def _doubled_target(t):
    if isinstance(t, HalfIntegralForm):
        return [[Fraction(v) for v in row] for row in t.doubled]
    if isinstance(t, RationalForm):
        return t.doubled()
    return [[Fraction(v) for v in row] for row in as_form(t).doubled]


def rep_number(s, t):
    """A(S, T) = #{X in Z^{m,n} : S[X] = T} by column-wise enumeration."""
    g, den = _integral_gram(s)
    if not la.det(g) > 0 or not all(la.det([r[:k] for r in g[:k]]) > 0 for k in range(1, len(g) + 1)):
        raise ValueError("rep_number needs a positive definite S")
    target = _doubled_target(t)
    n = len(target)
    scaled = [[v * den for v in row] for row in target]
    if any(v.denominator != 1 for row in scaled for v in row):
        return 0
    tt = [[int(v) for v in row] for row in scaled]
    if any(tt[i][i] < 0 for i in range(n)) or not la.minors_nonnegative(tt):
        return 0
    table = vectors_by_norm(g, max(tt[i][i] for i in range(n)))
    cands = [table.get(tt[i][i], []) for i in range(n)]
    if any(not c for c in cands):
        return 0
    cols = []

    def rec(i):
        if i == n:
            return 1
        total = 0
        for v in cands[i]:
            if all(inner(g, cols[j], v) == tt[j][i] for j in range(i)):
                cols.append(v)
                total += rec(i + 1)
                cols.pop()
        return total

    return rec(0)


def square_rep_count(s, t):
    """#{W in M_r(Z), det W != 0 : S[W] = T} for S, T of the same size r."""
    s, t = as_form(s), as_form(t)
    if s.n != t.n:
        raise ValueError("square_rep_count needs forms of equal size")
    if not (is_positive_definite(s) and is_positive_definite(t)):
        raise ValueError("square_rep_count needs positive definite forms")
    ds, dt = det_doubled(s), det_doubled(t)
    if dt < ds or dt % ds:
        return 0
    q = dt // ds
    if isqrt(q) ** 2 != q:
        return 0
    # T positive definite forces every representing W to be nonsingular
    return rep_number(s, t)


def theta_expansion(s, n, bound):
    """theta_S^{(n)} with coefficients A(S, T) for all T with tr(T) <= bound."""
    s = as_form(s)
    if not is_positive_definite(s):
        raise ValueError("theta series needs a positive definite S")
    g = s.doubled
    m = s.n
    meta = dict(weight=Fraction(m, 2) if m % 2 else m // 2, level=level(s), gl_invariant=True)
    if m % 2 == 0:
        meta["character"] = theta_character(s)
    if n == 0:
        return FourierExpansion(0, bound, {HalfIntegralForm._empty(): 1}, **meta)
    vecs = short_vectors(g, 2 * bound)
    norms = [nv for nv, _ in vecs]
    counts = {}
    if n == 1:
        for nv in norms:
            key = ((nv,),)
            counts[key] = counts.get(key, 0) + 1
    else:
        vs = [v for _, v in vecs]
        gram = [[inner(g, a, b) for b in vs] for a in vs]
        chosen = []
        budget = 2 * bound

        def rec(depth, remaining):
            for idx, nv in enumerate(norms):
                if nv > remaining:
                    break
                chosen.append(idx)
                if depth + 1 == n:
                    key = tuple(tuple(gram[a][b] for b in chosen) for a in chosen)
                    counts[key] = counts.get(key, 0) + 1
                else:
                    rec(depth + 1, remaining - nv)
                chosen.pop()

        rec(0, budget)
    coeffs = {HalfIntegralForm(k): c for k, c in counts.items()}
    return FourierExpansion(n, bound, coeffs, **meta)

