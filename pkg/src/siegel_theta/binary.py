"""Binary quadratic forms ax^2 + bxy + cy^2 and the forms S(i, j).

GL_2(Z) classes are the unit of identification everywhere: (a, b, c) and
(a, -b, c) are the same class.  The associated doubled matrix is
[[2a, b], [b, 2c]].
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from math import isqrt

from sympy import isprime, primerange

from . import _linalg as la
from .core_forms import HalfIntegralForm, UnimodularMatrix, content, level
from .qexp import degree1_series, u_operator, v_operator
from .theta import theta_expansion

log = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class BinaryForm:
    a: int
    b: int
    c: int

    @property
    def disc(self):
        return self.b * self.b - 4 * self.a * self.c

    def is_positive_definite(self):
        return self.a > 0 and self.disc < 0

    def is_reduced(self):
        return abs(self.b) <= self.a <= self.c

    def form(self):
        return HalfIntegralForm([[2 * self.a, self.b], [self.b, 2 * self.c]])

    @classmethod
    def from_form(cls, s):
        d = s.doubled
        return cls(d[0][0] // 2, d[0][1], d[1][1] // 2)

    def is_primitive(self):
        return content(self.form()) == 1

    def __call__(self, x, y):
        return self.a * x * x + self.b * x * y + self.c * y * y

    def __str__(self):
        return f"({self.a},{self.b},{self.c})"


def _act(f, u):
    """f[U] with U = [[p, q], [r, s]] acting on column vectors."""
    s = la.congruence(f.form().tolist(), u)
    return BinaryForm(s[0][0] // 2, s[0][1], s[1][1] // 2)


def gauss_reduce(f):
    """Reduce a positive definite form; returns (g, U) with f[U] = g and |b| <= a <= c."""
    if not f.is_positive_definite():
        raise ValueError(f"{f} is not positive definite")
    u = la.identity(2)
    g = f
    while True:
        # translate b into (-a, a]
        k = (g.a - g.b) // (2 * g.a)
        if k:
            t = [[1, k], [0, 1]]
            g = _act(g, t)
            u = la.matmul(u, t)
        if g.a > g.c or (g.a == g.c and g.b < 0):
            w = [[0, -1], [1, 0]]
            g = _act(g, w)
            u = la.matmul(u, w)
            continue
        break
    return g, UnimodularMatrix(u)


def gl_class_rep(f):
    """Canonical representative (a, |b|, c) of the GL_2(Z) class of f."""
    g, _ = gauss_reduce(f)
    return BinaryForm(g.a, abs(g.b), g.c)


def class_reps(disc, primitive=False):
    """Reduced representatives of all GL_2(Z) classes of discriminant ``disc``."""
    if disc >= 0 or disc % 4 not in (0, 1):
        raise ValueError(f"{disc} is not a negative discriminant")
    out = []
    amax = isqrt(-disc // 3)
    for a in range(1, amax + 1):
        for b in range(0, a + 1):
            num = b * b - disc
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            f = BinaryForm(a, b, c)
            if primitive and not f.is_primitive():
                continue
            out.append(f)
    return out


def level_p_reps(p):
    """GL_2(Z) classes of binary forms of level p (p prime, p = 3 mod 4)."""
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    if p % 4 != 3:
        warnings.warn(f"no even binary forms of odd prime level {p} with p = 1 mod 4", stacklevel=2)
        return []
    return [f for f in class_reps(-p) if level(f.form()) == p]


def rep_counts(f, bound):
    """A(f, n) for n = 0..bound."""
    return [int(a) for a in degree1_series(theta_expansion(f.form(), 1, bound))]


def represented_primes(f, bound):
    counts = rep_counts(f, bound)
    return [(l, counts[l]) for l in primerange(2, bound + 1) if counts[l] > 0]


def weber_check(disc, bound):
    """No prime l <= bound with l coprime to disc is represented by two distinct classes."""
    reps = class_reps(disc, primitive=True)
    if len(reps) < 2:
        return True
    represented = [set(l for l, _ in represented_primes(f, bound)) for f in reps]
    for l in primerange(2, bound + 1):
        if disc % l == 0:
            continue
        owners = [f for f, s in zip(reps, represented) if l in s]
        if len(owners) > 1:
            log.info("prime %d represented by %s", l, owners)
            return False
    return True


def _rank_mod_p(rows, p):
    m = [[v % p for v in row] for row in rows]
    r = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [v * inv % p for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[r])]
        r += 1
    return r


def theta_independence_mod_p(p, bound):
    """(F_p-rank of the truncated theta_{T_j}^{(1)}, h_p) over the level-p classes."""
    reps = level_p_reps(p)
    rows = [rep_counts(f, bound) for f in reps]
    return (_rank_mod_p(rows, p) if rows else 0), len(reps)


@dataclass(frozen=True)
class SijForm:
    """S(i, j) = p^i [[a, b p^(j+1)], [b p^(j+1), d p^(2j+1)]] with adp - b^2 p^2 = p.

    With ``doubled=True`` (default) the displayed matrix is 2S, so a and d must
    be even and det(2S) = p^(2i+2j+1).  With ``doubled=False`` it is S itself
    and det(2S) = 4 p^(2i+2j+1).
    """

    p: int
    i: int
    j: int
    a: int
    b: int
    d: int
    form: HalfIntegralForm
    doubled: bool = True

    def expected_det(self):
        e = self.p ** (2 * self.i + 2 * self.j + 1)
        return e if self.doubled else 4 * e


def sij_form(p, i, j, a, b, d, doubled=True):
    if a * d * p - b * b * p * p != p:
        raise ValueError(f"adp - b^2p^2 = {a * d * p - b * b * p * p} != p")
    if i < 0 or j < 0:
        raise ValueError("i, j must be nonnegative")
    pi = p ** i
    m = [[pi * a, pi * b * p ** (j + 1)], [pi * b * p ** (j + 1), pi * d * p ** (2 * j + 1)]]
    if not doubled:
        m = [[2 * v for v in row] for row in m]
    form = HalfIntegralForm(m)
    if not (m[0][0] > 0 and la.det(m) > 0):
        raise ValueError("S(i,j) is not positive definite")
    s = SijForm(p, i, j, a, b, d, form, doubled)
    assert la.det(m) == s.expected_det()
    return s


def default_sij_params(p):
    """Some (a, b, d) with a, d even and ad - b^2 p = 1 (needs p = 3 mod 4)."""
    for b in range(1, 50, 2):
        ad = 1 + b * b * p
        for a in range(2, isqrt(ad) + 1, 2):
            if ad % a == 0 and (ad // a) % 2 == 0:
                return a, b, ad // a
    raise ValueError(f"no even parameters found for p={p}")


def ladder_check(p, imax=2, jmax=2, bound=50, params=None, doubled=True):
    """Check theta_{S(i,j)} = theta_{S(i-1,j)} | V(p) and theta_{S(0,j)} | U(p) = theta_{S(1,j-1)}.

    Returns a dict keyed by ("V", i, j) and ("U", 0, j), all coefficients up to ``bound``.
    """
    a, b, d = params if params is not None else default_sij_params(p)

    def theta(i, j, n):
        return theta_expansion(sij_form(p, i, j, a, b, d, doubled).form, 1, n)

    out = {}
    for j in range(jmax + 1):
        for i in range(1, imax + 1):
            lhs = theta(i, j, bound)
            rhs = v_operator(theta(i - 1, j, bound), p).truncate(bound)
            out[("V", i, j)] = lhs.coeffs == rhs.coeffs
        if j >= 1:
            lhs = u_operator(theta(0, j, p * bound), p)
            rhs = theta(1, j - 1, bound)
            out[("U", 0, j)] = lhs.coeffs == rhs.coeffs
    return out
