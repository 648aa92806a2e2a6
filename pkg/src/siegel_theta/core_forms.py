"""Half-integral symmetric matrices and their arithmetic invariants.

Convention used throughout the package: a half-integral matrix ``T`` (integer
diagonal, half-integer off-diagonal) is always stored and exchanged as the
*doubled* integer matrix ``2T``, which is symmetric with even diagonal.  JSON
literals such as ``[[2,1],[1,2]]`` are doubled matrices; that one is the form
``x^2 + xy + y^2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm

from . import _linalg as la
from .lattice import inner, vectors_by_norm


@dataclass(frozen=True, order=True)
class HalfIntegralForm:
    """An element ``T`` of Lambda_n, stored as the doubled matrix ``2T``."""

    doubled: tuple

    def __init__(self, doubled):
        rows = tuple(tuple(int(v) for v in row) for row in doubled)
        object.__setattr__(self, "doubled", rows)
        n = len(rows)
        if n == 0:
            raise ValueError("0x0 forms are not allowed")
        if any(len(row) != n for row in rows):
            raise ValueError("doubled matrix must be square")
        for i in range(n):
            if rows[i][i] % 2:
                raise ValueError(f"diagonal entry {rows[i][i]} of the doubled matrix is odd")
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise ValueError("doubled matrix must be symmetric")

    @classmethod
    def _empty(cls):
        # index of the constant term of a degree-0 expansion
        obj = object.__new__(cls)
        object.__setattr__(obj, "doubled", ())
        return obj

    @classmethod
    def from_half(cls, t):
        """Build from the half-integral matrix itself (entries may be Fractions)."""
        rows = []
        for row in t:
            out = []
            for v in row:
                w = 2 * Fraction(v)
                if w.denominator != 1:
                    raise ValueError(f"{v} is not a half-integer")
                out.append(int(w))
            rows.append(out)
        return cls(rows)

    @classmethod
    def zero(cls, n):
        return cls([[0] * n for _ in range(n)])

    @classmethod
    def diagonal_blocks(cls, *blocks):
        """Block diagonal matrix; blocks may be forms or ints (zero blocks of that size)."""
        mats = []
        for b in blocks:
            if isinstance(b, int):
                if b:
                    mats.append([[0] * b for _ in range(b)])
            else:
                mats.append([list(r) for r in b.doubled])
        n = sum(len(m) for m in mats)
        out = [[0] * n for _ in range(n)]
        off = 0
        for m in mats:
            for i, row in enumerate(m):
                out[off + i][off:off + len(row)] = row
            off += len(m)
        return cls(out) if n else cls._empty()

    @property
    def n(self):
        return len(self.doubled)

    @property
    def trace(self):
        return sum(self.doubled[i][i] for i in range(self.n)) // 2

    def half(self):
        return [[Fraction(v, 2) for v in row] for row in self.doubled]

    def tolist(self):
        return [list(row) for row in self.doubled]

    def transform(self, u):
        """``T[U] = U^T T U`` for an integer matrix ``U`` (may be non-square)."""
        return HalfIntegralForm(la.congruence(self.tolist(), u)) if u and u[0] else HalfIntegralForm._empty()

    def block(self, rows):
        """Principal submatrix on the index list ``rows``."""
        if not rows:
            return HalfIntegralForm._empty()
        return HalfIntegralForm([[self.doubled[i][j] for j in rows] for i in rows])

    def is_zero(self):
        return all(v == 0 for row in self.doubled for v in row)

    def __repr__(self):
        return f"HalfIntegralForm({self.tolist()})"


def as_form(s):
    return s if isinstance(s, HalfIntegralForm) else HalfIntegralForm(s)


# -- invariants -------------------------------------------------------------


def rank(s):
    s = as_form(s)
    return la.rank(s.doubled) if s.n else 0


def det_doubled(s):
    """``det(2S)`` as an exact integer."""
    s = as_form(s)
    return la.det(s.tolist())


def content(s):
    """Largest ``C`` with ``S / C`` still half-integral."""
    s = as_form(s)
    d = s.doubled
    g = 0
    for i in range(s.n):
        g = gcd(g, d[i][i] // 2)
        for j in range(i + 1, s.n):
            g = gcd(g, d[i][j])
    if g == 0:
        raise ValueError("content undefined for the zero form")
    return g


def is_positive_definite(s):
    s = as_form(s)
    d = s.tolist()
    return all(la.det([row[:k] for row in d[:k]]) > 0 for k in range(1, s.n + 1))


def is_positive_semidefinite(s):
    s = as_form(s)
    return s.n == 0 or la.minors_nonnegative(s.doubled)


def level(s):
    """Smallest ``N`` with ``N (2S)^{-1}`` integral with even diagonal."""
    s = as_form(s)
    if det_doubled(s) == 0:
        raise ValueError("level is undefined for singular forms")
    inv = la.inverse(s.doubled)
    den = la.common_denominator(inv)
    if all((inv[i][i] * den) % 2 == 0 for i in range(s.n)):
        return den
    return 2 * den


# -- equivalence and automorphisms -----------------------------------------


@dataclass(frozen=True)
class UnimodularMatrix:
    entries: tuple

    def __init__(self, entries):
        rows = tuple(tuple(int(v) for v in row) for row in entries)
        object.__setattr__(self, "entries", rows)
        if la.det(rows) not in (1, -1):
            raise ValueError("matrix is not unimodular")

    @property
    def n(self):
        return len(self.entries)

    def tolist(self):
        return [list(r) for r in self.entries]

    def inverse(self):
        return UnimodularMatrix([[int(v) for v in row] for row in la.inverse(self.entries)])

    def __matmul__(self, other):
        return UnimodularMatrix(la.matmul(self.entries, other.entries))


def _isometries(s, t, first_only):
    """Backtracking search for integer U with U^T (2S) U = 2T, column by column."""
    gs, gt = s.doubled, t.doubled
    m = s.n
    table = vectors_by_norm(gs, max(gt[i][i] for i in range(m)))
    cands = [table.get(gt[i][i], []) for i in range(m)]
    if any(not c for c in cands):
        return []
    found = []
    cols = []

    def rec(i):
        if i == m:
            found.append([list(r) for r in zip(*cols)])
            return first_only
        for v in cands[i]:
            if all(inner(gs, cols[j], v) == gt[j][i] for j in range(i)):
                cols.append(v)
                stop = rec(i + 1)
                cols.pop()
                if stop:
                    return True
        return False

    rec(0)
    return found


def gl_equivalent(s, t):
    """A ``UnimodularMatrix`` U with ``S[U] = T``, or None if S and T are inequivalent."""
    s, t = as_form(s), as_form(t)
    if s.n != t.n:
        return None
    if not (is_positive_definite(s) and is_positive_definite(t)):
        raise ValueError("gl_equivalent expects positive definite forms")
    if det_doubled(s) != det_doubled(t):
        return None
    found = _isometries(s, t, first_only=True)
    # equal determinants force det U = +-1
    return UnimodularMatrix(found[0]) if found else None


def automorphisms(s):
    s = as_form(s)
    if not is_positive_definite(s):
        raise ValueError("automorphism group needs a positive definite form")
    return [UnimodularMatrix(u) for u in _isometries(s, s, first_only=False)]


def automorphism_count(s):
    """epsilon(S) = #{U in GL_m(Z) : S[U] = S}."""
    s = as_form(s)
    if not is_positive_definite(s):
        raise ValueError("automorphism group needs a positive definite form")
    return len(_isometries(s, s, first_only=False))


# -- quadratic characters --------------------------------------------------


def kronecker(a, n):
    """Kronecker symbol (a / n), extended to all integers n."""
    a, n = int(a), int(n)
    if n == 0:
        return 1 if a in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            result = -result
    # Jacobi symbol (a / n), n odd positive
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


@dataclass(frozen=True)
class QuadChar:
    """``d -> sign(d)^sign_exponent * prod_D (D / |d|)``, supported on d coprime to modulus."""

    modulus: int
    factors: tuple = ()
    sign_exponent: int = 0

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(int(f) for f in self.factors))
        object.__setattr__(self, "sign_exponent", int(self.sign_exponent) % 2)
        if self.modulus < 1:
            raise ValueError("modulus must be positive")

    def __call__(self, d):
        d = int(d)
        if gcd(d, self.modulus) != 1:
            return 0
        value = -1 if (d < 0 and self.sign_exponent) else 1
        for f in self.factors:
            value *= kronecker(f, abs(d))
        return value

    def is_trivial(self):
        return all(self(d) == 1 for d in range(1, self.modulus + 1) if gcd(d, self.modulus) == 1) and self(-1) == 1

    def to_json(self):
        return {"modulus": self.modulus, "factors": list(self.factors), "sign_exponent": self.sign_exponent}

    @classmethod
    def legendre(cls, p):
        """The nontrivial quadratic character mod an odd prime p."""
        disc = p if p % 4 == 1 else -p
        return cls(p, (disc,), 0 if p % 4 == 1 else 1)


def theta_character(s):
    """chi_S(d) = sign(d)^{m/2} ((-1)^{m/2} det 2S / |d|), taken mod level(S)."""
    s = as_form(s)
    m = s.n
    if m % 2:
        raise ValueError("theta character needs even size")
    half = m // 2
    disc = (-1) ** half * det_doubled(s)
    return QuadChar(level(s), (disc,), half)


def weight_congruence_holds(k, r, p, m):
    """True iff (p - 1) p^(m-1) divides 2k - r."""
    return (2 * k - r) % ((p - 1) * p ** (m - 1)) == 0


def chi_eq_prime(chi, chi2, k, k2, p):
    """The relation chi =' chi2: chi = chi2 * (./p)^t with t = 2(k - k2)/(p - 1)."""
    if (2 * (k - k2)) % (p - 1):
        raise ValueError("t undefined: k - k2 is not a multiple of (p-1)/2")
    t = (2 * (k - k2)) // (p - 1)
    leg = QuadChar.legendre(p)
    mod = lcm(chi.modulus, chi2.modulus, p)
    for d in range(1, 2 * mod + 1):
        for dd in (d, -d):
            if gcd(dd, mod) != 1:
                continue
            if chi(dd) != chi2(dd) * leg(dd) ** (t % 2):
                return False
    return True


def gl_generators(n):
    """Generators of GL_n(Z): an adjacent swap, an n-cycle, a sign flip, a transvection."""
    gens = []
    eye = la.identity(n)
    flip = [row[:] for row in eye]
    flip[0][0] = -1
    gens.append(flip)
    if n >= 2:
        swap = [row[:] for row in eye]
        swap[0], swap[1] = swap[1], swap[0]
        gens.append(swap)
        cyc = [[int(j == (i + 1) % n) for j in range(n)] for i in range(n)]
        gens.append(cyc)
        tv = [row[:] for row in eye]
        tv[0][1] = 1
        gens.append(tv)
    return gens


@dataclass
class _Invariants:
    det: int
    level: int
    content: int
    eps: int = field(default=0)


def invariants(s):
    s = as_form(s)
    return _Invariants(det_doubled(s), level(s), content(s), automorphism_count(s))

