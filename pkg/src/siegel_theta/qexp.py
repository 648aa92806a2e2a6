"""Truncated Fourier expansions of Siegel modular forms with exact coefficients.

An expansion of degree ``n`` stores ``a(T)`` for every positive semidefinite
``T`` in Lambda_n with ``tr(T) <= trace_bound``; keys that are absent have
coefficient zero.  Every statement made about an expansion (congruences,
identities) is only ever claimed up to its trace bound.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import product
from math import gcd, isqrt

from . import _linalg as la
from .core_forms import (
    HalfIntegralForm,
    QuadChar,
    gl_generators,
    is_positive_definite,
    is_positive_semidefinite,
    rank,
)


class BoundError(ValueError):
    """Raised when a computation needs coefficients beyond the stored trace bound."""


class NotPIntegralError(ValueError):
    pass


def _frac(v):
    return v if isinstance(v, Fraction) else Fraction(v)


def _sort_key(t):
    return (t.trace, t.doubled)


@dataclass(frozen=True)
class FourierExpansion:
    degree: int
    trace_bound: int
    coeffs: dict = field(default_factory=dict)
    weight: object = None
    character: QuadChar | None = None
    level: int | None = None
    gl_invariant: bool = False

    def __post_init__(self):
        clean = {}
        for t, a in self.coeffs.items():
            a = _frac(a)
            if a:
                clean[t] = a
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def build(cls, degree, trace_bound, coeffs, validate=True, **meta):
        """Constructor that checks every key (size, trace, semidefiniteness)."""
        for t in coeffs:
            if not isinstance(t, HalfIntegralForm):
                raise TypeError(f"key {t!r} is not a HalfIntegralForm")
            if t.n != degree:
                raise ValueError(f"key {t} has size {t.n}, expected {degree}")
            if validate:
                if t.trace > trace_bound:
                    raise ValueError(f"key {t} exceeds trace bound {trace_bound}")
                if not is_positive_semidefinite(t):
                    raise ValueError(f"key {t} is not positive semidefinite")
        return cls(degree, trace_bound, dict(coeffs), **meta)

    @classmethod
    def zero(cls, degree, trace_bound, **meta):
        meta.setdefault("gl_invariant", True)
        return cls(degree, trace_bound, {}, **meta)

    @classmethod
    def constant(cls, degree, trace_bound, value=1, **meta):
        key = HalfIntegralForm.zero(degree) if degree else HalfIntegralForm._empty()
        meta.setdefault("gl_invariant", True)
        return cls(degree, trace_bound, {key: value}, **meta)

    def __getitem__(self, t):
        if not isinstance(t, HalfIntegralForm):
            t = HalfIntegralForm(t)
        if t.n != self.degree:
            raise ValueError("size mismatch")
        if t.trace > self.trace_bound:
            raise BoundError(f"{t} lies beyond trace bound {self.trace_bound}")
        return self.coeffs.get(t, Fraction(0))

    def items(self):
        return sorted(self.coeffs.items(), key=lambda kv: _sort_key(kv[0]))

    def is_zero(self):
        return not self.coeffs

    def metadata(self):
        return dict(weight=self.weight, character=self.character, level=self.level,
                    gl_invariant=self.gl_invariant)

    def with_coeffs(self, coeffs, **changes):
        return replace(self, coeffs=coeffs, **changes)

    def truncate(self, bound):
        if bound > self.trace_bound:
            raise BoundError(f"cannot extend trace bound {self.trace_bound} to {bound}")
        return replace(self, trace_bound=bound,
                       coeffs={t: a for t, a in self.coeffs.items() if t.trace <= bound})

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, scale(-1, other))

    def __neg__(self):
        return scale(-1, self)

    def __rmul__(self, c):
        return scale(c, self)

    def __eq__(self, other):
        if not isinstance(other, FourierExpansion):
            return NotImplemented
        return (self.degree == other.degree and self.trace_bound == other.trace_bound
                and self.coeffs == other.coeffs)

    __hash__ = None

    # -- serialization --------------------------------------------------

    def to_json(self):
        out = {
            "degree": self.degree,
            "trace_bound": self.trace_bound,
            "coeffs": [{"T": t.tolist(), "a": f"{a.numerator}/{a.denominator}"}
                       for t, a in self.items()],
        }
        if self.weight is not None:
            out["weight"] = str(self.weight)
        if self.level is not None:
            out["level"] = self.level
        if self.character is not None:
            out["character"] = self.character.to_json()
        if self.gl_invariant:
            out["gl_invariant"] = True
        return out

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True, indent=1) + "\n"

    @classmethod
    def from_json(cls, data):
        degree = int(data["degree"])
        coeffs = {}
        for entry in data["coeffs"]:
            t = HalfIntegralForm(entry["T"]) if degree else HalfIntegralForm._empty()
            coeffs[t] = coeffs.get(t, 0) + Fraction(entry["a"])
        char = data.get("character")
        meta = dict(
            weight=Fraction(data["weight"]) if "weight" in data else None,
            level=data.get("level"),
            character=QuadChar(char["modulus"], char["factors"], char["sign_exponent"]) if char else None,
            gl_invariant=bool(data.get("gl_invariant", False)),
        )
        if meta["weight"] is not None and meta["weight"].denominator == 1:
            meta["weight"] = int(meta["weight"])
        return cls.build(degree, int(data["trace_bound"]), coeffs, validate=bool(degree), **meta)

    @classmethod
    def loads(cls, text):
        return cls.from_json(json.loads(text))


@dataclass(frozen=True)
class ResidueExpansion:
    degree: int
    trace_bound: int
    modulus: int
    coeffs: dict = field(default_factory=dict)

    def __getitem__(self, t):
        return self.coeffs.get(t, 0)

    def is_zero(self):
        return not self.coeffs

    def lift(self):
        return FourierExpansion(self.degree, self.trace_bound, dict(self.coeffs))

    def to_json(self):
        return {
            "degree": self.degree,
            "trace_bound": self.trace_bound,
            "modulus": self.modulus,
            "coeffs": [{"T": t.tolist(), "a": a}
                       for t, a in sorted(self.coeffs.items(), key=lambda kv: _sort_key(kv[0]))],
        }


@dataclass(frozen=True)
class CongruenceVerdict:
    """Result of a coefficientwise comparison; valid only up to ``trace_bound``."""

    holds: bool
    modulus: int
    trace_bound: int
    mismatch: HalfIntegralForm | None = None

    def __bool__(self):
        return self.holds


# -- arithmetic --------------------------------------------------------------


def _merge_meta(f, g):
    # the empty expansion carries no information
    if not f.coeffs:
        return g.metadata()
    if not g.coeffs:
        return f.metadata()
    meta = {}
    for key in ("weight", "character", "level"):
        a, b = getattr(f, key), getattr(g, key)
        meta[key] = a if a == b else None
    meta["gl_invariant"] = f.gl_invariant and g.gl_invariant
    return meta


def add(f, g):
    if f.degree != g.degree:
        raise ValueError(f"degree mismatch: {f.degree} vs {g.degree}")
    bound = min(f.trace_bound, g.trace_bound)
    out = {t: a for t, a in f.coeffs.items() if t.trace <= bound}
    for t, a in g.coeffs.items():
        if t.trace <= bound:
            out[t] = out.get(t, 0) + a
    return FourierExpansion(f.degree, bound, out, **_merge_meta(f, g))


def scale(c, f):
    c = _frac(c)
    return replace(f, coeffs={t: c * a for t, a in f.coeffs.items()})


def linear_combination(terms):
    """Sum of ``c * F`` over an iterable of ``(c, F)`` pairs."""
    terms = list(terms)
    if not terms:
        raise ValueError("empty combination")
    total = scale(terms[0][0], terms[0][1])
    for c, f in terms[1:]:
        total = add(total, scale(c, f))
    return total


def multiply(f, g):
    """Product of expansions (convolution over T1 + T2 = T)."""
    if f.degree != g.degree:
        raise ValueError("degree mismatch")
    bound = min(f.trace_bound, g.trace_bound)
    out = {}
    for t1, a in f.coeffs.items():
        if t1.trace > bound:
            continue
        for t2, b in g.coeffs.items():
            if t1.trace + t2.trace > bound:
                continue
            t = HalfIntegralForm([[x + y for x, y in zip(r1, r2)]
                                  for r1, r2 in zip(t1.doubled, t2.doubled)]) if f.degree else t1
            out[t] = out.get(t, 0) + a * b
    return FourierExpansion(f.degree, bound, out)


# -- congruences -------------------------------------------------------------


def residue(a, modulus):
    a = _frac(a)
    if gcd(a.denominator, modulus) != 1:
        raise NotPIntegralError(f"{a} has no residue mod {modulus}")
    return a.numerator * pow(a.denominator, -1, modulus) % modulus


def p_valuation(a, p):
    a = _frac(a)
    if a == 0:
        return None
    v, num, den = 0, a.numerator, a.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def reduce_mod(f, p, m):
    mod = p ** m
    out = {}
    for t, a in f.items():
        if a.denominator % p == 0:
            raise NotPIntegralError(f"coefficient {a} at T={t.tolist()} is not {p}-integral")
        r = residue(a, mod)
        if r:
            out[t] = r
    return ResidueExpansion(f.degree, f.trace_bound, mod, out)


def congruent(f, g, p, m):
    """Coefficientwise ``f == g mod p^m`` up to the common trace bound."""
    diff = add(f, scale(-1, g))
    red = reduce_mod(diff, p, m)
    mismatch = min(red.coeffs, key=_sort_key) if red.coeffs else None
    return CongruenceVerdict(mismatch is None, p ** m, diff.trace_bound, mismatch)


# -- structural operators ----------------------------------------------------


def siegel_phi(f):
    """a_{Phi F}(T) = a_F(diag(T, 0))."""
    if f.degree < 1:
        raise ValueError("Siegel Phi needs degree >= 1")
    n = f.degree
    out = {}
    for t, a in f.coeffs.items():
        d = t.doubled
        if d[n - 1][n - 1] == 0:
            # semidefinite with zero diagonal entry forces a zero row
            out[t.block(list(range(n - 1)))] = a
    return replace(f, degree=n - 1, coeffs=out)


def rank_subseries(f, r):
    if not 0 <= r <= f.degree:
        raise ValueError(f"rank {r} outside 0..{f.degree}")
    return replace(f, coeffs={t: a for t, a in f.coeffs.items()
                              if (rank(t) if f.degree else 0) == r},
                   gl_invariant=False)


def sharp_subseries(f, r):
    """Keep coefficients whose leading r x r block is positive definite."""
    if not 0 <= r <= f.degree:
        raise ValueError(f"block size {r} outside 0..{f.degree}")
    if r == 0:
        return f
    idx = list(range(r))
    return replace(f, coeffs={t: a for t, a in f.coeffs.items()
                              if is_positive_definite(t.block(idx))},
                   gl_invariant=False)


def _split(t, r):
    n = t.n
    top = t.block(list(range(r)))
    bottom = t.block(list(range(r, n)))
    return top, bottom


def block_restrict(f, r):
    """phi_T for every r x r leading block T that occurs.

    phi_T is the degree (n - r) expansion with coefficient at T2 equal to the
    sum of a_F([[T, B], [B^t, T2]]) over all off-diagonal blocks B; its trace
    bound is ``trace_bound - tr(T)``.
    """
    if not 0 < r < f.degree:
        raise ValueError(f"block size {r} must satisfy 0 < r < {f.degree}")
    n = f.degree - r
    pieces = {}
    for t, a in f.coeffs.items():
        top, bottom = _split(t, r)
        slot = pieces.setdefault(top, {})
        slot[bottom] = slot.get(bottom, 0) + a
    return {top: FourierExpansion(n, f.trace_bound - top.trace, coeffs)
            for top, coeffs in pieces.items()}


def phi_block(f, t):
    """phi_T for a single r x r block ``t`` (zero expansion if T never occurs)."""
    r = t.n
    if t.trace > f.trace_bound:
        raise BoundError(f"tr(T) = {t.trace} exceeds trace bound {f.trace_bound}")
    return block_restrict(f, r).get(t, FourierExpansion(f.degree - r, f.trace_bound - t.trace))


def restricted_coeff(f, s):
    """a(S) := a_F(diag(0_n, S)) for S of size r <= degree."""
    if s.n > f.degree:
        raise ValueError("S larger than the degree")
    key = HalfIntegralForm.diagonal_blocks(f.degree - s.n, s)
    return f[key]


# -- degree one operators ----------------------------------------------------


def _deg1(n):
    return HalfIntegralForm([[2 * n]])


def degree1_series(f):
    """Coefficient list a(0), ..., a(B) of a degree one expansion."""
    if f.degree != 1:
        raise ValueError("degree one expansion expected")
    out = [Fraction(0)] * (f.trace_bound + 1)
    for t, a in f.coeffs.items():
        out[t.doubled[0][0] // 2] = a
    return out


def from_degree1_series(values, **meta):
    return FourierExpansion(1, len(values) - 1,
                            {_deg1(i): v for i, v in enumerate(values) if v}, **meta)


def u_operator(f, p):
    """f | U(p): coefficient at n is a_f(pn)."""
    seq = degree1_series(f)
    bound = f.trace_bound // p
    return from_degree1_series([seq[p * i] for i in range(bound + 1)])


def v_operator(f, p):
    """f | V(p): coefficient at pn is a_f(n), zero off multiples of p."""
    seq = degree1_series(f)
    out = [Fraction(0)] * (p * f.trace_bound + 1)
    for i, a in enumerate(seq):
        out[p * i] = a
    return from_degree1_series(out)


# -- GL invariance -----------------------------------------------------------


def check_gl_invariance(f):
    """Return the first (T, U) with a(T[U]) != a(T) inside the bound, else None."""
    if f.degree == 0:
        return None
    gens = gl_generators(f.degree)
    for t, a in f.items():
        for u in gens:
            tu = t.transform(u)
            if tu.trace <= f.trace_bound and f.coeffs.get(tu, 0) != a:
                return t, u
    return None


def semidefinite_keys(degree, bound):
    """All positive semidefinite T in Lambda_degree with tr(T) <= bound (small cases)."""
    keys = []
    diag_ranges = [range(bound + 1)] * degree
    for diag in product(*diag_ranges):
        if sum(diag) > bound:
            continue
        pairs = [(i, j) for i in range(degree) for j in range(i + 1, degree)]
        ranges = []
        for i, j in pairs:
            lim = isqrt(4 * diag[i] * diag[j])
            ranges.append(range(-lim, lim + 1))
        for off in product(*ranges):
            m = [[0] * degree for _ in range(degree)]
            for i in range(degree):
                m[i][i] = 2 * diag[i]
            for (i, j), v in zip(pairs, off):
                m[i][j] = m[j][i] = v
            if la.minors_nonnegative(m):
                keys.append(HalfIntegralForm(m))
    return keys

