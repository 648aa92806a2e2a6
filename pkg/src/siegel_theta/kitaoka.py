"""Partner lattices L' and a numeric check of theta_L |_k M = kappa theta_{L'} in degree 1.

The lattice L = Z^m carries the bilinear form b(x, y) = x^T (2S) y, so the
norm of x is S[x] and the dual is L* = (2S)^{-1} Z^m.  Overlattices of L are
stored through a column HNF basis with rational entries.
"""

from __future__ import annotations

import math
import random
from collections import namedtuple
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from sympy import factorint

from . import _linalg as la
from .core_forms import HalfIntegralForm, as_form, content, is_positive_definite, level
from .lattice import short_vectors
from .theta import RationalForm, _integral_gram


@dataclass(frozen=True)
class LatticeBasis:
    """A lattice containing Z^m, given by the columns of ``basis``, with form S."""

    ambient_form: HalfIntegralForm
    basis: tuple
    form: RationalForm

    @classmethod
    def from_generators(cls, s, generators):
        s = as_form(s)
        gens = [[Fraction(v) for v in g] for g in generators]
        den = la.common_denominator(gens)
        ints = [[int(v * den) for v in g] for g in gens]
        h = la.hnf_basis(ints, s.n)
        basis = tuple(tuple(Fraction(v, den) for v in row) for row in h)
        half = [[Fraction(v, 2) for v in row] for row in s.doubled]
        gram = la.congruence(half, [list(r) for r in basis])
        return cls(s, basis, RationalForm(gram))

    @property
    def gram(self):
        return self.form.entries

    @property
    def n(self):
        return len(self.basis)

    def index_matrix(self):
        """Integer matrix expressing the standard basis of Z^m in this basis."""
        inv = la.inverse(self.basis)
        if any(v.denominator != 1 for row in inv for v in row):
            raise ValueError("lattice does not contain Z^m")
        return [[int(v) for v in row] for row in inv]

    def index(self):
        """[L' : Z^m]."""
        return abs(la.det(self.index_matrix()))

    def tolist(self):
        return [[str(v) for v in row] for row in self.basis]


@dataclass(frozen=True)
class CuspMatrix:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError("matrix must have determinant 1")

    @classmethod
    def for_divisor(cls, n, d):
        """(a b; N/d d) in SL_2(Z) for a divisor d of N with gcd(d, N/d) = 1."""
        if d <= 0 or n % d:
            raise ValueError(f"{d} is not a positive divisor of {n}")
        c = n // d
        if math.gcd(d, c) != 1:
            raise ValueError(f"gcd({d}, {c}) != 1")
        a = pow(d, -1, c) if c > 1 else 0
        b = (a * d - 1) // c
        return cls(a, b, c, d)

    def act(self, z):
        return (self.a * z + self.b) / (self.c * z + self.d)

    def cocycle(self, z):
        return self.c * z + self.d


def dual_lattice(s):
    s = as_form(s)
    if not is_positive_definite(s):
        raise ValueError("dual lattice needs a positive definite (nonsingular) form")
    inv = la.inverse(s.doubled)
    return LatticeBasis.from_generators(s, la.transpose(inv))


def kitaoka_partner(s, d):
    """L' = L + (N/d) L*, which is L_q at q not dividing d and L*_q at q | d."""
    s = as_form(s)
    n = level(s)
    if d <= 0 or n % d:
        raise ValueError(f"{d} is not a positive divisor of the level {n}")
    if math.gcd(d, n // d) != 1:
        raise ValueError(f"gcd(d, N/d) = gcd({d}, {n // d}) != 1")
    inv = la.inverse(s.doubled)
    c = n // d
    gens = [list(r) for r in la.identity(s.n)] + [[c * v for v in col] for col in la.transpose(inv)]
    return LatticeBasis.from_generators(s, gens)


def _q_part(divs, q):
    out = []
    for e in divs:
        v = 0
        while e % q == 0:
            e //= q
            v += 1
        out.append(v)
    return sorted(out)


def local_characterization(s, partner, d):
    """Per prime q | N (and any prime of the index): does L'/L look like L*/L or like 0?

    Returns a dict q -> bool.
    """
    s = as_form(s)
    dual_divs = la.elementary_divisors(s.doubled)
    idx_divs = la.elementary_divisors(partner.index_matrix())
    primes = set(factorint(level(s))) | set(factorint(abs(la.det(partner.index_matrix()))))
    out = {}
    for q in sorted(primes):
        got = _q_part(idx_divs, q)
        want = _q_part(dual_divs, q) if d % q == 0 else [0] * s.n
        out[q] = got == want
    return out


def integralize(lat):
    """Primitive half-integral form c * gram, with the minimal scale c > 0."""
    form = lat.form if isinstance(lat, LatticeBasis) else lat
    dbl = form.doubled()
    c = Fraction(la.common_denominator(dbl))
    if any((dbl[i][i] * c) % 2 for i in range(form.n)):
        c *= 2
    h = HalfIntegralForm([[int(v * c) for v in row] for row in dbl])
    g = content(h)
    return HalfIntegralForm([[v // g for v in row] for row in h.doubled]), c / g


# -- numeric degree-1 theta --------------------------------------------------


def _float_gram(s):
    if isinstance(s, LatticeBasis):
        s = s.form
    if isinstance(s, RationalForm):
        return np.array([[float(v) for v in row] for row in s.entries])
    s = as_form(s)
    return np.array([[v / 2 for v in row] for row in s.doubled], dtype=float)


def truncation_norm(s, t, tail_eps):
    """Norm R such that omitted terms with S[x] > R sum to less than tail_eps at Im z = t."""
    g = _float_gram(s)
    m = len(g)
    lam = float(np.linalg.eigvalsh(g)[0])
    a = 2 * math.pi * t * lam
    # sum_{|y|^2 > rho^2} e^{-a|y|^2} <= e^{-a rho^2/2} (sum_k e^{-a k^2/2})^m
    q = math.exp(-a / 2)
    one_dim = 1 + 2 * q / (1 - q)
    rho2 = 2 * (m * math.log(one_dim) - math.log(tail_eps)) / a
    return lam * max(rho2, 0.0)


def numeric_theta(s, z, tail_eps=1e-12):
    """theta^{(1)}(z) = sum_x e(S[x] z) for a form or a LatticeBasis."""
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("numeric_theta needs Im z > 0")
    r = truncation_norm(s, z.imag, tail_eps)
    g, den = _integral_gram(s)
    # x^T g x = 2 den S[x]
    vecs = short_vectors(tuple(tuple(row) for row in g), int(math.floor(2 * den * r)))
    norms = np.array([nv for nv, _ in vecs], dtype=float) / (2 * den)
    return complex(np.sum(np.exp(2j * math.pi * z * norms)))


def slash(s, m, k, z, tail_eps=1e-12):
    """(theta_S |_k M)(z) = (cz + d)^{-k} theta_S(Mz), integral k."""
    return m.cocycle(z) ** (-k) * numeric_theta(s, m.act(z), tail_eps)


def sample_points(m, count, seed=0):
    """Points with Im z in [0.5, 2] placed near -d/c so that Im(Mz) stays moderate."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        y = rng.uniform(0.5, 2.0)
        x = rng.uniform(-0.5, 0.5)
        if m.c:
            x = x / m.c - m.d / m.c
            y = y / m.c
        out.append(complex(x, y))
    return out


KitaokaCheck = namedtuple("KitaokaCheck", ["kappa", "max_deviation"])


def verify_kitaoka_deg1(s, m, k=None, samples=None, tail_eps=1e-12, partner=None):
    """Ratios (theta_S|_k M)(z) / theta_{L'}(z) at the samples; returns (kappa, max deviation).

    L' is taken for the divisor gcd(M.d, N), which is the d of the cusp
    matrix when M comes from ``CuspMatrix.for_divisor``.
    """
    s = as_form(s)
    if s.n % 2:
        raise ValueError("integral weight needs even rank")
    k = s.n // 2 if k is None else k
    if samples is None:
        samples = sample_points(m, 5)
    if partner is None:
        partner = kitaoka_partner(s, math.gcd(m.d, level(s)))
    ratios = []
    for z in samples:
        if complex(z).imag <= 0:
            raise ValueError("samples must lie in the upper half plane")
        den = numeric_theta(partner, z, tail_eps)
        if abs(den) <= tail_eps:
            raise ValueError(f"theta_L' vanishes numerically at {z}; resample")
        ratios.append(slash(s, m, k, z, tail_eps) / den)
    kappa = sum(ratios) / len(ratios)
    dev = max(abs(r - kappa) for r in ratios)
    return KitaokaCheck(kappa, dev)


def kappa_report(s, d, samples=5, seed=0, tol=1e-8):
    s = as_form(s)
    m = CuspMatrix.for_divisor(level(s), d)
    partner = kitaoka_partner(s, d)
    pts = sample_points(m, samples, seed)
    kappa, dev = verify_kitaoka_deg1(s, m, samples=pts, partner=partner)
    local = local_characterization(s, partner, d)
    return {
        "S": s.tolist(),
        "d": d,
        "matrix": [[m.a, m.b], [m.c, m.d]],
        "kappa_re": kappa.real,
        "kappa_im": kappa.imag,
        "abs_kappa": abs(kappa),
        "max_deviation": dev,
        "samples_used": len(pts),
        "local_characterization": {str(q): ok for q, ok in local.items()},
        "pass": dev < tol and all(local.values()),
    }

