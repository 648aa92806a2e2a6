"""Mod p^m singular expansions, primitive coefficients and theta decompositions.

Determinants are always measured on the doubled matrix, i.e. ``det(2S)``;
for binary forms that is ``|disc|``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .binary import BinaryForm, gl_class_rep
from .core_forms import (
    HalfIntegralForm,
    automorphism_count,
    chi_eq_prime,
    det_doubled,
    gl_equivalent,
    is_positive_definite,
    level,
    rank,
    theta_character,
)
from .qexp import (
    BoundError,
    FourierExpansion,
    NotPIntegralError,
    add,
    block_restrict,
    congruent,
    p_valuation,
    rank_subseries,
    reduce_mod,
    residue,
    restricted_coeff,
    scale,
    semidefinite_keys,
)
from .theta import rep_number, square_rep_count, theta_expansion

log = logging.getLogger(__name__)

# Minkowski's constants: a Minkowski reduced S of size r has prod(diag) <= c_r det S
_MINKOWSKI = {1: Fraction(1), 2: Fraction(4, 3), 3: Fraction(2), 4: Fraction(4)}


# -- class representatives ---------------------------------------------------


def _sort_key(s):
    return (det_doubled(s), s.trace, s.doubled)


def _reduced_candidates(r, det_bound, trace_bound):
    """Forms satisfying the Minkowski inequalities used for enumeration."""
    if r not in _MINKOWSKI:
        raise NotImplementedError(f"class enumeration implemented for r <= 4, got {r}")
    # max diagonal entry a_rr of S
    if trace_bound is not None:
        top = trace_bound
    else:
        top = int(_MINKOWSKI[r] * Fraction(det_bound, 2 ** r)) + 1
    pairs = [(i, j) for i in range(r) for j in range(i + 1, r)]
    out = []

    def diags(prefix):
        if len(prefix) == r:
            yield tuple(prefix)
            return
        lo = prefix[-1] if prefix else 1
        for v in range(lo, top + 1):
            cand = prefix + [v]
            if trace_bound is not None and sum(cand) > trace_bound:
                break
            if det_bound is not None:
                prod_ = 1
                for x in cand:
                    prod_ *= x
                # remaining diagonal entries are >= v
                prod_ *= v ** (r - len(cand))
                if prod_ > _MINKOWSKI[r] * Fraction(det_bound, 2 ** r):
                    break
            yield from diags(cand)

    for diag in diags([]):
        ranges = [range(-diag[i], diag[i] + 1) for i, j in pairs]
        for off in product(*ranges):
            m = [[0] * r for _ in range(r)]
            for i in range(r):
                m[i][i] = 2 * diag[i]
            for (i, j), v in zip(pairs, off):
                m[i][j] = m[j][i] = v
            s = HalfIntegralForm(m)
            if not is_positive_definite(s):
                continue
            if det_bound is not None and det_doubled(s) > det_bound:
                continue
            out.append(s)
    return out


def class_representatives(r, det_bound=None, trace_bound=None):
    """One reduced representative per GL_r(Z) class of positive definite S.

    Restricted by ``det(2S) <= det_bound`` and/or by the minimal trace in the
    class being ``<= trace_bound``.  Sorted by (det, trace, matrix).
    """
    if det_bound is None and trace_bound is None:
        raise ValueError("need a det bound or a trace bound")
    if r == 1:
        top = []
        t = 1
        while (det_bound is None or 2 * t <= det_bound) and (trace_bound is None or t <= trace_bound):
            top.append(HalfIntegralForm([[2 * t]]))
            t += 1
        return top
    if r == 2:
        out = []
        a = 1
        while True:
            if 3 * a * a > (det_bound if det_bound is not None else float("inf")):
                break
            if trace_bound is not None and 2 * a > trace_bound:
                break
            c = a
            while True:
                if trace_bound is not None and a + c > trace_bound:
                    break
                if det_bound is not None and 4 * a * c - a * a > det_bound:
                    break
                for b in range(0, a + 1):
                    d = 4 * a * c - b * b
                    if det_bound is not None and d > det_bound:
                        continue
                    out.append(BinaryForm(a, b, c).form())
                c += 1
            a += 1
        return sorted(out, key=_sort_key)
    reps = []
    for s in sorted(_reduced_candidates(r, det_bound, trace_bound), key=_sort_key):
        d = det_doubled(s)
        if any(det_doubled(t) == d and gl_equivalent(t, s) is not None for t in reps):
            continue
        reps.append(s)
    return reps


def required_trace_bound(r, det_bound):
    """Trace bound needed to read a(S) for every class with det(2S) <= det_bound."""
    reps = class_representatives(r, det_bound=det_bound)
    return max((s.trace for s in reps), default=0)


class ClassIndex:
    """Maps positive definite forms to their representative in a fixed list."""

    def __init__(self, reps):
        self.reps = list(reps)
        self._by_key = {s: s for s in self.reps}
        self._by_det = {}
        for s in self.reps:
            self._by_det.setdefault(det_doubled(s), []).append(s)

    def __iter__(self):
        return iter(self.reps)

    def __len__(self):
        return len(self.reps)

    def find(self, t):
        if t in self._by_key:
            return self._by_key[t]
        if t.n == 2:
            rep = gl_class_rep(BinaryForm.from_form(t)).form()
            return self._by_key.get(rep)
        for s in self._by_det.get(det_doubled(t), []):
            if gl_equivalent(s, t) is not None:
                return s
        return None


# -- primitive coefficients --------------------------------------------------


@dataclass
class PrimitiveCoeffTable:
    r: int
    reps: list
    values: dict
    entries: dict
    eps: dict
    det_bound: int | None = None

    def __getitem__(self, s):
        return self.entries[s]

    def support(self):
        return [s for s in self.reps if self.entries[s]]

    def reconstruct(self, t):
        """sum_S a*(S)/eps(S) * #{W : S[W] = T}."""
        total = Fraction(0)
        for s in self.reps:
            a = self.entries[s]
            if a:
                total += a / self.eps[s] * square_rep_count(s, t)
        return total


def primitivize(values, reps):
    """Invert a(T) = sum_S a*(S)/eps(S) #{W: S[W]=T} over class reps sorted by det.

    Classes of equal determinant never interact: S[W] = T with det S = det T
    forces W to be unimodular, i.e. S ~ T.
    """
    reps = sorted(reps, key=_sort_key)
    eps = {s: automorphism_count(s) for s in reps}
    star = {}
    for t in reps:
        dt = det_doubled(t)
        acc = Fraction(values.get(t, 0))
        for s in reps:
            if det_doubled(s) >= dt:
                break
            a = star[s]
            if a:
                acc -= a / eps[s] * square_rep_count(s, t)
        star[t] = acc
    return star, eps


def primitive_coeffs(f, r, det_bound=None):
    """a*(S) for all classes S in Lambda_r^+ with det(2S) <= det_bound.

    Without ``det_bound`` every class whose reduced representative is visible
    within the trace bound of ``f`` is used.
    """
    if det_bound is None:
        reps = class_representatives(r, trace_bound=f.trace_bound)
    else:
        reps = class_representatives(r, det_bound=det_bound)
        for s in reps:
            if s.trace > f.trace_bound:
                raise BoundError(
                    f"representative {s.tolist()} (det {det_doubled(s)}) needs trace bound "
                    f"{s.trace}, expansion only has {f.trace_bound}")
    values = {s: restricted_coeff(f, s) for s in reps}
    star, eps = primitivize(values, reps)
    return PrimitiveCoeffTable(r, reps, values, star, eps, det_bound)


# -- singularity ------------------------------------------------------------


@dataclass(frozen=True)
class SingularityVerdict:
    """p-rank of an expansion mod p^m, valid up to ``trace_bound``.

    state is "zero" (everything vanishes mod p^m), "singular" (p_rank set,
    witness coefficient is a p-unit) or "no_unit" (the top nonvanishing rank
    has no p-unit coefficient, so the definition does not apply).
    """

    p: int
    m: int
    degree: int
    trace_bound: int
    state: str
    p_rank: int | None = None
    witness: HalfIntegralForm | None = None

    @property
    def modulus(self):
        return self.p ** self.m

    @property
    def is_singular(self):
        return self.state == "singular" and self.p_rank < self.degree

    def to_json(self):
        return {
            "p": self.p,
            "m": self.m,
            "modulus": self.modulus,
            "degree": self.degree,
            "trace_bound": self.trace_bound,
            "state": self.state,
            "p_rank": self.p_rank,
            "singular": self.is_singular,
            "witness": self.witness.tolist() if self.witness is not None else None,
        }


def detect_singularity(f, p, m=1):
    red = reduce_mod(f, p, m)
    base = dict(p=p, m=m, degree=f.degree, trace_bound=f.trace_bound)
    if red.is_zero():
        return SingularityVerdict(state="zero", **base)
    ranks = {t: (rank(t) if f.degree else 0) for t in red.coeffs}
    top = max(ranks.values())
    units = sorted((t for t, rk in ranks.items() if rk == top and red.coeffs[t] % p),
                   key=lambda t: (t.trace, t.doubled))
    if not units:
        return SingularityVerdict(state="no_unit", **base)
    return SingularityVerdict(state="singular", p_rank=top, witness=units[0], **base)


# -- decomposition ----------------------------------------------------------


@dataclass
class DecompositionTerm:
    s: HalfIntegralForm
    c: int
    c_exact: Fraction
    nu: int | None
    level: int
    chi_ok: bool | None = None

    def to_json(self):
        return {
            "S": self.s.tolist(),
            "c": self.c,
            "c_exact": f"{self.c_exact.numerator}/{self.c_exact.denominator}",
            "nu": self.nu,
            "level": self.level,
            "chi_eq_prime": self.chi_ok,
        }


@dataclass
class DecompositionReport:
    p: int
    m: int
    p_rank: int | None
    terms: list = field(default_factory=list)
    residual_congruent: bool = True
    trace_bound: int = 0
    det_bound: int | None = None
    state: str = "singular"

    def coefficients(self):
        return {t.s: t.c for t in self.terms}

    def to_json(self):
        return {
            "p": self.p,
            "m": self.m,
            "p_rank": self.p_rank,
            "state": self.state,
            "terms": [t.to_json() for t in self.terms],
            "residual_congruent": self.residual_congruent,
            "trace_bound": self.trace_bound,
            "det_bound": self.det_bound,
        }


def _chi_flag(f, s, p):
    if f.weight is None or f.character is None or s.n % 2:
        return None
    k, k2 = f.weight, s.n // 2
    if (2 * (k - k2)) % (p - 1):
        return None
    return chi_eq_prime(f.character, theta_character(s), k, k2, p)


def freitag_decompose(f, p, m=1, det_bound=None, trace_bound=None):
    """F = sum_S c_S theta_S^{(n+r)} mod p^m with c_S = a*(S)/eps(S)."""
    verdict = detect_singularity(f, p, m)
    tb = f.trace_bound if trace_bound is None else min(trace_bound, f.trace_bound)
    report = DecompositionReport(p, m, verdict.p_rank, trace_bound=tb, det_bound=det_bound,
                                 state=verdict.state)
    if verdict.state == "zero":
        return report
    if verdict.state != "singular":
        raise ValueError("expansion is not mod p^m singular: top rank has no p-unit coefficient")
    r = verdict.p_rank
    mod = p ** m
    if r == 0:
        c = f.coeffs.get(HalfIntegralForm.zero(f.degree), Fraction(0))
        approx = FourierExpansion.constant(f.degree, tb, c)
        report.residual_congruent = bool(congruent(f.truncate(tb), approx, p, m))
        report.terms = [DecompositionTerm(HalfIntegralForm._empty(), residue(c, mod), c,
                                          p_valuation(c, p), 1)]
        return report
    table = primitive_coeffs(f, r, det_bound)
    approx = FourierExpansion.zero(f.degree, tb)
    for s in table.reps:
        a = table.entries[s]
        if not a:
            continue
        eps = table.eps[s]
        if eps % p == 0:
            raise ArithmeticError(f"eps({s.tolist()}) = {eps} is divisible by p={p}")
        c = a / eps
        if c.denominator % p == 0:
            raise NotPIntegralError(f"c_S = {c} for S={s.tolist()} is not {p}-integral")
        cr = residue(c, mod)
        if cr == 0:
            continue
        report.terms.append(DecompositionTerm(s, cr, c, p_valuation(c, p), level(s), _chi_flag(f, s, p)))
        approx = add(approx, scale(c, theta_expansion(s, f.degree, tb)))
    report.residual_congruent = bool(congruent(f.truncate(tb), approx, p, m))
    return report


# -- identity checks ---------------------------------------------------------


def _theta_cache(degree, bound):
    cache = {}

    def get(s):
        if s not in cache:
            cache[s] = theta_expansion(s, degree, bound)
        return cache[s]

    return get


def verify_freitag_identity(f, r):
    """Exact check of F_[r] = sum_S a*(S)/eps(S) (theta_S^{(n+r)})_[r] within the bound."""
    if not f.gl_invariant:
        raise ValueError("the identity needs a GL-invariant expansion (gl_invariant tag)")
    if not 0 < r <= f.degree:
        raise ValueError("need 0 < r <= degree")
    table = primitive_coeffs(f, r)
    lhs = rank_subseries(f, r)
    rhs = FourierExpansion.zero(f.degree, f.trace_bound)
    for s in table.support():
        theta = theta_expansion(s, f.degree, f.trace_bound)
        rhs = add(rhs, scale(table.entries[s] / table.eps[s], rank_subseries(theta, r)))
    ok = lhs.coeffs == rhs.coeffs
    if not ok:
        diff = set(lhs.coeffs.items()) ^ set(rhs.coeffs.items())
        log.info("Freitag identity fails at %d coefficients", len(diff))
    return ok


def verify_phi_congruence(f, p, m=1):
    """phi_T == sum_S A(S,T) a*(S)/eps(S) theta_S^{(n)} mod p^m for all T in Lambda_r^+."""
    verdict = detect_singularity(f, p, m)
    if not verdict.is_singular or verdict.p_rank == 0:
        return False
    r = verdict.p_rank
    n = f.degree - r
    bound = f.trace_bound
    table = primitive_coeffs(f, r)
    phis = block_restrict(f, r)
    thetas = _theta_cache(n, bound)
    support = table.support()
    for t in semidefinite_keys(r, bound):
        if not is_positive_definite(t):
            continue
        sub = bound - t.trace
        expected = FourierExpansion.zero(n, sub)
        for s in support:
            a = rep_number(s, t)
            if a:
                c = a * table.entries[s] / table.eps[s]
                expected = add(expected, scale(c, thetas(s).truncate(sub)))
        actual = phis.get(t, FourierExpansion.zero(n, sub))
        try:
            ok = congruent(actual, expected, p, m)
        except NotPIntegralError:
            return False
        if not ok:
            log.info("phi_T congruence fails at T=%s", t.tolist())
            return False
    return True
