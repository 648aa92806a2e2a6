import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import random_unimodular, transform
from siegel_theta.binary import BinaryForm, class_reps
from siegel_theta.core_forms import (
    HalfIntegralForm,
    automorphism_count,
    det_doubled,
    gl_equivalent,
    is_positive_definite,
)
from siegel_theta.qexp import BoundError, FourierExpansion, add, rank_subseries, scale
from siegel_theta.singular import (
    ClassIndex,
    class_representatives,
    detect_singularity,
    freitag_decompose,
    primitive_coeffs,
    primitivize,
    required_trace_bound,
    verify_freitag_identity,
    verify_phi_congruence,
)
from siegel_theta.theta import square_rep_count, theta_expansion

F7 = HalfIntegralForm([[2, 1], [1, 4]])
A2 = HalfIntegralForm([[2, 1], [1, 2]])
Z2 = HalfIntegralForm([[2, 0], [0, 2]])
A3 = HalfIntegralForm([[2, 1, 1], [1, 2, 1], [1, 1, 2]])


def _brute_classes(r, det_bound, diag_max, off_max):
    """Class representatives by grouping every form in a coefficient box."""
    pairs = [(i, j) for i in range(r) for j in range(i + 1, r)]
    reps = []
    for diag in product(range(2, diag_max + 1, 2), repeat=r):
        for off in product(range(-off_max, off_max + 1), repeat=len(pairs)):
            m = [[0] * r for _ in range(r)]
            for i in range(r):
                m[i][i] = diag[i]
            for (i, j), v in zip(pairs, off):
                m[i][j] = m[j][i] = v
            s = HalfIntegralForm(m)
            if not is_positive_definite(s) or det_doubled(s) > det_bound:
                continue
            if not any(gl_equivalent(s, t) is not None for t in reps):
                reps.append(s)
    return reps


def test_binary_class_representatives_by_det():
    reps = class_representatives(2, det_bound=23)
    by_disc = sorted(BinaryForm.from_form(s) for s in reps)
    want = sorted(f for d in range(-3, -24, -1) if d % 4 in (0, 1) for f in class_reps(d))
    assert by_disc == want


def test_ternary_class_representatives_match_brute_force():
    reps = class_representatives(3, det_bound=16)
    # det(2S) <= 16 bounds the doubled diagonal of a reduced form by 8
    brute = _brute_classes(3, 16, 8, 4)
    assert len(reps) == len(brute)
    index = ClassIndex(reps)
    assert all(index.find(s) is not None for s in brute)
    assert A3 in reps or index.find(A3) is not None


def test_class_representatives_by_trace_have_minimal_trace():
    for s in class_representatives(2, trace_bound=6):
        assert s.trace <= 6
    assert required_trace_bound(2, 23) == 7
    assert required_trace_bound(2, 7) == 3


def test_primitive_coeffs_of_theta():
    f = theta_expansion(F7, 4, 7)
    table = primitive_coeffs(f, 2, det_bound=23)
    for s in table.reps:
        if s == F7:
            assert table[s] == automorphism_count(F7)
        elif det_doubled(s) <= det_doubled(F7):
            assert table[s] == 0
    # minimal determinant class: a* = a
    first = table.reps[0]
    assert table[first] == table.values[first]


def test_primitive_coeffs_insufficient_bound_names_rep():
    f = theta_expansion(F7, 4, 6)
    with pytest.raises(BoundError, match=r"\[\[2, 1\], \[1, 12\]\]"):
        primitive_coeffs(f, 2, det_bound=23)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_primitivize_round_trip_hypothesis(seed):
    rng = random.Random(seed)
    reps = class_representatives(2, det_bound=40)
    values = {s: Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for s in rng.sample(reps, 5)}
    star, eps = primitivize(values, reps)
    for t in reps:
        recon = sum((star[s] / eps[s] * square_rep_count(s, t) for s in reps if star[s]), Fraction(0))
        assert recon == values.get(t, 0)
        t2 = HalfIntegralForm(transform(t.tolist(), random_unimodular(rng, 2)))
        recon2 = sum((star[s] / eps[s] * square_rep_count(s, t2) for s in reps if star[s]), Fraction(0))
        assert recon2 == recon


def test_detect_examples():
    f = theta_expansion(F7, 3, 6)
    v = detect_singularity(f, 7, 1)
    assert v.state == "singular" and v.p_rank == 2 and v.is_singular
    assert f[v.witness] % 7 != 0
    zero = detect_singularity(scale(7, f), 7, 1)
    assert zero.state == "zero" and zero.p_rank is None
    const = detect_singularity(FourierExpansion.constant(3, 4, 5), 7, 1)
    assert const.p_rank == 0


def test_detect_no_unit_state():
    # top rank coefficient divisible by p but nonzero mod p^2
    t = HalfIntegralForm([[2]])
    f = FourierExpansion(1, 2, {HalfIntegralForm([[0]]): 7, t: 7})
    v = detect_singularity(f, 7, 2)
    assert v.state == "no_unit" and v.p_rank is None


def test_detect_corrupted_top_rank():
    f = theta_expansion(F7, 3, 6)
    t = HalfIntegralForm([[2, 1, 0], [1, 2, 0], [0, 0, 2]])
    bad = f.with_coeffs({**f.coeffs, t: 1})
    assert detect_singularity(bad, 7, 1).p_rank == 3


def test_decompose_self():
    rep = freitag_decompose(theta_expansion(F7, 3, 6), 7, 1, det_bound=7)
    assert rep.coefficients() == {F7: 1}
    assert rep.residual_congruent
    assert rep.terms[0].chi_ok is True
    js = rep.to_json()
    assert set(js) >= {"p", "m", "p_rank", "terms", "residual_congruent", "trace_bound", "det_bound"}
    assert js["terms"][0]["S"] == [[2, 1], [1, 4]] and js["terms"][0]["nu"] == 0


def test_decompose_linear_combination_and_drop():
    f = add(scale(3, theta_expansion(A2, 3, 6)), scale(5, theta_expansion(F7, 3, 6)))
    rep = freitag_decompose(f, 7, 1, det_bound=7)
    assert rep.coefficients() == {A2: 3, F7: 5}
    g = add(theta_expansion(F7, 3, 6), scale(49, theta_expansion(A2, 3, 6)))
    rep = freitag_decompose(g, 7, 2, det_bound=7)
    assert rep.coefficients() == {F7: 1}
    assert rep.residual_congruent


def test_decompose_zero_is_vacuous():
    rep = freitag_decompose(scale(7, theta_expansion(F7, 3, 5)), 7, 1)
    assert rep.state == "zero" and rep.terms == [] and rep.residual_congruent


def test_decompose_detects_bad_residual():
    f = theta_expansion(F7, 3, 6)
    # a det bound that misses S leaves everything in the residual
    rep = freitag_decompose(f, 7, 1, det_bound=3)
    assert not rep.terms and not rep.residual_congruent


def test_decompose_rank_one():
    f = add(theta_expansion(HalfIntegralForm([[2]]), 2, 6), scale(2, theta_expansion(HalfIntegralForm([[4]]), 2, 6)))
    rep = freitag_decompose(f, 5, 1, det_bound=6)
    assert rep.coefficients() == {HalfIntegralForm([[2]]): 1, HalfIntegralForm([[4]]): 2}
    assert rep.residual_congruent


def test_verify_freitag_identity():
    f = add(scale(Fraction(2, 3), theta_expansion(F7, 4, 6)), scale(-5, theta_expansion(Z2, 4, 6)))
    assert verify_freitag_identity(f, 2)
    rk2 = next(iter(rank_subseries(f, 2).coeffs))
    bad = f.with_coeffs({**f.coeffs, rk2: f.coeffs[rk2] + 1})
    assert not verify_freitag_identity(bad, 2)


def test_verify_freitag_identity_needs_tag():
    f = theta_expansion(F7, 3, 4)
    with pytest.raises(ValueError):
        verify_freitag_identity(f.with_coeffs(f.coeffs, gl_invariant=False), 2)


def test_verify_phi_congruence():
    f = add(theta_expansion(F7, 3, 6), scale(2, theta_expansion(A2, 3, 6)))
    assert verify_phi_congruence(f, 7, 1)
    assert verify_phi_congruence(f, 7, 3)
    g = add(f, scale(7, theta_expansion(Z2, 3, 6)))
    assert verify_phi_congruence(g, 7, 1)
    # corrupt a coefficient with rank-2 upper block
    t = HalfIntegralForm([[2, 1, 0], [1, 2, 0], [0, 0, 0]])
    bad = f.with_coeffs({**f.coeffs, t: f.coeffs[t] + 1})
    assert not verify_phi_congruence(bad, 7, 1)


def test_eps_unit_for_ternary_classes():
    for s in class_representatives(3, det_bound=32):
        assert automorphism_count(s) % 5 != 0
        assert automorphism_count(s) % 7 != 0
