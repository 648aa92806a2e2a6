import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import naive_binary_gl_classes
from siegel_theta.binary import (
    BinaryForm,
    class_reps,
    default_sij_params,
    gauss_reduce,
    gl_class_rep,
    ladder_check,
    level_p_reps,
    rep_counts,
    represented_primes,
    sij_form,
    theta_independence_mod_p,
    weber_check,
)
from siegel_theta.core_forms import HalfIntegralForm, UnimodularMatrix, automorphism_count, det_doubled, level
from siegel_theta.theta import rep_number


def _proper_automorphs(f):
    """#SL_2(Z) automorphisms: 6 for disc -3 forms, 4 for disc -4, else 2."""
    g = gl_class_rep(f)
    if g.disc == -3 * g.a ** 2 and g.a == g.b == g.c:
        return 6
    if g.b == 0 and g.a == g.c:
        return 4
    return 2


def test_class_lists():
    assert class_reps(-4) == [BinaryForm(1, 0, 1)]
    assert class_reps(-7) == [BinaryForm(1, 1, 2)]
    assert class_reps(-23) == [BinaryForm(1, 1, 6), BinaryForm(2, 1, 3)]
    with pytest.raises(ValueError):
        class_reps(-5)


def test_gauss_reduce_example():
    g, u = gauss_reduce(BinaryForm(3, 2, 1))
    assert (g.a, abs(g.b), g.c) == (1, 0, 2)
    assert isinstance(u, UnimodularMatrix)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 30), st.integers(-40, 40), st.integers(1, 30))
def test_gauss_reduce_is_reduced_and_equivalent(a, b, c):
    f = BinaryForm(a, b, c)
    if not f.is_positive_definite():
        return
    g, u = gauss_reduce(f)
    assert g.is_reduced() and g.disc == f.disc
    assert f.form().transform(u.tolist()) == g.form()


@pytest.mark.parametrize("disc", [-3, -4, -7, -8, -15, -20, -23, -39, -47, -56, -71, -84])
def test_class_count_matches_brute_force(disc):
    assert len(class_reps(disc)) == len(naive_binary_gl_classes(disc))


def test_level_p_reps():
    assert level_p_reps(7) == [BinaryForm(1, 1, 2)]
    assert len(level_p_reps(23)) == 2
    assert level_p_reps(3) == [BinaryForm(1, 1, 1)]
    assert len(level_p_reps(31)) == 2
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        assert level_p_reps(5) == []
        assert w
    with pytest.raises(ValueError):
        level_p_reps(9)


def test_represented_primes_examples():
    assert [l for l, _ in represented_primes(BinaryForm(1, 0, 1), 20)] == [2, 5, 13, 17]
    assert [l for l, _ in represented_primes(BinaryForm(1, 1, 2), 11)] == [2, 7, 11]


@pytest.mark.parametrize("disc", [-3, -4, -7, -20, -23, -31, -47, -71])
def test_prime_rep_counts_are_w_or_2w(disc):
    # for l prime to disc, A(f, l) is a multiple of the proper automorphism count
    for f in class_reps(disc, primitive=True):
        w = _proper_automorphs(f)
        for l, a in represented_primes(f, 200):
            if disc % l:
                assert a in (w, 2 * w), (f, l, a)


def test_rep_counts_agree_with_rep_number():
    f = BinaryForm(2, 1, 3)
    counts = rep_counts(f, 30)
    for n in range(1, 31):
        assert counts[n] == rep_number(f.form(), HalfIntegralForm([[2 * n]]))


def test_weber_check_samples():
    for d in (-20, -23, -56, -84, -200):
        assert weber_check(d, 300)


def test_independence_ranks():
    assert theta_independence_mod_p(7, 200) == (1, 1)
    assert theta_independence_mod_p(23, 200) == (2, 2)
    assert theta_independence_mod_p(31, 200) == (2, 2)


def test_eps_of_reduced_binaries():
    for d in range(-3, -60, -1):
        if d % 4 not in (0, 1):
            continue
        for f in class_reps(d):
            assert automorphism_count(f.form()) in (2, 4, 8, 12)


def test_sij_doubled_convention():
    s = sij_form(7, 0, 0, 2, 1, 4)
    assert s.form.tolist() == [[2, 7], [7, 28]]
    assert det_doubled(s.form) == 7
    assert level(s.form) == 7
    for i in range(3):
        for j in range(3):
            t = sij_form(7, i, j, *default_sij_params(7))
            assert det_doubled(t.form) == t.expected_det() == 7 ** (2 * i + 2 * j + 1)
            # the level is a power of p
            n = level(t.form)
            while n % 7 == 0:
                n //= 7
            assert n == 1


def test_sij_half_convention():
    s = sij_form(7, 1, 0, 1, 0, 1, doubled=False)
    assert det_doubled(s.form) == 4 * 7 ** 3
    with pytest.raises(ValueError):
        sij_form(7, 0, 0, 1, 1, 1)


@pytest.mark.parametrize("p", [3, 7, 11])
def test_ladder(p):
    assert all(ladder_check(p, bound=30).values())


def test_ladder_half_convention():
    assert all(ladder_check(7, params=(1, 0, 1), doubled=False, bound=30).values())
