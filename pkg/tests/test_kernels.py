import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from pascalwalk import (
    check_mono_conditions,
    check_moreau_conditions,
    fourier_crosscheck,
    lazy_walk,
    n_step_kernel,
    paired_kernel,
    simple_random_walk,
    tail_sum,
    uniform_three,
)
from pascalwalk.errors import AliasingError, ResourceBudgetError
from pascalwalk.kernels import convolve_int, kernel_table


def test_kernel_normalization_srw1():
    for n in range(0, 9):
        k = n_step_kernel(simple_random_walk(1), n)
        assert k.total() == 1


def test_kernel_binomial_values():
    # 4-step simple walk: p_4(0) = C(4,2)/16 = 3/8, p_4(2) = C(4,3)/16 = 1/4
    k = n_step_kernel(simple_random_walk(1), 4)
    assert k.prob((0,)) == Fraction(3, 8)
    assert k.prob((2,)) == Fraction(1, 4)
    assert k.prob((4,)) == Fraction(1, 16)
    assert k.prob((1,)) == 0


def test_kernel_product_form_d2():
    # d = 2 SRW is not a product walk, but its 2-step return prob is 1/4
    k = n_step_kernel(simple_random_walk(2), 2)
    assert k.prob((0, 0)) == Fraction(1, 4)


def test_odd_step_origin_mass_zero():
    for d in (1, 2):
        for n in (1, 3, 5, 7):
            k = n_step_kernel(simple_random_walk(d), n)
            assert k.prob(tuple([0] * d)) == 0


@given(
    m=st.integers(min_value=0, max_value=6),
    n=st.integers(min_value=0, max_value=6),
)
@settings(max_examples=30, deadline=None)
def test_semigroup_identity(m, n):
    pmf = uniform_three()
    km = n_step_kernel(pmf, m)
    kn = n_step_kernel(pmf, n)
    kmn = n_step_kernel(pmf, m + n)
    conv = convolve_int(km.num, kn.num)
    assert set(conv) | set() == set(kmn.num) | set()
    for x, v in conv.items():
        assert Fraction(v, km.den * kn.den) == Fraction(kmn.num[x], kmn.den)


def test_kernel_symmetry():
    k = n_step_kernel(simple_random_walk(2), 6)
    for x, v in k.num.items():
        assert k.num[tuple(-c for c in x)] == v


def test_kernel_table_includes_minus_one():
    table = kernel_table(simple_random_walk(1), 3)
    assert table[-1].num == {}
    assert table[-1].den == 1
    assert table[0].prob((0,)) == 1


def test_paired_kernel_srw():
    pmf = simple_random_walk(1)
    # p_0(0) + p_1(0) = 1, p_1(0) + p_2(0) = 1/2
    assert paired_kernel(pmf, 0, (0,)) == 1
    assert paired_kernel(pmf, 1, (0,)) == Fraction(1, 2)


def test_mono_conditions_srw_hold():
    for d in (1, 2):
        rep = check_mono_conditions(simple_random_walk(d), 10, mode="exact")
        assert rep.holds
        assert rep.min_slack >= 0
        assert rep.failures == ()


def test_moreau_fails_srw_periodicity():
    rep = check_moreau_conditions(simple_random_walk(1), 4, mode="exact")
    assert not rep.holds
    # p_1(0) = 0 < p_2(0): decay fails at n = 1, and the n = 1 kernel has
    # its mass off the origin so the center condition fails there too
    labels = {(lbl, n) for lbl, n, _ in rep.failures}
    assert ("decay", 1) in labels


def test_moreau_holds_lazy():
    for d in (1, 2):
        rep = check_moreau_conditions(lazy_walk(d), 8, mode="exact")
        assert rep.holds, rep.failures


def test_float_mode_matches_exact():
    pmf = simple_random_walk(2)
    ex = check_mono_conditions(pmf, 8, mode="exact")
    fl = check_mono_conditions(pmf, 8, mode="float")
    assert fl.mode == "float"
    assert ex.holds == fl.holds
    assert abs(float(ex.min_slack) - fl.min_slack) < 1e-12


def test_cell_budget_enforced():
    with pytest.raises(ResourceBudgetError):
        kernel_table(simple_random_walk(2), 12, cell_budget=10)


def test_tail_sum_monotone_srw():
    pmf = simple_random_walk(1)
    for k in (1, 2, 3):
        ts = tail_sum(pmf, k)
        assert ts.monotone_on_claimed_range


def test_tail_sum_values():
    ts = tail_sum(uniform_three(), 1)
    # from z = 0: jumps at distance >= 1 from 0 are +-1, mass 2/3
    assert ts.table[0] == Fraction(2, 3)
    # from z = 2: all three jumps land at distance >= 1 from -2
    assert ts.table[2] == 1


@given(n=st.integers(min_value=0, max_value=10))
@settings(max_examples=20, deadline=None)
def test_fourier_agreement(n):
    err = fourier_crosscheck(simple_random_walk(1), n, 64)
    assert err <= 1e-10


def test_fourier_aliasing_guard():
    with pytest.raises(AliasingError):
        fourier_crosscheck(simple_random_walk(1), 10, 12)


def test_fourier_d3():
    err = fourier_crosscheck(simple_random_walk(3), 6, 16)
    assert err <= 1e-10
