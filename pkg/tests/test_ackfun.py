import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from permvc.ackfun import (
    HierarchyParams,
    alpha_d,
    alpha_d_direct,
    beta,
    derived_params,
    gamma,
    inv_ackermann,
    mu,
    recurrence_D,
    recurrence_R,
)


def naive_R(s, d):
    if s == 2:
        return 2
    if s == 3:
        return 3
    if s == 4:
        return 2 * d + 1
    if d == 2:
        return 2 ** (s - 2) + 1
    return 2 * (naive_R(s - 1, d) - 1) + (naive_R(s - 2, d) - 1) * (naive_R(s, d - 1) - 3) + 1


def naive_D(s, d):
    if s == 1:
        return 0
    if s == 2:
        return 2
    if d == 2:
        return 2 ** (s - 1) + 2 ** (s - 2) - 1
    r = naive_R(s, d - 1)
    return 2 * naive_D(s - 1, d) + (naive_D(s - 2, d) + 1) * (r - 3) + naive_D(s, d - 1) - r + 1


@pytest.mark.parametrize("d,m,v", [(1, 7, 4), (2, 8, 3), (5, 1, 0), (1, 1, 1), (2, 1, 0), (3, 16, 3)])
def test_alpha_d_examples(d, m, v):
    assert alpha_d(d, m) == v
    assert alpha_d_direct(d, m) == v


def test_alpha_2_is_ceil_log2():
    for m in range(1, 5000):
        assert alpha_d(2, m) == math.ceil(math.log2(m))


@given(st.integers(1, 4), st.integers(1, 2 ** 16))
def test_memoized_matches_direct(d, m):
    assert alpha_d(d, m) == alpha_d_direct(d, m)


@pytest.mark.parametrize("bad", [(0, 1), (1, 0), (1.5, 2)])
def test_alpha_domain(bad):
    with pytest.raises(ValueError):
        alpha_d(*bad)


# alpha_3(16) = 3; alpha_3(2**16) = 1 + alpha_3(16) = 4 while alpha_4(2**16) = 3
@pytest.mark.parametrize("m,v", [(6, 1), (8, 2), (1, 1), (16, 3), (2 ** 16, 4)])
def test_inv_ackermann_examples(m, v):
    assert inv_ackermann(m) == v


def test_inv_ackermann_nondecreasing():
    prev = 1
    for m in range(1, 2 ** 16 + 1):
        cur = inv_ackermann(m)
        assert cur >= prev
        prev = cur


def test_R_examples_and_base_cases():
    assert recurrence_R(4, 5) == 11
    assert recurrence_R(5, 2) == 9
    assert recurrence_R(5, 3) == 25
    for d in range(2, 15):
        assert recurrence_R(2, d) == 2
        assert recurrence_R(3, d) == 3
        assert recurrence_R(4, d) == 2 * d + 1
    for s in range(5, 15):
        assert recurrence_R(s, 2) == 2 ** (s - 2) + 1


def test_D_examples_and_base_cases():
    assert recurrence_D(3, 4) == 9
    assert recurrence_D(4, 2) == 11
    assert recurrence_D(4, 3) == 27
    for d in range(2, 15):
        assert recurrence_D(1, d) == 0
        assert recurrence_D(2, d) == 2
    for s in range(3, 15):
        assert recurrence_D(s, 2) == 2 ** (s - 1) + 2 ** (s - 2) - 1


def test_D3_closed_form():
    for d in range(2, 21):
        assert recurrence_D(3, d) == 2 * d + 1


@pytest.mark.parametrize("s", range(2, 8))
@pytest.mark.parametrize("d", range(2, 6))
def test_recurrences_match_naive_unrolling(s, d):
    assert recurrence_R(s, d) == naive_R(s, d)
    assert recurrence_D(s, d) == naive_D(s, d)


def test_recurrences_are_exact_big_integers():
    big = recurrence_D(9, 6)
    assert isinstance(big, int) and big > 2 ** 64
    assert big == naive_D(9, 6)


def test_recurrence_domain():
    for bad in [(1, 2), (2, 1)]:
        with pytest.raises(ValueError):
            recurrence_R(*bad)
    with pytest.raises(ValueError):
        recurrence_D(0, 2)


def test_derived_examples():
    assert mu(4, 3) == 8
    assert beta(3, 8) == 5
    assert gamma(3, 8) == 1248
    assert gamma(3, 8, HierarchyParams(Fraction(1, 2))) == 624
    assert gamma(2, 8, HierarchyParams(Fraction(1, 7))) == Fraction(4 * (beta(3, 8) + 2) * 6, 7)
    assert derived_params("mu", s=6, k=4) == 2 ** 6
    assert derived_params("beta", s=3, m=8) == 5
    with pytest.raises(ValueError):
        mu(5, 3)
    with pytest.raises(ValueError):
        derived_params("delta")


def test_beta_clamps_small_m():
    # alpha(m) = 1 for m <= 6; D needs d >= 2
    assert beta(4, 5) == recurrence_D(4, 2)


def test_params_validation():
    with pytest.raises(ValueError):
        HierarchyParams(0)
    assert HierarchyParams(Fraction(3, 2)).c_prime == Fraction(3, 2)
    assert "placeholder" in HierarchyParams().notes


def test_concurrent_calls_agree():
    args = [(d, m) for d in range(1, 5) for m in range(1, 3000, 7)]
    with ThreadPoolExecutor(8) as pool:
        got = list(pool.map(lambda a: alpha_d(*a), args))
    assert got == [alpha_d_direct(*a) for a in args]
