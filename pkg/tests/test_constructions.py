import itertools
import random
from math import prod

import pytest
from hypothesis import given
from hypothesis import strategies as st

from permvc.core import BlockedSequence, Matrix01, PermFamily, Permutation, is_function_matrix, perm_to_matrix
from permvc.oracle import random_blocking, random_ds_sequence
from permvc.patterns import contains_ds, contains_pattern, ds_matrix, is_ds_sequence
from permvc.constructions import (
    PHI_CAP,
    BudgetExhausted,
    Infeasible,
    build_family,
    compress_rows,
    contractible_pairs,
    ds4_free_source,
    flattenings,
    gen_ds3,
    inflate,
    j2_expand,
    phi,
    phi_odd,
    recontract,
    smt,
    tile_and_pad,
)

from conftest import grid, matrices, perms

J2 = perm_to_matrix(Permutation((2, 1)))

# transcribed from the displayed sets (bullet = 1)
PHI2_DISPLAY = {
    frozenset({grid("0001", "0010", "0100", "1000")}),
    frozenset({grid("0100", "1000", "0001", "0010"), grid("0100", "1001", "0010")}),
}
DIAG_DROP4_DISPLAY = frozenset({
    grid("01000", "10000", "00001", "00100", "00010"),
    grid("01000", "10000", "00001", "00110"),
    grid("01000", "10001", "00100", "00010"),
    grid("01000", "10001", "00110"),
})


def seq(text):
    return BlockedSequence(tuple(tuple(b.split()) for b in text.split("|")))


# --- smt ------------------------------------------------------------------------


def test_smt_examples():
    assert smt(seq("a b | b a")) == Matrix01.ones(2, 2)
    assert smt(seq("a | b | a")).cells == {(1, 1), (2, 2), (3, 1)}
    assert smt(seq("c a | c")).cells == {(1, 1), (1, 2), (2, 1)}


@given(st.lists(st.integers(1, 6), max_size=25))
def test_smt_shape(xs):
    s = BlockedSequence.greedy(xs)
    a = smt(s)
    assert (a.m, a.n) == (len(s.blocks), s.alphabet_size)
    assert a.count == len(s)


@pytest.mark.parametrize("s", [2, 3, 4])
def test_smt_of_ds_sequence_avoids_next_ds(s):
    rng = random.Random(s)
    for _ in range(300):
        x = random_ds_sequence(rng, s, rng.randint(2, 12))
        a = smt(random_blocking(rng, x))
        assert contains_pattern(a, ds_matrix(s + 1)) is None


# --- expansions ----------------------------------------------------------------


def test_j2_examples():
    assert j2_expand((2, 1)).cells == {(1, 4), (2, 3), (3, 2), (4, 1)}
    assert j2_expand((1, 2)).cells == {(1, 2), (2, 1), (3, 4), (4, 3)}
    assert j2_expand((1, 2), 4).cells == {(1, 2), (2, 1), (3, 5), (4, 3), (5, 4)}
    with pytest.raises(ValueError):
        j2_expand((1, 2), 6)
    with pytest.raises(ValueError):
        j2_expand((1, 2), 0)


@given(perms(max_n=4), st.data())
def test_drop_variant_reduces_to_plain_expansion(p, data):
    i = data.draw(st.integers(1, 2 * p.n + 1))
    a = j2_expand(p, i)
    assert (a.m, a.n) == (2 * p.n + 1, 2 * p.n + 1)
    assert a.rows[-1] == (i,)
    keep_cols = [c for c in range(1, a.n + 1) if c != i]
    assert a.submatrix(list(range(1, a.m)), keep_cols) == j2_expand(p)


def test_flattening_displays():
    assert flattenings((2, 1)) == {j2_expand((2, 1))}
    assert flattenings((1, 2)) == {grid("0100", "1000", "0001", "0010"), grid("0100", "1001", "0010")}
    assert flattenings((1, 2), 4) == DIAG_DROP4_DISPLAY


def test_phi_displays():
    assert phi(1) == [frozenset({J2})]
    assert set(phi(2)) == PHI2_DISPLAY and len(phi(2)) == 2
    assert DIAG_DROP4_DISPLAY in phi(2, 4)
    assert len(phi(3)) == 6
    with pytest.raises(ValueError):
        phi(PHI_CAP + 1)
    assert len(phi_odd(1)) == 3


def independent_flattenings(p, drop=None):
    """Contract by function values: merging pair (2i, 2i+1) lowers every later row by one."""
    base = j2_expand(p, drop)
    values = [base.cols[j][0] for j in range(base.n)]
    first = {r: min(c for rr, c in base.cells if rr == r) for r in range(1, base.m + 1)}
    pairs = [r for r in range(2, base.m, 2) if first[r] < first[r + 1]]
    out = set()
    for k in range(len(pairs) + 1):
        for chosen in itertools.combinations(pairs, k):
            shift = [sum(1 for r in chosen if r + 1 <= v) for v in values]
            m = base.m - len(chosen)
            out.add(Matrix01(m, base.n, frozenset((v - s, j) for j, (v, s) in enumerate(zip(values, shift), 1))))
    return frozenset(out), len(pairs)


@given(perms(max_n=4), st.data())
def test_flattenings_count_and_shape(p, data):
    drop = data.draw(st.one_of(st.none(), st.integers(1, 2 * p.n + 1)))
    fs = flattenings(p, drop)
    expect, c = independent_flattenings(p, drop)
    assert fs == expect
    assert len(fs) == 2 ** c == 2 ** len(contractible_pairs(j2_expand(p, drop)))
    assert all(is_function_matrix(f) for f in fs)


# --- tile and pad -------------------------------------------------------------


def test_tile_examples():
    assert tile_and_pad(J2, 2) == J2
    assert tile_and_pad(J2, 4).cells == {(1, 2), (2, 1), (3, 4), (4, 3)}
    a = tile_and_pad(J2, 3)
    assert (a.m, a.n) == (3, 3)
    assert a.cells == {(1, 2), (2, 1), (3, 3)}
    assert not contains_ds(a, 3)
    with pytest.raises(ValueError):
        tile_and_pad(Matrix01.ones(1, 3), 2)
    with pytest.raises(ValueError):
        tile_and_pad(Matrix01.ones(3, 1), 2)


@given(matrices(max_m=4, max_n=4), st.integers(1, 12), st.integers(2, 5))
def test_tile_preserves_columns_and_avoidance(block, n, s):
    try:
        a = tile_and_pad(block, n)
    except ValueError:
        assume_ok = block.n > n or -(-n // block.n) * block.m > n
        assert assume_ok
        return
    assert (a.m, a.n) == (n, n)
    counts = block.col_counts()
    assert a.col_counts() == [counts[(j - 1) % block.n] for j in range(1, n + 1)]
    if not contains_ds(block, s):
        assert not contains_ds(a, s)


# --- family builder -----------------------------------------------------------


def test_inflate_examples():
    assert inflate((2, 1)) == Permutation((2, 1))
    assert inflate((1, 1)) == Permutation((1, 2))
    assert inflate((3, 1, 3)) == Permutation((2, 1, 3))
    assert compress_rows((4, 2, 4)) == (2, 1, 2)
    assert recontract(inflate((4, 2, 4)), (4, 2, 4)) == (2, 1, 2)


def test_build_family_examples():
    assert build_family(Matrix01.identity(2)).family == PermFamily.of([Permutation((1, 2))])
    b = build_family(Matrix01.ones(2, 2))
    assert set(b.family) == {Permutation((1, 2)), Permutation((2, 1))}
    assert (2, 1) in b.origins[Permutation((2, 1))]
    assert (1, 1) in b.origins[Permutation((1, 2))]
    assert b.complete and b.choices == 4


def test_build_family_errors_and_budget():
    with pytest.raises(ValueError):
        build_family(Matrix01(2, 2, frozenset({(1, 1)})))
    with pytest.raises(ValueError):
        build_family(Matrix01.ones(2, 2), sampler="greedy")
    b = build_family(Matrix01.ones(3, 3), budget=5)
    assert not b.complete and b.choices == 5
    r1 = build_family(Matrix01.ones(4, 4), "random", 30, seed=3)
    r2 = build_family(Matrix01.ones(4, 4), "random", 30, seed=3)
    assert r1.family == r2.family and not r1.complete


@given(matrices(max_m=4, max_n=4))
def test_build_family_bookkeeping(a):
    if any(not c for c in a.cols):
        return
    b = build_family(a)
    assert b.choices == prod(len(c) for c in a.cols)
    for p, sources in b.origins.items():
        for values in sources:
            assert recontract(p, values) == values
        assert len(sources) <= 2 ** a.n
    assert b.max_preimages() <= 2 ** a.n


@pytest.mark.parametrize("rho", [1, 2, 3])
def test_family_size_bound(rho):
    rng = random.Random(rho)
    for n in range(2, 5):
        for _ in range(10):
            a = Matrix01(n, n, frozenset((r, c) for c in range(1, n + 1)
                                        for r in rng.sample(range(1, n + 1), min(rho, n))))
            b = build_family(a)
            assert len(b.family) >= (min(rho, n) / 4) ** n


# --- ababa-free generator -------------------------------------------------------


def test_gen_ds3_examples():
    assert gen_ds3(5, 1).blocks == ((1, 2, 3, 4, 5),)
    s = gen_ds3(2, 2)
    assert is_ds_sequence(s.symbols, 3)
    assert sorted(s.symbols) == [1, 1, 2, 2]


@pytest.mark.parametrize("n,mult", [(3, 2), (6, 2), (7, 3), (8, 3), (10, 3), (9, 2)])
def test_gen_ds3_output_is_checked(n, mult):
    s = gen_ds3(n, mult)
    assert is_ds_sequence(s.symbols, 3)
    counts = {x: s.symbols.count(x) for x in set(s.symbols)}
    assert sorted(counts) == list(range(1, n + 1)) and set(counts.values()) == {mult}


@pytest.mark.parametrize("n,mult", [(1, 2), (2, 3), (3, 3), (4, 4), (5, 4)])
def test_gen_ds3_infeasible(n, mult):
    with pytest.raises(Infeasible):
        gen_ds3(n, mult)


def test_gen_ds3_budget_is_not_infeasible():
    with pytest.raises(BudgetExhausted):
        gen_ds3(6, 4, node_limit=2_000, attempt_limit=500)
    with pytest.raises(ValueError):
        gen_ds3(0, 1)


def test_ds4_free_source():
    a = ds4_free_source(7, 4, 2)
    assert (a.m, a.n) == (7, 7)
    assert not contains_ds(a, 4)
    assert all(a.cols)
